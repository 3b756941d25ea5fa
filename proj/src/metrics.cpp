#include "foqa/metrics.hpp"

#include <stdexcept>

#include "foqa/datasets.hpp"

namespace foqa {

F1Score micro_f1(const std::vector<std::vector<int>>& predicted,
                 const std::vector<std::vector<int>>& gold) {
  if (predicted.size() != gold.size()) {
    throw std::invalid_argument("micro_f1: corpus size mismatch");
  }
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i].size() != gold[i].size()) {
      throw std::invalid_argument("micro_f1: sequence length mismatch at row " + std::to_string(i));
    }
    for (std::size_t t = 0; t < predicted[i].size(); ++t) {
      const bool p = predicted[i][t] == kTagE;
      const bool g = gold[i][t] == kTagE;
      if (p && g) ++tp;
      else if (p && !g) ++fp;
      else if (!p && g) ++fn;
    }
  }
  if (tp + fp + fn == 0) return {1.0, 1.0, 1.0};
  F1Score s;
  s.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  s.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  s.f1 = s.precision + s.recall == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

}  // namespace foqa

#pragma once

#include <cstddef>
#include <vector>

namespace foqa {

struct F1Score {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Token-level micro-averaged precision/recall/F1 for the entity class,
// pooled over the whole corpus. Sequences must align pairwise. A corpus
// with no entity tokens anywhere (gold or predicted) scores 1.
F1Score micro_f1(const std::vector<std::vector<int>>& predicted,
                 const std::vector<std::vector<int>>& gold);

}  // namespace foqa

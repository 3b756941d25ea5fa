#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace foqa::nn {

template <class S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;

template <class S>
VecX<S> sigmoid(const VecX<S>& v) {
  return v.array().unaryExpr([](S x) { return S(1) / (S(1) + std::exp(-x)); }).matrix();
}

template <class S>
VecX<S> tanh_vec(const VecX<S>& v) {
  return v.array().tanh().matrix();
}

// Numerically stable softmax of one column, renormalized so the result sums
// to 1 up to roundoff regardless of logit magnitude.
template <class S>
VecX<S> softmax(const VecX<S>& logits) {
  VecX<S> p = (logits.array() - logits.maxCoeff()).exp().matrix();
  return p / p.sum();
}

// Column-wise softmax.
template <class S>
MatX<S> softmax_columns(const MatX<S>& logits) {
  MatX<S> out(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) out.col(c) = softmax<S>(logits.col(c));
  return out;
}

// Index of the largest coefficient; ties resolve to the lowest index.
template <class S>
int argmax(const VecX<S>& v) {
  if (v.size() == 0) throw std::invalid_argument("argmax: empty vector");
  int best = 0;
  for (int i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace foqa::nn

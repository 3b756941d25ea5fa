#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <span>

#include "foqa/nn/model.hpp"

namespace foqa::nn {

// One training example: token sequence plus class targets. per_token models
// expect one target per position; final_state models expect exactly one.
struct Example {
  std::vector<std::string> tokens;
  std::vector<int> targets;
};

// Mean categorical cross-entropy over output positions; gradients for all
// trainable parameters accumulate into `grads`. Pass an RNG to enable
// dropout (training mode).
template <class S>
S loss_and_gradients(const SequenceModel<S>& m, const Example& ex, ModelGrads<S>& grads,
                     std::mt19937_64* dropout_rng = nullptr, double dropout_override = -1.0) {
  ForwardTrace<S> trace = forward_trace(m, ex.tokens, dropout_rng, dropout_override);
  const Eigen::Index positions = trace.probs.cols();
  if (m.mode == OutputMode::per_token) {
    if (ex.targets.size() != static_cast<std::size_t>(positions)) {
      throw std::invalid_argument("loss: per-token targets must match sequence length");
    }
  } else if (ex.targets.size() != 1) {
    throw std::invalid_argument("loss: final-state models take exactly one target");
  }
  const int k = m.output_dim();
  for (int t : ex.targets) {
    if (t < 0 || t >= k) throw std::invalid_argument("loss: target index outside output space");
  }

  S loss = S(0);
  MatX<S> d_logits = trace.probs;
  const S inv = S(1) / static_cast<S>(positions);
  for (Eigen::Index c = 0; c < positions; ++c) {
    const int target = ex.targets[c];
    loss -= std::log(trace.probs(target, c));
    d_logits(target, c) -= S(1);
  }
  loss *= inv;
  d_logits *= inv;
  backward(m, trace, d_logits, grads);
  return loss;
}

// Loss only (no gradient accumulation); used by the finite-difference probe.
template <class S>
S loss_only(const SequenceModel<S>& m, const Example& ex) {
  ForwardTrace<S> trace = forward_trace(m, ex.tokens);
  const Eigen::Index positions = trace.probs.cols();
  S loss = S(0);
  for (Eigen::Index c = 0; c < positions; ++c) loss -= std::log(trace.probs(ex.targets[c], c));
  return loss / static_cast<S>(positions);
}

// One pass of per-example SGD: shuffled order, theta <- theta - lr * grad,
// inverted dropout active at `dropout_ratio`. Returns the mean example loss.
// The pad embedding column never moves.
template <class S>
S sgd_epoch(SequenceModel<S>& m, std::span<const Example> dataset, S learning_rate,
            double dropout_ratio, std::uint64_t rng_seed) {
  if (dataset.empty()) throw std::invalid_argument("sgd_epoch: empty dataset");
  if (learning_rate < S(0)) throw std::invalid_argument("sgd_epoch: negative learning rate");
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(rng_seed);
  std::shuffle(order.begin(), order.end(), rng);

  ModelGrads<S> grads = ModelGrads<S>::shaped_like(m);
  auto values = trainable_views(m);
  auto gradients = grad_views(grads, m);
  S total = S(0);
  for (std::size_t idx : order) {
    grads.set_zero();
    total += loss_and_gradients(m, dataset[idx], grads, &rng, dropout_ratio);
    if (m.embedding.trainable) grads.embedding.col(m.embedding.pad_col).setZero();
    for (std::size_t b = 0; b < values.size(); ++b) {
      Eigen::Map<VecX<S>>(values[b].data, values[b].size()) -=
          learning_rate * Eigen::Map<const VecX<S>>(gradients[b].data, gradients[b].size());
    }
  }
  return total / static_cast<S>(dataset.size());
}

struct GradCheckBlock {
  std::string name;
  double max_rel_err = 0.0;
  bool pass = true;
};

struct GradCheckReport {
  std::vector<GradCheckBlock> blocks;
  double max_rel_err = 0.0;
  bool all_pass = true;
};

// Central-difference check of the analytic gradients, block by block.
// Relative error uses max(|analytic|, |numeric|, denom_floor) as scale.
// `corrupt` (test hook) can perturb the analytic gradients before comparison
// to prove the check catches faults.
template <class S>
GradCheckReport grad_check(
    SequenceModel<S>& m, const Example& ex, S epsilon, double tolerance,
    const std::function<void(std::vector<TensorView<S>>&)>& corrupt = nullptr,
    double denom_floor = 1e-5) {
  if (epsilon <= S(0)) throw std::invalid_argument("grad_check: epsilon must be positive");
  ModelGrads<S> grads = ModelGrads<S>::shaped_like(m);
  loss_and_gradients(m, ex, grads);
  auto gradients = grad_views(grads, m);
  if (corrupt) corrupt(gradients);
  auto values = trainable_views(m);

  GradCheckReport report;
  for (std::size_t b = 0; b < values.size(); ++b) {
    GradCheckBlock block;
    block.name = values[b].name;
    for (Eigen::Index i = 0; i < values[b].size(); ++i) {
      S* theta = values[b].data + i;
      const S saved = *theta;
      *theta = saved + epsilon;
      const S up = loss_only(m, ex);
      *theta = saved - epsilon;
      const S down = loss_only(m, ex);
      *theta = saved;
      const double numeric = static_cast<double>((up - down) / (S(2) * epsilon));
      const double analytic = static_cast<double>(gradients[b].data[i]);
      const double scale = std::max({std::abs(analytic), std::abs(numeric), denom_floor});
      block.max_rel_err = std::max(block.max_rel_err, std::abs(analytic - numeric) / scale);
    }
    block.pass = block.max_rel_err < tolerance;
    report.max_rel_err = std::max(report.max_rel_err, block.max_rel_err);
    report.all_pass = report.all_pass && block.pass;
    report.blocks.push_back(std::move(block));
  }
  return report;
}

// Same comparison over caller-supplied blocks; an empty list passes
// vacuously.
inline GradCheckReport grad_check_blocks(const std::vector<std::pair<std::string, double>>& diffs,
                                         double tolerance) {
  GradCheckReport report;
  for (const auto& [name, err] : diffs) {
    report.blocks.push_back({name, err, err < tolerance});
    report.max_rel_err = std::max(report.max_rel_err, err);
    report.all_pass = report.all_pass && err < tolerance;
  }
  return report;
}

}  // namespace foqa::nn

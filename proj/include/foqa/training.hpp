#pragma once

#include <string>
#include <vector>

#include "foqa/nn/model.hpp"

namespace foqa {

// One grid point. Architecture fields mirror the searched space (cell type,
// direction, depth 1-3, dropout 0-0.5); the rest are fixed training knobs.
struct TrainConfig {
  nn::CellKind cell = nn::CellKind::gru;
  bool bidirectional = true;
  int depth = 2;
  int hidden = 32;
  double dropout = 0.1;
  int embedding_dim = 16;
  double learning_rate = 0.5;
  int epochs = 20;
  std::uint64_t seed = 1;
  bool train_embedding = true;  // off when a pretrained table is supplied

  std::string describe() const;
  std::vector<nn::LayerSpec> layer_specs() const;
  void validate() const;  // throws on invariant violations
};

struct ConfigReport {
  TrainConfig config;
  double best_metric = 0.0;  // micro-F1 (tagger) or accuracy (classifier)
  int best_epoch = -1;
  double final_train_loss = 0.0;
};

// Grid file: JSON array of config objects, or {"defaults": {...},
// "configs": [...]} where each config overrides the defaults.
std::vector<TrainConfig> load_grid(const std::string& path, const TrainConfig& base = {});
std::vector<TrainConfig> parse_grid(const std::string& json_text, const TrainConfig& base = {});

}  // namespace foqa

#pragma once

#include <string>
#include <vector>

#include "foqa/datasets.hpp"
#include "foqa/nn/io.hpp"
#include "foqa/nn/train.hpp"
#include "foqa/training.hpp"

namespace foqa {

// Fixed-length input window: pads are prepended when the question is short,
// excess tokens are dropped from the tail when it is long.
struct PaddedQuestion {
  std::vector<std::string> tokens;  // length exactly N
  std::vector<int> source_index;    // per position: original index, -1 for pad
  std::size_t dropped_tail = 0;
};

PaddedQuestion pad_question(const std::vector<std::string>& tokens, int n,
                            const std::string& pad_token = "<pad>");

// Per-token E/C sequence tagger.
struct TaggerModel {
  nn::SequenceModel<double> net;  // per_token mode, k = 2
  int input_length = 0;           // N

  void save(const std::string& path) const;
  static TaggerModel load(const std::string& path);
};

// Tags each (unpadded) question token as entity or context. Pad positions
// are dropped via the alignment map before returning.
std::vector<int> tag(const TaggerModel& model, const std::string& question);
std::vector<int> tag_tokens(const TaggerModel& model, const std::vector<std::string>& tokens);

// Maximal runs of E become space-joined spans, left to right.
std::vector<std::string> extract_entities(const std::vector<int>& tags,
                                          const std::vector<std::string>& tokens);

struct TaggerTrainResult {
  TaggerModel best;
  std::vector<ConfigReport> report;
  int best_config = -1;
};

// Trains every grid configuration, selecting by micro-averaged F1 of the
// entity class on the validation set (best epoch snapshot per config).
// `input_length` <= 0 derives N from the longest train/valid question.
TaggerTrainResult train_tagger(const std::vector<TaggedQuestion>& train,
                               const std::vector<TaggedQuestion>& valid,
                               const std::vector<TrainConfig>& grid, int input_length = 0,
                               bool verbose = false);

}  // namespace foqa

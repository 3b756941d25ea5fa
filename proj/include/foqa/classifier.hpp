#pragma once

#include <string>
#include <vector>

#include "foqa/datasets.hpp"
#include "foqa/nn/io.hpp"
#include "foqa/nn/train.hpp"
#include "foqa/training.hpp"

namespace foqa {

struct RelationPrediction {
  int label = -1;                   // index into the label space (argmax)
  std::string relation;             // the label itself
  nn::VecX<double> distribution;    // over the full label space, sums to 1
};

// Whole-question classifier over the K relation types seen in training.
struct ClassifierModel {
  nn::SequenceModel<double> net;    // final_state mode, k = |labels|
  std::vector<std::string> labels;  // ordered label space
  int input_length = 0;

  int label_index(const std::string& relation) const;
  void save(const std::string& path) const;
  static ClassifierModel load(const std::string& path);
};

RelationPrediction predict_relation(const ClassifierModel& model, const std::string& question);
RelationPrediction predict_relation_tokens(const ClassifierModel& model,
                                           const std::vector<std::string>& tokens);

// Masks the distribution to `allowed` label indices and renormalizes.
// Throws when no allowed label intersects the label space.
RelationPrediction predict_constrained(const ClassifierModel& model,
                                       const nn::VecX<double>& distribution,
                                       const std::vector<int>& allowed);

struct ClassifierTrainResult {
  ClassifierModel best;
  std::vector<ConfigReport> report;
  int best_config = -1;
};

// Label space = relations observed in the training questions, sorted.
// Selection metric: validation accuracy.
ClassifierTrainResult train_classifier(const std::vector<LabeledQuestion>& train,
                                       const std::vector<LabeledQuestion>& valid,
                                       const std::vector<TrainConfig>& grid, int input_length = 0,
                                       bool verbose = false);

}  // namespace foqa

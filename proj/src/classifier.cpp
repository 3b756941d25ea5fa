#include "foqa/classifier.hpp"

#include <algorithm>
#include <iostream>
#include <set>

#include "foqa/tagger.hpp"
#include "foqa/text.hpp"

namespace foqa {

int ClassifierModel::label_index(const std::string& relation) const {
  auto it = std::lower_bound(labels.begin(), labels.end(), relation);
  if (it == labels.end() || *it != relation) return -1;
  return static_cast<int>(it - labels.begin());
}

RelationPrediction predict_relation_tokens(const ClassifierModel& model,
                                           const std::vector<std::string>& tokens) {
  if (tokens.empty()) throw std::invalid_argument("predict_relation: empty question");
  PaddedQuestion padded = pad_question(tokens, model.input_length, model.net.embedding.pad_token);
  nn::MatX<double> probs = nn::forward(model.net, padded.tokens);
  RelationPrediction pred;
  pred.distribution = probs.col(0);
  pred.label = nn::argmax<double>(pred.distribution);
  pred.relation = model.labels.at(pred.label);
  return pred;
}

RelationPrediction predict_relation(const ClassifierModel& model, const std::string& question) {
  return predict_relation_tokens(model, tokenize(question));
}

RelationPrediction predict_constrained(const ClassifierModel& model,
                                       const nn::VecX<double>& distribution,
                                       const std::vector<int>& allowed) {
  if (allowed.empty()) throw std::invalid_argument("predict_constrained: empty allowed set");
  nn::VecX<double> masked = nn::VecX<double>::Zero(distribution.size());
  bool any = false;
  for (int label : allowed) {
    if (label >= 0 && label < distribution.size()) {
      masked[label] = distribution[label];
      any = true;
    }
  }
  if (!any) {
    throw std::invalid_argument("predict_constrained: allowed set disjoint from label space");
  }
  const double mass = masked.sum();
  RelationPrediction pred;
  // Renormalize; if the allowed mass underflowed to zero, fall back to a
  // uniform distribution over the allowed labels so argmax stays defined.
  if (mass > 0.0) {
    pred.distribution = masked / mass;
  } else {
    pred.distribution = nn::VecX<double>::Zero(distribution.size());
    double uniform = 0.0;
    for (int label : allowed) {
      if (label >= 0 && label < distribution.size()) uniform += 1.0;
    }
    for (int label : allowed) {
      if (label >= 0 && label < distribution.size()) pred.distribution[label] = 1.0 / uniform;
    }
  }
  pred.label = nn::argmax<double>(pred.distribution);
  pred.relation = model.labels.at(pred.label);
  return pred;
}

namespace {

double validation_accuracy(const ClassifierModel& model, const std::vector<LabeledQuestion>& valid) {
  std::size_t correct = 0, total = 0;
  for (const auto& row : valid) {
    if (row.tokens.empty()) continue;
    ++total;
    auto pred = predict_relation_tokens(model, row.tokens);
    if (pred.relation == row.relation) ++correct;
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace

ClassifierTrainResult train_classifier(const std::vector<LabeledQuestion>& train,
                                       const std::vector<LabeledQuestion>& valid,
                                       const std::vector<TrainConfig>& grid, int input_length,
                                       bool verbose) {
  if (train.empty() || valid.empty()) throw std::invalid_argument("train_classifier: empty dataset");
  if (grid.empty()) throw std::invalid_argument("train_classifier: empty grid");
  for (const auto& cfg : grid) cfg.validate();

  int n = input_length;
  if (n <= 0) {
    std::size_t longest = 1;
    for (const auto& row : train) longest = std::max(longest, row.tokens.size());
    for (const auto& row : valid) longest = std::max(longest, row.tokens.size());
    n = static_cast<int>(longest);
  }

  std::set<std::string> vocab_set, label_set;
  for (const auto& row : train) {
    vocab_set.insert(row.tokens.begin(), row.tokens.end());
    label_set.insert(row.relation);
  }
  const std::vector<std::string> vocab(vocab_set.begin(), vocab_set.end());
  std::vector<std::string> labels(label_set.begin(), label_set.end());
  if (labels.size() < 2) {
    // k >= 2 is a model invariant; a single-relation dataset still trains
    // with an explicit reject column that no example targets.
    labels.push_back("<none>");
    std::sort(labels.begin(), labels.end());
  }

  ClassifierTrainResult result;
  for (const auto& cfg : grid) {
    auto embedding =
        nn::make_embedding<double>(vocab, cfg.embedding_dim, cfg.seed, cfg.train_embedding);
    ClassifierModel model{nn::make_model<double>(std::move(embedding), cfg.layer_specs(),
                                                 nn::OutputMode::final_state,
                                                 static_cast<int>(labels.size()), cfg.seed),
                          labels, n};

    std::vector<nn::Example> examples;
    examples.reserve(train.size());
    for (const auto& row : train) {
      if (row.tokens.empty()) continue;
      const int label = model.label_index(row.relation);
      PaddedQuestion padded = pad_question(row.tokens, n, model.net.embedding.pad_token);
      examples.push_back(nn::Example{std::move(padded.tokens), {label}});
    }

    ConfigReport report;
    report.config = cfg;
    report.best_metric = -1.0;
    nn::SequenceModel<double> best_net = model.net;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      const double loss = nn::sgd_epoch<double>(model.net, examples, cfg.learning_rate,
                                                cfg.dropout, cfg.seed + 17 * epoch + 1);
      const double acc = validation_accuracy(model, valid);
      if (acc > report.best_metric) {
        report.best_metric = acc;
        report.best_epoch = epoch;
        best_net = model.net;
      }
      report.final_train_loss = loss;
      if (verbose) {
        std::cerr << "[classifier " << cfg.describe() << "] epoch " << epoch << " loss " << loss
                  << " valid-acc " << acc << "\n";
      }
    }
    model.net = std::move(best_net);
    if (result.best_config < 0 ||
        report.best_metric > result.report[result.best_config].best_metric) {
      result.best_config = static_cast<int>(result.report.size());
      result.best = std::move(model);
    }
    result.report.push_back(std::move(report));
  }
  return result;
}

void ClassifierModel::save(const std::string& path) const {
  nn::ModelExtras extras;
  extras.task = "classifier";
  extras.labels = labels;
  extras.input_length = input_length;
  nn::save_model_file(path, net, extras);
}

ClassifierModel ClassifierModel::load(const std::string& path) {
  auto [net, extras] = nn::load_model_file<double>(path);
  if (extras.task != "classifier" || !extras.labels || !extras.input_length) {
    throw std::runtime_error("model file is not a classifier: " + path);
  }
  if (net.mode != nn::OutputMode::final_state ||
      net.output_dim() != static_cast<int>(extras.labels->size())) {
    throw std::runtime_error("classifier model/label space mismatch: " + path);
  }
  return ClassifierModel{std::move(net), std::move(*extras.labels), *extras.input_length};
}

}  // namespace foqa

#include "foqa/tagger.hpp"

#include <algorithm>
#include <iostream>
#include <set>

#include "foqa/metrics.hpp"
#include "foqa/text.hpp"

namespace foqa {

PaddedQuestion pad_question(const std::vector<std::string>& tokens, int n,
                            const std::string& pad_token) {
  if (n < 1) throw std::invalid_argument("pad_question: N must be >= 1");
  if (tokens.empty()) throw std::invalid_argument("pad_question: empty token list");
  PaddedQuestion out;
  const std::size_t keep = std::min(tokens.size(), static_cast<std::size_t>(n));
  out.dropped_tail = tokens.size() - keep;
  const std::size_t pads = static_cast<std::size_t>(n) - keep;
  out.tokens.reserve(n);
  out.source_index.reserve(n);
  for (std::size_t i = 0; i < pads; ++i) {
    out.tokens.push_back(pad_token);
    out.source_index.push_back(-1);
  }
  for (std::size_t i = 0; i < keep; ++i) {
    out.tokens.push_back(tokens[i]);
    out.source_index.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<int> tag_tokens(const TaggerModel& model, const std::vector<std::string>& tokens) {
  if (tokens.empty()) throw std::invalid_argument("tag: question normalizes to zero tokens");
  PaddedQuestion padded = pad_question(tokens, model.input_length, model.net.embedding.pad_token);
  nn::MatX<double> probs = nn::forward(model.net, padded.tokens);
  std::vector<int> tags(std::min(tokens.size(), static_cast<std::size_t>(model.input_length)), kTagC);
  for (int pos = 0; pos < model.input_length; ++pos) {
    const int src = padded.source_index[pos];
    if (src < 0) continue;
    tags[src] = nn::argmax<double>(probs.col(pos));
  }
  return tags;
}

std::vector<int> tag(const TaggerModel& model, const std::string& question) {
  return tag_tokens(model, tokenize(question));
}

std::vector<std::string> extract_entities(const std::vector<int>& tags,
                                          const std::vector<std::string>& tokens) {
  if (tags.size() != tokens.size()) {
    throw std::invalid_argument("extract_entities: tags/tokens length mismatch");
  }
  std::vector<std::string> spans;
  std::string current;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] == kTagE) {
      if (!current.empty()) current.push_back(' ');
      current += tokens[i];
    } else if (!current.empty()) {
      spans.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) spans.push_back(std::move(current));
  return spans;
}

namespace {

std::vector<nn::Example> to_examples(const std::vector<TaggedQuestion>& rows, int n,
                                     const std::string& pad_token) {
  std::vector<nn::Example> examples;
  examples.reserve(rows.size());
  for (const auto& row : rows) {
    if (row.tokens.empty()) continue;
    PaddedQuestion padded = pad_question(row.tokens, n, pad_token);
    nn::Example ex;
    ex.tokens = padded.tokens;
    ex.targets.assign(n, kTagC);  // pad positions train as context
    for (int pos = 0; pos < n; ++pos) {
      const int src = padded.source_index[pos];
      if (src >= 0) ex.targets[pos] = row.tags[src];
    }
    examples.push_back(std::move(ex));
  }
  return examples;
}

double validation_f1(const TaggerModel& model, const std::vector<TaggedQuestion>& valid) {
  std::vector<std::vector<int>> predicted, gold;
  predicted.reserve(valid.size());
  gold.reserve(valid.size());
  for (const auto& row : valid) {
    if (row.tokens.empty()) continue;
    auto tags = tag_tokens(model, row.tokens);
    std::vector<int> truth(row.tags.begin(), row.tags.begin() + tags.size());
    predicted.push_back(std::move(tags));
    gold.push_back(std::move(truth));
  }
  return micro_f1(predicted, gold).f1;
}

}  // namespace

TaggerTrainResult train_tagger(const std::vector<TaggedQuestion>& train,
                               const std::vector<TaggedQuestion>& valid,
                               const std::vector<TrainConfig>& grid, int input_length,
                               bool verbose) {
  if (train.empty() || valid.empty()) throw std::invalid_argument("train_tagger: empty dataset");
  if (grid.empty()) throw std::invalid_argument("train_tagger: empty grid");
  for (const auto& cfg : grid) cfg.validate();

  int n = input_length;
  if (n <= 0) {
    std::size_t longest = 1;
    for (const auto& row : train) longest = std::max(longest, row.tokens.size());
    for (const auto& row : valid) longest = std::max(longest, row.tokens.size());
    n = static_cast<int>(longest);
  }

  std::set<std::string> vocab_set;
  for (const auto& row : train) vocab_set.insert(row.tokens.begin(), row.tokens.end());
  const std::vector<std::string> vocab(vocab_set.begin(), vocab_set.end());

  TaggerTrainResult result;
  for (const auto& cfg : grid) {
    auto embedding =
        nn::make_embedding<double>(vocab, cfg.embedding_dim, cfg.seed, cfg.train_embedding);
    TaggerModel model{nn::make_model<double>(std::move(embedding), cfg.layer_specs(),
                                             nn::OutputMode::per_token, 2, cfg.seed),
                      n};
    auto examples = to_examples(train, n, model.net.embedding.pad_token);

    ConfigReport report;
    report.config = cfg;
    nn::SequenceModel<double> best_net = model.net;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      const double loss = nn::sgd_epoch<double>(model.net, examples, cfg.learning_rate,
                                                cfg.dropout, cfg.seed + 17 * epoch + 1);
      const double f1 = validation_f1(model, valid);
      if (f1 > report.best_metric) {
        report.best_metric = f1;
        report.best_epoch = epoch;
        best_net = model.net;
      }
      report.final_train_loss = loss;
      if (verbose) {
        std::cerr << "[tagger " << cfg.describe() << "] epoch " << epoch << " loss " << loss
                  << " valid-F1 " << f1 << "\n";
      }
    }
    model.net = std::move(best_net);
    if (result.best_config < 0 || report.best_metric > result.report[result.best_config].best_metric) {
      result.best_config = static_cast<int>(result.report.size());
      result.best = std::move(model);
    }
    result.report.push_back(std::move(report));
  }
  return result;
}

void TaggerModel::save(const std::string& path) const {
  nn::ModelExtras extras;
  extras.task = "tagger";
  extras.input_length = input_length;
  nn::save_model_file(path, net, extras);
}

TaggerModel TaggerModel::load(const std::string& path) {
  auto [net, extras] = nn::load_model_file<double>(path);
  if (extras.task != "tagger" || !extras.input_length) {
    throw std::runtime_error("model file is not a tagger: " + path);
  }
  if (net.mode != nn::OutputMode::per_token || net.output_dim() != 2) {
    throw std::runtime_error("tagger model must be per-token with k=2: " + path);
  }
  return TaggerModel{std::move(net), *extras.input_length};
}

}  // namespace foqa

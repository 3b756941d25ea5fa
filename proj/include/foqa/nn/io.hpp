#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>

#include "foqa/nn/model.hpp"

namespace foqa::nn {

// Task-specific fields carried alongside the network: the tagger's input
// length, the classifier's label space.
struct ModelExtras {
  std::string task = "generic";
  std::optional<int> input_length;
  std::optional<std::vector<std::string>> labels;
};

namespace detail {

inline std::string format_param(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_param(long double v) {
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%.21Lg", v);
  return buf;
}

}  // namespace detail

// `FOQA-MODEL v1`: architecture header, vocab list, then every parameter
// tensor in registry order as decimal text (17 significant digits for
// doubles, which round-trips exactly).
template <class S>
void save_model(std::ostream& out, const SequenceModel<S>& model, const ModelExtras& extras = {}) {
  auto& m = const_cast<SequenceModel<S>&>(model);  // views are read-only here
  out << "FOQA-MODEL v1\n";
  out << "task " << extras.task << "\n";
  out << "mode " << (m.mode == OutputMode::per_token ? "per_token" : "final_state") << "\n";
  out << "output_dim " << m.output_dim() << "\n";
  out << "layers " << m.depth() << "\n";
  for (const LayerSpec& spec : m.specs) {
    out << "layer " << (spec.cell == CellKind::gru ? "gru" : "lstm") << ' ' << spec.hidden << ' '
        << (spec.bidirectional ? 1 : 0) << ' ' << detail::format_param(spec.dropout) << "\n";
  }
  out << "embedding_dim " << m.embedding.dim() << "\n";
  out << "embedding_trainable " << (m.embedding.trainable ? 1 : 0) << "\n";
  out << "oov_seed " << m.embedding.oov_seed << "\n";
  out << "pad " << m.embedding.pad_token << "\n";
  out << "vocab " << m.embedding.tokens.size() << "\n";
  for (const auto& tok : m.embedding.tokens) out << tok << "\n";
  if (extras.input_length) out << "input_length " << *extras.input_length << "\n";
  if (extras.labels) {
    out << "labels " << extras.labels->size() << "\n";
    for (const auto& label : *extras.labels) out << label << "\n";
  }
  auto views = all_param_views(m);
  out << "params " << views.size() << "\n";
  for (const auto& view : views) {
    out << "param " << view.name << ' ' << view.rows << ' ' << view.cols << "\n";
    for (Eigen::Index i = 0; i < view.size(); ++i) {
      out << detail::format_param(static_cast<double>(view.data[i])) << "\n";
    }
  }
}

template <class S>
std::pair<SequenceModel<S>, ModelExtras> load_model(std::istream& in) {
  std::string line, word;
  if (!std::getline(in, line) || line != "FOQA-MODEL v1") {
    throw std::runtime_error("model: version mismatch, expected 'FOQA-MODEL v1', got '" + line +
                             "'");
  }
  auto read_kv = [&](const std::string& key) -> std::string {
    std::string k, v;
    if (!(in >> k) || k != key) throw std::runtime_error("model: expected '" + key + "' field");
    in >> std::ws;
    std::getline(in, v);
    return v;
  };

  SequenceModel<S> m;
  ModelExtras extras;
  extras.task = read_kv("task");
  const std::string mode = read_kv("mode");
  if (mode != "per_token" && mode != "final_state") throw std::runtime_error("model: bad mode");
  m.mode = mode == "per_token" ? OutputMode::per_token : OutputMode::final_state;
  const int output_dim = std::stoi(read_kv("output_dim"));
  const int depth = std::stoi(read_kv("layers"));
  if (depth < 1 || depth > 3) throw std::runtime_error("model: depth outside 1..3");
  m.specs.resize(depth);
  for (int l = 0; l < depth; ++l) {
    std::string cell;
    int bi = 0;
    if (!(in >> word >> cell >> m.specs[l].hidden >> bi >> m.specs[l].dropout) || word != "layer") {
      throw std::runtime_error("model: malformed layer line");
    }
    if (cell != "gru" && cell != "lstm") throw std::runtime_error("model: unknown cell " + cell);
    m.specs[l].cell = cell == "gru" ? CellKind::gru : CellKind::lstm;
    m.specs[l].bidirectional = bi != 0;
  }
  const int d = std::stoi(read_kv("embedding_dim"));
  m.embedding.trainable = std::stoi(read_kv("embedding_trainable")) != 0;
  m.embedding.oov_seed = std::stoull(read_kv("oov_seed"));
  m.embedding.pad_token = read_kv("pad");
  const std::size_t vocab = std::stoul(read_kv("vocab"));
  m.embedding.tokens.resize(vocab);
  for (auto& tok : m.embedding.tokens) {
    if (!std::getline(in, tok)) throw std::runtime_error("model: truncated vocab");
  }
  for (std::size_t i = 0; i < vocab; ++i) m.embedding.col_of[m.embedding.tokens[i]] = static_cast<int>(i);
  auto pad_it = m.embedding.col_of.find(m.embedding.pad_token);
  if (pad_it == m.embedding.col_of.end()) throw std::runtime_error("model: pad token missing from vocab");
  m.embedding.pad_col = pad_it->second;
  m.embedding.matrix.setZero(d, static_cast<Eigen::Index>(vocab));

  // Optional task sections, then params.
  std::string key;
  while (in >> key) {
    if (key == "input_length") {
      int n = 0;
      in >> n;
      extras.input_length = n;
    } else if (key == "labels") {
      std::size_t count = 0;
      in >> count;
      in >> std::ws;
      std::vector<std::string> labels(count);
      for (auto& label : labels) {
        if (!std::getline(in, label)) throw std::runtime_error("model: truncated labels");
      }
      extras.labels = std::move(labels);
    } else if (key == "params") {
      break;
    } else {
      throw std::runtime_error("model: unexpected section '" + key + "'");
    }
  }
  std::size_t param_count = 0;
  in >> param_count;

  m.layers.resize(depth);
  for (int l = 0; l < depth; ++l) {
    const LayerSpec& spec = m.specs[l];
    const int G = gate_count(spec.cell);
    const int D = l == 0 ? d : m.layer_input_dim(l);
    auto shape_dir = [&](CellParams<S>& p) {
      p.w_in.setZero(G * spec.hidden, D);
      p.w_rec.setZero(G * spec.hidden, spec.hidden);
      p.bias.setZero(G * spec.hidden);
    };
    shape_dir(m.layers[l].fwd);
    if (spec.bidirectional) shape_dir(m.layers[l].bwd);
  }
  m.out_w.setZero(output_dim, m.feature_dim());
  m.out_b.setZero(output_dim);

  auto views = all_param_views(m);
  if (views.size() != param_count) throw std::runtime_error("model: parameter block count mismatch");
  for (auto& view : views) {
    std::string name;
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> word >> name >> rows >> cols) || word != "param" || name != view.name ||
        rows != view.rows || cols != view.cols) {
      throw std::runtime_error("model: parameter block mismatch at '" + view.name + "'");
    }
    for (Eigen::Index i = 0; i < view.size(); ++i) {
      double v;
      if (!(in >> v)) throw std::runtime_error("model: truncated parameter data in " + view.name);
      view.data[i] = static_cast<S>(v);
    }
  }
  return {std::move(m), std::move(extras)};
}

template <class S>
void save_model_file(const std::string& path, const SequenceModel<S>& m,
                     const ModelExtras& extras = {}) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  save_model(out, m, extras);
}

template <class S>
std::pair<SequenceModel<S>, ModelExtras> load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  return load_model<S>(in);
}

}  // namespace foqa::nn

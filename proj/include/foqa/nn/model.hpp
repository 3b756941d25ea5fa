#pragma once

#include <random>
#include <string>
#include <vector>

#include "foqa/nn/core.hpp"
#include "foqa/nn/embedding.hpp"

namespace foqa::nn {

enum class CellKind { gru, lstm };
enum class OutputMode { per_token, final_state };

inline int gate_count(CellKind c) { return c == CellKind::gru ? 3 : 4; }

struct LayerSpec {
  CellKind cell = CellKind::gru;
  int hidden = 8;
  bool bidirectional = false;
  double dropout = 0.0;  // searched range is [0, 0.5]
};

// One direction of one recurrent layer. Gate blocks are stacked row-wise:
// GRU [update; reset; candidate], LSTM [input; forget; output; candidate].
template <class S>
struct CellParams {
  MatX<S> w_in;   // (G*H) x D_in
  MatX<S> w_rec;  // (G*H) x H
  VecX<S> bias;   // (G*H)
  int hidden() const { return static_cast<int>(w_rec.cols()); }
};

template <class S>
struct LayerParams {
  CellParams<S> fwd, bwd;  // bwd unused when unidirectional
};

template <class S>
struct SequenceModel {
  EmbeddingTable<S> embedding;
  std::vector<LayerSpec> specs;  // depth 1..3
  std::vector<LayerParams<S>> layers;
  MatX<S> out_w;  // k x F
  VecX<S> out_b;  // k
  OutputMode mode = OutputMode::per_token;

  int depth() const { return static_cast<int>(specs.size()); }
  int output_dim() const { return static_cast<int>(out_w.rows()); }
  int layer_input_dim(int l) const {
    if (l == 0) return embedding.dim();
    return specs[l - 1].hidden * (specs[l - 1].bidirectional ? 2 : 1);
  }
  int feature_dim() const {
    const LayerSpec& last = specs.back();
    return last.hidden * (last.bidirectional ? 2 : 1);
  }
};

// ---------------------------------------------------------------------------
// Cell steps. GRU (update-gate-keeps-old-state convention, reset applied to
// the previous state before the candidate's recurrent product):
//   z = sigmoid(Wz x + Uz h + bz)
//   r = sigmoid(Wr x + Ur h + br)
//   c = tanh(Wc x + Uc (r.h) + bc)
//   h' = z.h + (1 - z).c
// LSTM (no peepholes):
//   i,f,o = sigmoid(W x + U h + b);  g = tanh(W x + U h + b)
//   c' = f.c + i.g;  h' = o.tanh(c')
// ---------------------------------------------------------------------------

template <class S>
struct LstmState {
  VecX<S> h, c;
};

namespace detail {

template <class S>
void check_step_dims(const CellParams<S>& p, const VecX<S>& x, const VecX<S>& h, int gates) {
  const int H = p.hidden();
  if (p.w_in.rows() != gates * H || p.bias.size() != gates * H || p.w_in.cols() != x.size() ||
      h.size() != H) {
    throw std::invalid_argument("cell step: dimension mismatch");
  }
}

// Returns h'; writes the activated gate stack [z; r; c] to gates_out.
template <class S>
VecX<S> gru_step_full(const CellParams<S>& p, const VecX<S>& x, const VecX<S>& h_prev,
                      VecX<S>& gates_out) {
  const int H = p.hidden();
  VecX<S> pre = p.w_in * x + p.bias;
  pre.head(2 * H) += p.w_rec.topRows(2 * H) * h_prev;
  VecX<S> z = sigmoid<S>(pre.head(H));
  VecX<S> r = sigmoid<S>(pre.segment(H, H));
  VecX<S> rh = r.cwiseProduct(h_prev);
  VecX<S> c = tanh_vec<S>(VecX<S>(pre.tail(H) + p.w_rec.bottomRows(H) * rh));
  gates_out.resize(3 * H);
  gates_out << z, r, c;
  return z.cwiseProduct(h_prev) + (VecX<S>::Ones(H) - z).cwiseProduct(c);
}

// Returns (h', c'); writes the activated gate stack [i; f; o; g].
template <class S>
LstmState<S> lstm_step_full(const CellParams<S>& p, const VecX<S>& x, const LstmState<S>& s,
                            VecX<S>& gates_out) {
  const int H = p.hidden();
  VecX<S> pre = p.w_in * x + p.w_rec * s.h + p.bias;
  VecX<S> i = sigmoid<S>(pre.head(H));
  VecX<S> f = sigmoid<S>(pre.segment(H, H));
  VecX<S> o = sigmoid<S>(pre.segment(2 * H, H));
  VecX<S> g = tanh_vec<S>(VecX<S>(pre.tail(H)));
  gates_out.resize(4 * H);
  gates_out << i, f, o, g;
  LstmState<S> next;
  next.c = f.cwiseProduct(s.c) + i.cwiseProduct(g);
  next.h = o.cwiseProduct(tanh_vec<S>(next.c));
  return next;
}

}  // namespace detail

template <class S>
VecX<S> gru_step(const CellParams<S>& p, const VecX<S>& x, const VecX<S>& h_prev) {
  detail::check_step_dims(p, x, h_prev, 3);
  VecX<S> gates;
  return detail::gru_step_full(p, x, h_prev, gates);
}

template <class S>
LstmState<S> lstm_step(const CellParams<S>& p, const VecX<S>& x, const LstmState<S>& state) {
  detail::check_step_dims(p, x, state.h, 4);
  if (state.c.size() != p.hidden()) throw std::invalid_argument("cell step: dimension mismatch");
  VecX<S> gates;
  return detail::lstm_step_full(p, x, state, gates);
}

// ---------------------------------------------------------------------------
// Forward pass with cached activations (the same path serves inference and
// training; caches are call-local so a const model is freely shared).
// ---------------------------------------------------------------------------

template <class S>
struct DirTrace {
  MatX<S> h;      // H x T
  MatX<S> c;      // H x T, LSTM only
  MatX<S> gates;  // (G*H) x T, activated
};

template <class S>
struct LayerTrace {
  MatX<S> input;  // D_in x T, what the layer consumed (post-dropout below)
  DirTrace<S> fwd, bwd;
  MatX<S> output;  // dirH x T, pre-dropout
  MatX<S> mask;    // dropout mask (empty when no dropout was applied)
};

template <class S>
struct ForwardTrace {
  std::vector<int> cols;  // embedding column per position, -1 for OOV
  MatX<S> embedded;       // d x T
  std::vector<LayerTrace<S>> layers;
  MatX<S> features;  // F x T (per_token) or F x 1 (final_state), post-dropout
  MatX<S> logits;    // k x T or k x 1
  MatX<S> probs;
};

namespace detail {

// Runs one direction over the layer input. `reverse` scans right-to-left;
// trace columns stay aligned with sequence positions either way.
template <class S>
void run_direction(const LayerSpec& spec, const CellParams<S>& p, const MatX<S>& input,
                   bool reverse, DirTrace<S>& trace) {
  const int H = spec.hidden;
  const Eigen::Index T = input.cols();
  const int G = gate_count(spec.cell);
  trace.h.setZero(H, T);
  trace.gates.setZero(G * H, T);
  if (spec.cell == CellKind::lstm) trace.c.setZero(H, T);
  VecX<S> h = VecX<S>::Zero(H);
  VecX<S> c = VecX<S>::Zero(H);
  VecX<S> gates;
  for (Eigen::Index s = 0; s < T; ++s) {
    const Eigen::Index t = reverse ? T - 1 - s : s;
    const VecX<S> x = input.col(t);
    if (spec.cell == CellKind::gru) {
      h = gru_step_full(p, x, h, gates);
    } else {
      LstmState<S> st{h, c};
      st = lstm_step_full(p, x, st, gates);
      h = st.h;
      c = st.c;
      trace.c.col(t) = c;
    }
    trace.h.col(t) = h;
    trace.gates.col(t) = gates;
  }
}

}  // namespace detail

// dropout_rng enables inverted dropout on every recurrent layer's output
// sequence; dropout_override >= 0 replaces each layer's configured ratio.
template <class S>
ForwardTrace<S> forward_trace(const SequenceModel<S>& m, const std::vector<std::string>& tokens,
                              std::mt19937_64* dropout_rng = nullptr,
                              double dropout_override = -1.0) {
  if (tokens.empty()) throw std::invalid_argument("forward: empty input");
  ForwardTrace<S> trace;
  trace.cols.resize(tokens.size());
  for (std::size_t t = 0; t < tokens.size(); ++t) trace.cols[t] = m.embedding.lookup_col(tokens[t]);
  trace.embedded = embed(m.embedding, tokens);

  const Eigen::Index T = trace.embedded.cols();
  trace.layers.resize(m.depth());
  MatX<S> below = trace.embedded;
  for (int l = 0; l < m.depth(); ++l) {
    LayerTrace<S>& lt = trace.layers[l];
    const LayerSpec& spec = m.specs[l];
    lt.input = below;
    detail::run_direction(spec, m.layers[l].fwd, lt.input, false, lt.fwd);
    if (spec.bidirectional) {
      detail::run_direction(spec, m.layers[l].bwd, lt.input, true, lt.bwd);
      lt.output.resize(2 * spec.hidden, T);
      lt.output.topRows(spec.hidden) = lt.fwd.h;
      lt.output.bottomRows(spec.hidden) = lt.bwd.h;
    } else {
      lt.output = lt.fwd.h;
    }
    below = lt.output;
    const double ratio = dropout_override >= 0.0 ? dropout_override : spec.dropout;
    if (dropout_rng && ratio > 0.0) {
      const double keep = 1.0 - ratio;
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      lt.mask.resize(lt.output.rows(), T);
      for (Eigen::Index cidx = 0; cidx < lt.mask.cols(); ++cidx) {
        for (Eigen::Index ridx = 0; ridx < lt.mask.rows(); ++ridx) {
          lt.mask(ridx, cidx) = uni(*dropout_rng) < keep ? static_cast<S>(1.0 / keep) : S(0);
        }
      }
      below = below.cwiseProduct(lt.mask);
    }
  }

  if (m.mode == OutputMode::per_token) {
    trace.features = below;
  } else {
    const LayerSpec& last = m.specs.back();
    trace.features.resize(m.feature_dim(), 1);
    if (last.bidirectional) {
      // Last forward state and the backward pass's own final state (position 0).
      trace.features.col(0).head(last.hidden) = below.col(T - 1).head(last.hidden);
      trace.features.col(0).tail(last.hidden) = below.col(0).tail(last.hidden);
    } else {
      trace.features.col(0) = below.col(T - 1);
    }
  }
  trace.logits = (m.out_w * trace.features).colwise() + m.out_b;
  trace.probs = softmax_columns(trace.logits);
  return trace;
}

// Inference-mode forward: k x T probability columns (per_token) or a single
// k x 1 column (final_state). Every column is a distribution.
template <class S>
MatX<S> forward(const SequenceModel<S>& m, const std::vector<std::string>& tokens) {
  return forward_trace(m, tokens).probs;
}

// ---------------------------------------------------------------------------
// Gradients and backward pass (BPTT).
// ---------------------------------------------------------------------------

template <class S>
struct ModelGrads {
  std::vector<LayerParams<S>> layers;
  MatX<S> out_w;
  VecX<S> out_b;
  MatX<S> embedding;  // allocated only when the embedding is trainable

  static ModelGrads shaped_like(const SequenceModel<S>& m) {
    ModelGrads g;
    g.layers.resize(m.layers.size());
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
      auto shape = [](const CellParams<S>& p, CellParams<S>& out) {
        out.w_in.setZero(p.w_in.rows(), p.w_in.cols());
        out.w_rec.setZero(p.w_rec.rows(), p.w_rec.cols());
        out.bias.setZero(p.bias.size());
      };
      shape(m.layers[l].fwd, g.layers[l].fwd);
      if (m.specs[l].bidirectional) shape(m.layers[l].bwd, g.layers[l].bwd);
    }
    g.out_w.setZero(m.out_w.rows(), m.out_w.cols());
    g.out_b.setZero(m.out_b.size());
    if (m.embedding.trainable) g.embedding.setZero(m.embedding.matrix.rows(), m.embedding.matrix.cols());
    return g;
  }

  void set_zero() {
    for (auto& layer : layers) {
      for (auto* p : {&layer.fwd, &layer.bwd}) {
        p->w_in.setZero();
        p->w_rec.setZero();
        p->bias.setZero();
      }
    }
    out_w.setZero();
    out_b.setZero();
    embedding.setZero();
  }
};

namespace detail {

template <class S>
void backward_direction(const LayerSpec& spec, const CellParams<S>& p, const MatX<S>& input,
                        const DirTrace<S>& trace, const MatX<S>& d_h_out, bool reverse,
                        CellParams<S>& grads, MatX<S>& d_input) {
  const int H = spec.hidden;
  const Eigen::Index T = input.cols();
  VecX<S> carry_h = VecX<S>::Zero(H);  // dL/dh flowing from the next step
  VecX<S> carry_c = VecX<S>::Zero(H);  // dL/dc (LSTM)
  for (Eigen::Index s = T - 1; s >= 0; --s) {
    // Walk steps in reverse processing order.
    const Eigen::Index t = reverse ? T - 1 - s : s;
    const Eigen::Index t_prev = reverse ? t + 1 : t - 1;
    const bool has_prev = reverse ? (t + 1 < T) : (t > 0);
    const VecX<S> h_prev = has_prev ? VecX<S>(trace.h.col(t_prev)) : VecX<S>(VecX<S>::Zero(H));
    VecX<S> dh = carry_h + d_h_out.col(t);

    if (spec.cell == CellKind::gru) {
      const VecX<S> z = trace.gates.col(t).head(H);
      const VecX<S> r = trace.gates.col(t).segment(H, H);
      const VecX<S> c = trace.gates.col(t).tail(H);
      VecX<S> dz = dh.cwiseProduct(h_prev - c);
      VecX<S> dc = dh.cwiseProduct(VecX<S>::Ones(H) - z);
      VecX<S> da_c = dc.cwiseProduct((VecX<S>::Ones(H) - c.cwiseProduct(c)));
      VecX<S> dh_prev = dh.cwiseProduct(z);
      VecX<S> drh = p.w_rec.bottomRows(H).transpose() * da_c;
      VecX<S> dr = drh.cwiseProduct(h_prev);
      dh_prev += drh.cwiseProduct(r);
      VecX<S> da_z = dz.cwiseProduct(z.cwiseProduct(VecX<S>::Ones(H) - z));
      VecX<S> da_r = dr.cwiseProduct(r.cwiseProduct(VecX<S>::Ones(H) - r));
      dh_prev += p.w_rec.topRows(H).transpose() * da_z;
      dh_prev += p.w_rec.middleRows(H, H).transpose() * da_r;
      VecX<S> da(3 * H);
      da << da_z, da_r, da_c;
      const VecX<S> rh = r.cwiseProduct(h_prev);
      grads.w_in += da * input.col(t).transpose();
      grads.bias += da;
      grads.w_rec.topRows(H) += da_z * h_prev.transpose();
      grads.w_rec.middleRows(H, H) += da_r * h_prev.transpose();
      grads.w_rec.bottomRows(H) += da_c * rh.transpose();
      d_input.col(t) += p.w_in.transpose() * da;
      carry_h = dh_prev;
    } else {
      const VecX<S> i = trace.gates.col(t).head(H);
      const VecX<S> f = trace.gates.col(t).segment(H, H);
      const VecX<S> o = trace.gates.col(t).segment(2 * H, H);
      const VecX<S> g = trace.gates.col(t).tail(H);
      const VecX<S> c_prev = has_prev ? VecX<S>(trace.c.col(t_prev)) : VecX<S>(VecX<S>::Zero(H));
      const VecX<S> tc = tanh_vec<S>(VecX<S>(trace.c.col(t)));
      VecX<S> d_o = dh.cwiseProduct(tc);
      VecX<S> dc = carry_c + dh.cwiseProduct(o).cwiseProduct(VecX<S>::Ones(H) - tc.cwiseProduct(tc));
      VecX<S> di = dc.cwiseProduct(g);
      VecX<S> dg = dc.cwiseProduct(i);
      VecX<S> df = dc.cwiseProduct(c_prev);
      VecX<S> da(4 * H);
      da.head(H) = di.cwiseProduct(i.cwiseProduct(VecX<S>::Ones(H) - i));
      da.segment(H, H) = df.cwiseProduct(f.cwiseProduct(VecX<S>::Ones(H) - f));
      da.segment(2 * H, H) = d_o.cwiseProduct(o.cwiseProduct(VecX<S>::Ones(H) - o));
      da.tail(H) = dg.cwiseProduct(VecX<S>::Ones(H) - g.cwiseProduct(g));
      grads.w_in += da * input.col(t).transpose();
      grads.w_rec += da * h_prev.transpose();
      grads.bias += da;
      d_input.col(t) += p.w_in.transpose() * da;
      carry_h = p.w_rec.transpose() * da;
      carry_c = dc.cwiseProduct(f);
    }
  }
}

}  // namespace detail

// Backpropagates dL/dlogits through the head, all recurrent layers, and into
// the embedding (when trainable), accumulating into `grads`.
template <class S>
void backward(const SequenceModel<S>& m, const ForwardTrace<S>& trace, const MatX<S>& d_logits,
              ModelGrads<S>& grads) {
  const Eigen::Index T = trace.embedded.cols();
  grads.out_w += d_logits * trace.features.transpose();
  grads.out_b += d_logits.rowwise().sum();

  MatX<S> d_out;  // gradient w.r.t. the top layer's post-dropout output
  if (m.mode == OutputMode::per_token) {
    d_out = m.out_w.transpose() * d_logits;
  } else {
    const LayerSpec& last = m.specs.back();
    VecX<S> d_feat = m.out_w.transpose() * d_logits.col(0);
    d_out.setZero(m.feature_dim(), T);
    if (last.bidirectional) {
      d_out.col(T - 1).head(last.hidden) = d_feat.head(last.hidden);
      d_out.col(0).tail(last.hidden) = d_feat.tail(last.hidden);
    } else {
      d_out.col(T - 1) = d_feat;
    }
  }

  for (int l = m.depth() - 1; l >= 0; --l) {
    const LayerTrace<S>& lt = trace.layers[l];
    const LayerSpec& spec = m.specs[l];
    if (lt.mask.size() > 0) d_out = d_out.cwiseProduct(lt.mask);
    MatX<S> d_input = MatX<S>::Zero(lt.input.rows(), T);
    if (spec.bidirectional) {
      detail::backward_direction(spec, m.layers[l].fwd, lt.input, lt.fwd,
                                 MatX<S>(d_out.topRows(spec.hidden)), false, grads.layers[l].fwd,
                                 d_input);
      detail::backward_direction(spec, m.layers[l].bwd, lt.input, lt.bwd,
                                 MatX<S>(d_out.bottomRows(spec.hidden)), true, grads.layers[l].bwd,
                                 d_input);
    } else {
      detail::backward_direction(spec, m.layers[l].fwd, lt.input, lt.fwd, d_out, false,
                                 grads.layers[l].fwd, d_input);
    }
    d_out = std::move(d_input);
  }

  if (m.embedding.trainable) {
    for (Eigen::Index t = 0; t < T; ++t) {
      const int col = trace.cols[t];
      if (col >= 0) grads.embedding.col(col) += d_out.col(t);  // OOV columns are not parameters
    }
  }
}

// ---------------------------------------------------------------------------
// Parameter registry: named flat views over every tensor, in the documented
// serialization order. `trainable_views` is the same list but with the
// embedding included only when it is trainable.
// ---------------------------------------------------------------------------

template <class S>
struct TensorView {
  std::string name;
  S* data = nullptr;
  Eigen::Index rows = 0, cols = 0;
  Eigen::Index size() const { return rows * cols; }
};

namespace detail {

template <class S>
void push_layer_views(std::vector<TensorView<S>>& out, std::vector<LayerParams<S>>& layers,
                      const std::vector<LayerSpec>& specs) {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto push_dir = [&](CellParams<S>& p, const std::string& dir) {
      const std::string base = "layer" + std::to_string(l) + "." + dir + ".";
      out.push_back({base + "w_in", p.w_in.data(), p.w_in.rows(), p.w_in.cols()});
      out.push_back({base + "w_rec", p.w_rec.data(), p.w_rec.rows(), p.w_rec.cols()});
      out.push_back({base + "bias", p.bias.data(), p.bias.size(), 1});
    };
    push_dir(layers[l].fwd, "fwd");
    if (specs[l].bidirectional) push_dir(layers[l].bwd, "bwd");
  }
}

}  // namespace detail

template <class S>
std::vector<TensorView<S>> all_param_views(SequenceModel<S>& m) {
  std::vector<TensorView<S>> out;
  out.push_back({"embedding", m.embedding.matrix.data(), m.embedding.matrix.rows(),
                 m.embedding.matrix.cols()});
  detail::push_layer_views(out, m.layers, m.specs);
  out.push_back({"out.w", m.out_w.data(), m.out_w.rows(), m.out_w.cols()});
  out.push_back({"out.b", m.out_b.data(), m.out_b.size(), 1});
  return out;
}

template <class S>
std::vector<TensorView<S>> trainable_views(SequenceModel<S>& m) {
  auto views = all_param_views(m);
  if (!m.embedding.trainable) views.erase(views.begin());
  return views;
}

template <class S>
std::vector<TensorView<S>> grad_views(ModelGrads<S>& g, const SequenceModel<S>& m) {
  std::vector<TensorView<S>> out;
  if (m.embedding.trainable) {
    out.push_back({"embedding", g.embedding.data(), g.embedding.rows(), g.embedding.cols()});
  }
  detail::push_layer_views(out, g.layers, m.specs);
  out.push_back({"out.w", g.out_w.data(), g.out_w.rows(), g.out_w.cols()});
  out.push_back({"out.b", g.out_b.data(), g.out_b.size(), 1});
  return out;
}

// ---------------------------------------------------------------------------
// Construction.
// ---------------------------------------------------------------------------

template <class S>
void init_params(SequenceModel<S>& m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto fill = [&rng](MatX<S>& mat, double fan_in) {
    const double r = 1.0 / std::sqrt(std::max(1.0, fan_in));
    std::uniform_real_distribution<double> uni(-r, r);
    for (Eigen::Index c = 0; c < mat.cols(); ++c) {
      for (Eigen::Index i = 0; i < mat.rows(); ++i) mat(i, c) = static_cast<S>(uni(rng));
    }
  };
  for (int l = 0; l < m.depth(); ++l) {
    const LayerSpec& spec = m.specs[l];
    const int G = gate_count(spec.cell);
    const int H = spec.hidden;
    const int D = m.layer_input_dim(l);
    auto init_dir = [&](CellParams<S>& p) {
      p.w_in.resize(G * H, D);
      p.w_rec.resize(G * H, H);
      p.bias.resize(G * H);
      fill(p.w_in, D);
      fill(p.w_rec, H);
      MatX<S> b(G * H, 1);
      fill(b, H);
      p.bias = b.col(0);
    };
    init_dir(m.layers[l].fwd);
    if (spec.bidirectional) init_dir(m.layers[l].bwd);
  }
  fill(m.out_w, m.feature_dim());
  MatX<S> b(m.out_w.rows(), 1);
  fill(b, m.feature_dim());
  m.out_b = b.col(0);
}

template <class S>
SequenceModel<S> make_model(EmbeddingTable<S> embedding, std::vector<LayerSpec> specs,
                            OutputMode mode, int output_dim, std::uint64_t seed) {
  if (specs.empty() || specs.size() > 3) {
    throw std::invalid_argument("make_model: depth must be between 1 and 3");
  }
  for (const auto& spec : specs) {
    if (spec.hidden <= 0) throw std::invalid_argument("make_model: hidden size must be positive");
    if (spec.dropout < 0.0 || spec.dropout > 0.5) {
      throw std::invalid_argument("make_model: dropout ratio outside [0, 0.5]");
    }
  }
  if (output_dim < 2) throw std::invalid_argument("make_model: output dimension must be >= 2");
  SequenceModel<S> m;
  m.embedding = std::move(embedding);
  m.specs = std::move(specs);
  m.layers.resize(m.specs.size());
  m.mode = mode;
  const LayerSpec& last = m.specs.back();
  m.out_w.resize(output_dim, last.hidden * (last.bidirectional ? 2 : 1));
  m.out_b.resize(output_dim);
  init_params(m, seed);
  return m;
}

}  // namespace foqa::nn

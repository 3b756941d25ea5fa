#pragma once

// Reference implementations used only by tests: straight-line scalar code,
// kept deliberately independent of the library's vectorized/indexed paths.

#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "foqa/entity_index.hpp"
#include "foqa/kb.hpp"
#include "foqa/nn/model.hpp"
#include "foqa/text.hpp"

namespace oracle {

// ---------------------------------------------------------------------------
// Linear-scan TF-IDF lookup over all aliases.
// ---------------------------------------------------------------------------

inline std::vector<std::string> grams_of(const std::vector<std::string>& tokens, int n) {
  std::vector<std::string> grams;
  for (int i = 0; i + n <= static_cast<int>(tokens.size()); ++i) {
    std::string g = tokens[i];
    for (int j = 1; j < n; ++j) g += " " + tokens[i + j];
    grams.push_back(g);
  }
  return grams;
}

inline std::size_t occurrences(const std::vector<std::string>& alias, const foqa::NGramKey& key) {
  if (key.is_exact()) {
    std::string joined;
    for (std::size_t i = 0; i < alias.size(); ++i) joined += (i ? " " : "") + alias[i];
    return joined == key.text ? 1 : 0;
  }
  std::size_t count = 0;
  for (const std::string& g : grams_of(alias, key.n)) {
    if (g == key.text) ++count;
  }
  return count;
}

inline std::map<foqa::EntityIdx, double> lookup_linear(const foqa::KnowledgeBase& kb,
                                                       const foqa::NGramKey& key) {
  std::size_t alias_count = 0;
  for (foqa::EntityIdx e = 0; e < static_cast<foqa::EntityIdx>(kb.num_entities()); ++e) {
    if (!foqa::tokenize(kb.alias(e)).empty()) ++alias_count;
  }
  std::size_t df = 0;
  for (foqa::EntityIdx e = 0; e < static_cast<foqa::EntityIdx>(kb.num_entities()); ++e) {
    if (occurrences(foqa::tokenize(kb.alias(e)), key) > 0) ++df;
  }
  std::map<foqa::EntityIdx, double> scores;
  if (df == 0) return scores;
  const double idf = std::log(1.0 + static_cast<double>(alias_count) / static_cast<double>(df));
  for (foqa::EntityIdx e = 0; e < static_cast<foqa::EntityIdx>(kb.num_entities()); ++e) {
    const auto alias = foqa::tokenize(kb.alias(e));
    const std::size_t occ = occurrences(alias, key);
    if (occ == 0) continue;
    double tf = 1.0;
    if (!key.is_exact()) {
      tf = static_cast<double>(occ) / static_cast<double>(alias.size() + 1 - key.n);
    }
    scores[e] = tf * idf;
  }
  return scores;
}

// The decreasing-n linking loop on top of the linear scan.
struct LinearLinkResult {
  std::map<foqa::EntityIdx, double> best;  // node -> max score
  std::vector<int> passes;                 // executed n values (0 = exact)
};

inline LinearLinkResult link_linear(const foqa::KnowledgeBase& kb, const std::string& text) {
  const auto tokens = foqa::tokenize(text);
  LinearLinkResult result;
  for (int n : {0, 3, 2, 1}) {
    result.passes.push_back(n);
    std::vector<foqa::NGramKey> keys;
    if (n == 0) {
      std::string joined;
      for (std::size_t i = 0; i < tokens.size(); ++i) joined += (i ? " " : "") + tokens[i];
      keys.push_back(foqa::NGramKey::exact(joined));
    } else {
      for (const std::string& g : grams_of(tokens, n)) {
        keys.push_back(foqa::NGramKey::gram(static_cast<std::uint8_t>(n), g));
      }
    }
    for (const auto& key : keys) {
      for (const auto& [node, score] : lookup_linear(kb, key)) {
        auto it = result.best.find(node);
        if (it == result.best.end() || score > it->second) result.best[node] = score;
      }
    }
    if (!result.best.empty() && n != 0 && n <= static_cast<int>(tokens.size())) break;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Scalar-loop forward pass for SequenceModel, written without Eigen ops.
// ---------------------------------------------------------------------------

using Vec = std::vector<double>;
using Seq = std::vector<Vec>;  // one vector per position

inline double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

template <class S>
Vec matvec(const foqa::nn::MatX<S>& m, const Vec& v, int row_begin, int rows) {
  Vec out(rows, 0.0);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < static_cast<int>(v.size()); ++j) {
      out[i] += static_cast<double>(m(row_begin + i, j)) * v[j];
    }
  }
  return out;
}

template <class S>
Seq run_direction_scalar(const foqa::nn::LayerSpec& spec, const foqa::nn::CellParams<S>& p,
                         const Seq& input, bool reverse) {
  const int H = spec.hidden;
  const int T = static_cast<int>(input.size());
  Seq states(T);
  Vec h(H, 0.0), c(H, 0.0);
  for (int s = 0; s < T; ++s) {
    const int t = reverse ? T - 1 - s : s;
    const Vec& x = input[t];
    if (spec.cell == foqa::nn::CellKind::gru) {
      Vec wz = matvec(p.w_in, x, 0, H), wr = matvec(p.w_in, x, H, H), wc = matvec(p.w_in, x, 2 * H, H);
      Vec uz = matvec(p.w_rec, h, 0, H), ur = matvec(p.w_rec, h, H, H);
      Vec z(H), r(H);
      for (int i = 0; i < H; ++i) z[i] = sig(wz[i] + uz[i] + static_cast<double>(p.bias[i]));
      for (int i = 0; i < H; ++i) r[i] = sig(wr[i] + ur[i] + static_cast<double>(p.bias[H + i]));
      Vec rh(H);
      for (int i = 0; i < H; ++i) rh[i] = r[i] * h[i];
      Vec uc = matvec(p.w_rec, rh, 2 * H, H);
      Vec cand(H);
      for (int i = 0; i < H; ++i) {
        cand[i] = std::tanh(wc[i] + uc[i] + static_cast<double>(p.bias[2 * H + i]));
      }
      for (int i = 0; i < H; ++i) h[i] = z[i] * h[i] + (1.0 - z[i]) * cand[i];
    } else {
      Vec wi = matvec(p.w_in, x, 0, H), wf = matvec(p.w_in, x, H, H), wo = matvec(p.w_in, x, 2 * H, H),
          wg = matvec(p.w_in, x, 3 * H, H);
      Vec ui = matvec(p.w_rec, h, 0, H), uf = matvec(p.w_rec, h, H, H), uo = matvec(p.w_rec, h, 2 * H, H),
          ug = matvec(p.w_rec, h, 3 * H, H);
      for (int i = 0; i < H; ++i) {
        const double gi = sig(wi[i] + ui[i] + static_cast<double>(p.bias[i]));
        const double gf = sig(wf[i] + uf[i] + static_cast<double>(p.bias[H + i]));
        const double go = sig(wo[i] + uo[i] + static_cast<double>(p.bias[2 * H + i]));
        const double gg = std::tanh(wg[i] + ug[i] + static_cast<double>(p.bias[3 * H + i]));
        c[i] = gf * c[i] + gi * gg;
        h[i] = go * std::tanh(c[i]);
      }
    }
    states[t] = h;
  }
  return states;
}

// Per-position (per_token) or single (final_state) probability rows.
template <class S>
Seq forward_scalar(const foqa::nn::SequenceModel<S>& m, const std::vector<std::string>& tokens) {
  const int T = static_cast<int>(tokens.size());
  Seq below(T);
  for (int t = 0; t < T; ++t) {
    auto v = m.embedding.vector_for(tokens[t]);
    below[t].resize(v.size());
    for (int i = 0; i < v.size(); ++i) below[t][i] = static_cast<double>(v[i]);
  }
  for (int l = 0; l < m.depth(); ++l) {
    const auto& spec = m.specs[l];
    Seq fwd = run_direction_scalar(spec, m.layers[l].fwd, below, false);
    if (spec.bidirectional) {
      Seq bwd = run_direction_scalar(spec, m.layers[l].bwd, below, true);
      for (int t = 0; t < T; ++t) {
        fwd[t].insert(fwd[t].end(), bwd[t].begin(), bwd[t].end());
      }
    }
    below = std::move(fwd);
  }

  Seq feature_rows;
  if (m.mode == foqa::nn::OutputMode::per_token) {
    feature_rows = below;
  } else {
    const auto& last = m.specs.back();
    Vec feat;
    if (last.bidirectional) {
      feat.assign(below[T - 1].begin(), below[T - 1].begin() + last.hidden);
      feat.insert(feat.end(), below[0].begin() + last.hidden, below[0].end());
    } else {
      feat = below[T - 1];
    }
    feature_rows.push_back(feat);
  }

  Seq probs;
  for (const Vec& feat : feature_rows) {
    const int k = static_cast<int>(m.out_w.rows());
    Vec logits(k, 0.0);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < static_cast<int>(feat.size()); ++j) {
        logits[i] += static_cast<double>(m.out_w(i, j)) * feat[j];
      }
      logits[i] += static_cast<double>(m.out_b[i]);
    }
    double mx = logits[0];
    for (double v : logits) mx = std::max(mx, v);
    double sum = 0.0;
    Vec p(k);
    for (int i = 0; i < k; ++i) {
      p[i] = std::exp(logits[i] - mx);
      sum += p[i];
    }
    for (int i = 0; i < k; ++i) p[i] /= sum;
    probs.push_back(p);
  }
  return probs;
}

// ---------------------------------------------------------------------------
// Random KB fixtures.
// ---------------------------------------------------------------------------

inline foqa::KnowledgeBase random_kb(std::mt19937_64& rng, int num_entities, int num_relations) {
  const std::vector<std::string> pool = {"alpha", "bravo",  "citro",  "delta", "echo",  "fondu",
                                         "gamma", "hotel",  "india",  "jolt",  "kilo",  "lima",
                                         "mango", "nectar", "omega",  "pico",  "quark", "rho"};
  std::ostringstream facts, aliases;
  std::uniform_int_distribution<int> len(1, 4), tok(0, static_cast<int>(pool.size()) - 1);
  std::uniform_int_distribution<int> rel(0, num_relations - 1), obj(0, 9999);
  for (int e = 0; e < num_entities; ++e) {
    const std::string id = "e" + std::to_string(1000 + e);
    std::string alias;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) alias += (i ? " " : "") + pool[tok(rng)];
    aliases << id << '\t' << alias << '\n';
    const int facts_count = 1 + rel(rng) % 3;
    for (int f = 0; f < facts_count; ++f) {
      facts << id << "\trel" << rel(rng) << "\tval" << obj(rng) << '\n';
    }
  }
  std::istringstream facts_in(facts.str()), aliases_in(aliases.str());
  return foqa::load_kb(facts_in, aliases_in);
}

}  // namespace oracle

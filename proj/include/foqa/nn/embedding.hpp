#pragma once

#include <istream>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "foqa/nn/core.hpp"
#include "foqa/text.hpp"

namespace foqa::nn {

// Token -> d-dimensional vector table. The matrix stores one column per
// vocabulary token. The pad column is all-zero and stays that way; words
// outside the vocabulary resolve to a vector derived deterministically from
// the word's hash and `oov_seed`, so OOV lookups are stable across runs.
template <class S>
struct EmbeddingTable {
  std::vector<std::string> tokens;
  std::unordered_map<std::string, int> col_of;
  MatX<S> matrix;  // d x |tokens|
  std::string pad_token = "<pad>";
  int pad_col = 0;
  std::uint64_t oov_seed = 0;
  bool trainable = false;

  int dim() const { return static_cast<int>(matrix.rows()); }

  int lookup_col(const std::string& tok) const {
    auto it = col_of.find(tok);
    return it == col_of.end() ? -1 : it->second;
  }

  VecX<S> oov_vector(const std::string& tok) const {
    std::mt19937_64 rng(fnv1a64(tok) ^ oov_seed);
    std::uniform_real_distribution<double> uni(-0.1, 0.1);
    VecX<S> v(dim());
    for (int i = 0; i < dim(); ++i) v[i] = static_cast<S>(uni(rng));
    return v;
  }

  VecX<S> vector_for(const std::string& tok) const {
    int col = lookup_col(tok);
    if (col >= 0) return matrix.col(col);
    return oov_vector(tok);
  }
};

// Vocabulary plus a reserved pad token; non-pad columns uniform in
// [-1/sqrt(d), 1/sqrt(d)], pad column zero.
template <class S>
EmbeddingTable<S> make_embedding(const std::vector<std::string>& vocab, int d, std::uint64_t seed,
                                 bool trainable, const std::string& pad_token = "<pad>") {
  if (d <= 0) throw std::invalid_argument("make_embedding: dimension must be positive");
  EmbeddingTable<S> tbl;
  tbl.pad_token = pad_token;
  tbl.oov_seed = seed;
  tbl.trainable = trainable;
  tbl.tokens.push_back(pad_token);
  for (const auto& tok : vocab) {
    if (tok != pad_token && !tbl.col_of.count(tok) && !tok.empty()) {
      tbl.col_of.emplace(tok, static_cast<int>(tbl.tokens.size()));
      tbl.tokens.push_back(tok);
    }
  }
  tbl.pad_col = 0;
  tbl.col_of[pad_token] = 0;
  tbl.matrix.setZero(d, static_cast<Eigen::Index>(tbl.tokens.size()));
  std::mt19937_64 rng(seed);
  const double r = 1.0 / std::sqrt(static_cast<double>(d));
  std::uniform_real_distribution<double> uni(-r, r);
  for (Eigen::Index c = 1; c < tbl.matrix.cols(); ++c) {
    for (Eigen::Index i = 0; i < d; ++i) tbl.matrix(i, c) = static_cast<S>(uni(rng));
  }
  return tbl;
}

// One column per input token: table column, zero pad column, or the stable
// OOV vector.
template <class S>
MatX<S> embed(const EmbeddingTable<S>& tbl, const std::vector<std::string>& tokens) {
  if (tokens.empty()) throw std::invalid_argument("embed: empty token sequence");
  MatX<S> out(tbl.dim(), static_cast<Eigen::Index>(tokens.size()));
  for (std::size_t t = 0; t < tokens.size(); ++t) out.col(t) = tbl.vector_for(tokens[t]);
  return out;
}

// word2vec text format: first line `vocabCount d`, then `word v1 ... vd`.
// A pad column is prepended if the file does not define the pad token.
template <class S>
EmbeddingTable<S> load_word2vec_text(std::istream& in, std::uint64_t oov_seed = 0,
                                     const std::string& pad_token = "<pad>") {
  std::size_t vocab_count = 0;
  int d = 0;
  if (!(in >> vocab_count >> d) || d <= 0) {
    throw std::runtime_error("word2vec: malformed header line (want `vocabCount d`)");
  }
  EmbeddingTable<S> tbl;
  tbl.pad_token = pad_token;
  tbl.oov_seed = oov_seed;
  tbl.trainable = false;
  tbl.tokens.push_back(pad_token);
  tbl.col_of[pad_token] = 0;
  tbl.pad_col = 0;
  tbl.matrix.setZero(d, static_cast<Eigen::Index>(vocab_count) + 1);
  Eigen::Index col = 1;
  for (std::size_t i = 0; i < vocab_count; ++i) {
    std::string word;
    if (!(in >> word)) throw std::runtime_error("word2vec: truncated at entry " + std::to_string(i));
    if (word == pad_token) {
      for (int j = 0; j < d; ++j) {
        double v;
        if (!(in >> v)) throw std::runtime_error("word2vec: truncated vector for " + word);
      }
      continue;  // keep the reserved zero pad column
    }
    tbl.col_of[word] = static_cast<int>(col);
    tbl.tokens.push_back(word);
    for (int j = 0; j < d; ++j) {
      double v;
      if (!(in >> v)) throw std::runtime_error("word2vec: truncated vector for " + word);
      tbl.matrix(j, col) = static_cast<S>(v);
    }
    ++col;
  }
  tbl.matrix.conservativeResize(d, col);
  return tbl;
}

}  // namespace foqa::nn

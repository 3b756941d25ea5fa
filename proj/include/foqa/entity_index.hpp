#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "foqa/kb.hpp"

namespace foqa {

// n == 0 means the exact-text key (the paper's n = infinity); otherwise the
// key is an n-gram with n tokens.
struct NGramKey {
  std::uint8_t n = 0;
  std::string text;  // normalized, space-joined tokens

  static NGramKey exact(std::string t) { return {0, std::move(t)}; }
  static NGramKey gram(std::uint8_t n, std::string t) { return {n, std::move(t)}; }
  bool is_exact() const { return n == 0; }

  friend bool operator==(const NGramKey&, const NGramKey&) = default;
  friend bool operator<(const NGramKey& a, const NGramKey& b) {
    // Lexicographic over the serialized "<kind>\t<text>" form.
    return a.kind_label() != b.kind_label() ? a.kind_label() < b.kind_label() : a.text < b.text;
  }
  std::string kind_label() const { return is_exact() ? "exact" : std::string(1, char('0' + n)); }
};

struct NGramKeyHash {
  std::size_t operator()(const NGramKey& k) const;
};

struct Posting {
  EntityIdx node = -1;
  double score = 0.0;  // TF-IDF weight, > 0

  friend bool operator==(const Posting&, const Posting&) = default;
};

struct CorpusStats {
  std::size_t alias_count = 0;
  std::unordered_map<NGramKey, std::uint32_t, NGramKeyHash> doc_frequency;

  std::uint32_t df(const NGramKey& k) const {
    auto it = doc_frequency.find(k);
    return it == doc_frequency.end() ? 0 : it->second;
  }
};

// TF(g, alias) = occurrences of g among the alias's n-grams of size |g|,
// over the total count of that size (1 for the exact key).
// IDF(g) = ln(1 + aliasCount / df(g)). Throws if g does not occur in alias.
double tf_idf(const NGramKey& g, const std::vector<std::string>& alias_tokens,
              const CorpusStats& stats);
double idf(const NGramKey& g, const CorpusStats& stats);

// Inverted index over entity aliases: every alias contributes its unigrams,
// bigrams, trigrams and one exact key, each with a TF-IDF-scored posting.
// Immutable once built; lookups are lock-free reads.
class EntityIndex {
 public:
  static EntityIndex build(const KnowledgeBase& kb);

  // Postings for g, score-descending (ties by entity id). Empty if absent.
  const std::vector<Posting>& lookup(const NGramKey& g) const;

  const CorpusStats& stats() const { return stats_; }
  std::size_t key_count() const { return postings_.size(); }
  std::size_t skipped_empty_aliases() const { return skipped_empty_aliases_; }

  const std::vector<std::string>& entity_ids() const { return entity_ids_; }
  const std::string& entity_id(EntityIdx e) const { return entity_ids_.at(e); }

  // `FOQA-EIDX v1`: deterministic text dump, keys sorted lexicographically,
  // scores as decimal text with 12 significant digits.
  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static EntityIndex load(std::istream& in);
  static EntityIndex load_file(const std::string& path);

 private:
  std::unordered_map<NGramKey, std::vector<Posting>, NGramKeyHash> postings_;
  CorpusStats stats_;
  std::vector<std::string> entity_ids_;
  std::size_t skipped_empty_aliases_ = 0;
};

// All distinct n-gram keys of a token sequence for one size (n >= 1).
std::vector<NGramKey> ngram_keys(const std::vector<std::string>& tokens, std::uint8_t n);

}  // namespace foqa

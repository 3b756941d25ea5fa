#include "foqa/entity_index.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "foqa/text.hpp"

namespace foqa {

std::size_t NGramKeyHash::operator()(const NGramKey& k) const {
  return static_cast<std::size_t>(fnv1a64(k.text, 1469598103934665603ull ^ (k.n * 0x9e3779b9ull)));
}

std::vector<NGramKey> ngram_keys(const std::vector<std::string>& tokens, std::uint8_t n) {
  std::vector<NGramKey> keys;
  if (n == 0 || tokens.size() < n) return keys;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string text = tokens[i];
    for (std::size_t j = 1; j < n; ++j) {
      text.push_back(' ');
      text += tokens[i + j];
    }
    NGramKey key = NGramKey::gram(n, std::move(text));
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(std::move(key));
  }
  return keys;
}

namespace {

std::size_t count_occurrences(const std::vector<std::string>& tokens, const NGramKey& g) {
  if (g.is_exact()) return join_tokens(tokens) == g.text ? 1 : 0;
  if (tokens.size() < g.n) return 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i + g.n <= tokens.size(); ++i) {
    std::string text = tokens[i];
    for (std::size_t j = 1; j < g.n; ++j) {
      text.push_back(' ');
      text += tokens[i + j];
    }
    if (text == g.text) ++count;
  }
  return count;
}

}  // namespace

double idf(const NGramKey& g, const CorpusStats& stats) {
  std::uint32_t df = stats.df(g);
  if (df == 0) throw std::invalid_argument("idf: key '" + g.text + "' absent from corpus");
  return std::log(1.0 + static_cast<double>(stats.alias_count) / static_cast<double>(df));
}

double tf_idf(const NGramKey& g, const std::vector<std::string>& alias_tokens,
              const CorpusStats& stats) {
  std::size_t occurrences = count_occurrences(alias_tokens, g);
  if (occurrences == 0) {
    throw std::invalid_argument("tf_idf: key '" + g.text + "' does not occur in alias '" +
                                join_tokens(alias_tokens) + "'");
  }
  double tf;
  if (g.is_exact()) {
    tf = 1.0;
  } else {
    std::size_t total = alias_tokens.size() + 1 - g.n;  // n-grams of size n, with multiplicity
    tf = static_cast<double>(occurrences) / static_cast<double>(total);
  }
  return tf * idf(g, stats);
}

EntityIndex EntityIndex::build(const KnowledgeBase& kb) {
  if (kb.num_entities() == 0) throw std::invalid_argument("build_entity_index: empty KB");
  EntityIndex idx;
  idx.entity_ids_ = kb.entity_ids();

  std::vector<std::vector<std::string>> alias_tokens(kb.num_entities());
  for (EntityIdx e = 0; e < static_cast<EntityIdx>(kb.num_entities()); ++e) {
    alias_tokens[e] = tokenize(kb.alias(e));
    if (alias_tokens[e].empty()) ++idx.skipped_empty_aliases_;
  }
  idx.stats_.alias_count = kb.num_entities() - idx.skipped_empty_aliases_;

  // Pass 1: document frequencies (aliases containing each key).
  auto keys_of_alias = [](const std::vector<std::string>& tokens) {
    std::vector<NGramKey> keys;
    for (std::uint8_t n = 1; n <= 3; ++n) {
      auto grams = ngram_keys(tokens, n);
      keys.insert(keys.end(), grams.begin(), grams.end());
    }
    keys.push_back(NGramKey::exact(join_tokens(tokens)));
    return keys;
  };
  for (EntityIdx e = 0; e < static_cast<EntityIdx>(kb.num_entities()); ++e) {
    if (alias_tokens[e].empty()) continue;
    for (auto& key : keys_of_alias(alias_tokens[e])) ++idx.stats_.doc_frequency[key];
  }

  // Pass 2: scored postings, one per (key, entity).
  for (EntityIdx e = 0; e < static_cast<EntityIdx>(kb.num_entities()); ++e) {
    if (alias_tokens[e].empty()) continue;
    for (auto& key : keys_of_alias(alias_tokens[e])) {
      double score = tf_idf(key, alias_tokens[e], idx.stats_);
      idx.postings_[std::move(key)].push_back(Posting{e, score});
    }
  }
  for (auto& [key, list] : idx.postings_) {
    std::sort(list.begin(), list.end(), [](const Posting& a, const Posting& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.node < b.node;
    });
  }
  return idx;
}

const std::vector<Posting>& EntityIndex::lookup(const NGramKey& g) const {
  static const std::vector<Posting> empty;
  auto it = postings_.find(g);
  return it == postings_.end() ? empty : it->second;
}

namespace {

std::string format_score(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

void EntityIndex::save(std::ostream& out) const {
  out << "FOQA-EIDX v1\n";
  out << "entities " << entity_ids_.size() << "\n";
  for (const auto& id : entity_ids_) out << id << "\n";
  out << "aliases " << stats_.alias_count << "\n";
  out << "skipped " << skipped_empty_aliases_ << "\n";
  out << "keys " << postings_.size() << "\n";
  std::map<NGramKey, const std::vector<Posting>*> ordered;
  for (const auto& [key, list] : postings_) ordered.emplace(key, &list);
  for (const auto& [key, list] : ordered) {
    out << key.kind_label() << '\t' << key.text << '\t' << stats_.df(key) << '\t' << list->size();
    for (const Posting& p : *list) out << '\t' << p.node << ':' << format_score(p.score);
    out << "\n";
  }
}

void EntityIndex::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw parse_error("cannot write entity index: " + path);
  save(out);
}

namespace {

void expect_header(std::istream& in, const std::string& want, const std::string& what) {
  std::string line;
  if (!std::getline(in, line) || line != want) {
    throw parse_error(what + ": version mismatch, expected '" + want + "', got '" + line + "'");
  }
}

std::size_t read_count(std::istream& in, const std::string& label, const std::string& what) {
  std::string word;
  std::size_t n = 0;
  if (!(in >> word >> n) || word != label) throw parse_error(what + ": malformed '" + label + "' line");
  in.ignore();  // newline
  return n;
}

}  // namespace

EntityIndex EntityIndex::load(std::istream& in) {
  expect_header(in, "FOQA-EIDX v1", "entity index");
  EntityIndex idx;
  std::size_t num_entities = read_count(in, "entities", "entity index");
  idx.entity_ids_.resize(num_entities);
  for (auto& id : idx.entity_ids_) {
    if (!std::getline(in, id)) throw parse_error("entity index: truncated entity table");
  }
  idx.stats_.alias_count = read_count(in, "aliases", "entity index");
  idx.skipped_empty_aliases_ = read_count(in, "skipped", "entity index");
  std::size_t num_keys = read_count(in, "keys", "entity index");
  std::string line;
  for (std::size_t i = 0; i < num_keys; ++i) {
    if (!std::getline(in, line)) throw parse_error("entity index: truncated key section");
    std::istringstream ls(line);
    std::string kind, text, field;
    if (!std::getline(ls, kind, '\t') || !std::getline(ls, text, '\t')) {
      throw parse_error("entity index: malformed key line: " + line);
    }
    NGramKey key = kind == "exact" ? NGramKey::exact(text)
                                   : NGramKey::gram(static_cast<std::uint8_t>(kind[0] - '0'), text);
    if (!std::getline(ls, field, '\t')) throw parse_error("entity index: malformed key line: " + line);
    idx.stats_.doc_frequency[key] = static_cast<std::uint32_t>(std::stoul(field));
    if (!std::getline(ls, field, '\t')) throw parse_error("entity index: malformed key line: " + line);
    std::size_t count = std::stoul(field);
    std::vector<Posting> list;
    list.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
      if (!std::getline(ls, field, '\t')) throw parse_error("entity index: truncated postings: " + line);
      std::size_t colon = field.rfind(':');
      if (colon == std::string::npos) throw parse_error("entity index: malformed posting: " + field);
      list.push_back(Posting{static_cast<EntityIdx>(std::stol(field.substr(0, colon))),
                             std::stod(field.substr(colon + 1))});
    }
    idx.postings_.emplace(std::move(key), std::move(list));
  }
  return idx;
}

EntityIndex EntityIndex::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot open entity index: " + path);
  return load(in);
}

}  // namespace foqa

#include "foqa/kb.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "foqa/text.hpp"

namespace foqa {

namespace {

struct RawFact {
  std::string subject, relation, object;
  bool object_is_ref = false;
};

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

bool skippable(const std::string& line) {
  if (line.empty()) return true;
  return line[0] == '#';
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

KnowledgeBase load_kb(std::istream& facts_source, std::istream& aliases_source) {
  std::vector<RawFact> raw_facts;
  std::set<std::string> entity_universe;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(facts_source, line)) {
    ++line_no;
    line = strip_cr(line);
    if (skippable(line)) continue;
    auto fields = split_tabs(line);
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() || fields[2].empty()) {
      throw parse_error("facts line " + std::to_string(line_no) +
                        ": expected subject<TAB>relation<TAB>object");
    }
    RawFact f{fields[0], fields[1], fields[2], false};
    if (f.object.size() > 1 && f.object[0] == '@') {
      f.object_is_ref = true;
      f.object = f.object.substr(1);
    }
    entity_universe.insert(f.subject);
    if (f.object_is_ref) entity_universe.insert(f.object);
    raw_facts.push_back(std::move(f));
  }
  if (raw_facts.empty()) throw parse_error("facts: empty source");

  std::unordered_map<std::string, std::string> alias_by_id;
  line_no = 0;
  std::size_t alias_lines = 0;
  while (std::getline(aliases_source, line)) {
    ++line_no;
    line = strip_cr(line);
    if (skippable(line)) continue;
    auto fields = split_tabs(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw parse_error("aliases line " + std::to_string(line_no) +
                        ": expected entity_id<TAB>alias text");
    }
    if (!entity_universe.count(fields[0])) {
      throw parse_error("aliases line " + std::to_string(line_no) + ": alias for unknown entity '" +
                        fields[0] + "'");
    }
    alias_by_id.emplace(fields[0], fields[1]);  // first alias wins
    ++alias_lines;
  }
  if (alias_lines == 0) throw parse_error("aliases: empty source");

  KnowledgeBase kb;
  kb.entity_ids_.assign(entity_universe.begin(), entity_universe.end());
  for (EntityIdx e = 0; e < static_cast<EntityIdx>(kb.entity_ids_.size()); ++e) {
    kb.entity_of_id_.emplace(kb.entity_ids_[e], e);
  }
  kb.alias_raw_.resize(kb.entity_ids_.size());
  kb.alias_norm_.resize(kb.entity_ids_.size());
  for (std::size_t e = 0; e < kb.entity_ids_.size(); ++e) {
    auto it = alias_by_id.find(kb.entity_ids_[e]);
    if (it != alias_by_id.end()) {
      kb.alias_raw_[e] = it->second;
      kb.alias_norm_[e] = normalize_text(it->second);
    }
  }

  std::set<std::string> relation_set;
  for (const auto& f : raw_facts) relation_set.insert(f.relation);
  kb.relation_ids_.assign(relation_set.begin(), relation_set.end());
  for (RelationIdx r = 0; r < static_cast<RelationIdx>(kb.relation_ids_.size()); ++r) {
    kb.relation_of_id_.emplace(kb.relation_ids_[r], r);
  }

  // Canonical fact order makes load order irrelevant and dedup a set walk.
  std::set<std::tuple<EntityIdx, RelationIdx, bool, std::string>> seen;
  for (const auto& f : raw_facts) {
    EntityIdx s = kb.entity_of_id_.at(f.subject);
    RelationIdx r = kb.relation_of_id_.at(f.relation);
    if (f.object_is_ref) {
      EntityIdx o = kb.entity_of_id_.at(f.object);
      seen.insert({s, r, true, kb.entity_ids_[o]});
    } else {
      seen.insert({s, r, false, f.object});
    }
  }
  kb.facts_.reserve(seen.size());
  for (const auto& [s, r, is_ref, obj] : seen) {
    ObjectRef o;
    o.is_entity = is_ref;
    if (is_ref) {
      o.entity = kb.entity_of_id_.at(obj);
      const std::string& alias = kb.alias_raw_[o.entity];
      o.text = alias.empty() ? obj : alias;
    } else {
      o.text = obj;
    }
    kb.facts_.push_back(Fact{s, r, std::move(o)});
  }

  kb.relations_by_entity_.resize(kb.entity_ids_.size());
  kb.facts_by_entity_.resize(kb.entity_ids_.size());
  for (const auto& f : kb.facts_) {
    auto& rels = kb.relations_by_entity_[f.subject];
    if (rels.empty() || rels.back() != f.relation) rels.push_back(f.relation);
    kb.facts_by_entity_[f.subject].push_back(f);
  }
  return kb;
}

KnowledgeBase load_kb_files(const std::string& facts_path, const std::string& aliases_path) {
  std::ifstream facts(facts_path);
  if (!facts) throw parse_error("cannot open facts file: " + facts_path);
  std::ifstream aliases(aliases_path);
  if (!aliases) throw parse_error("cannot open aliases file: " + aliases_path);
  return load_kb(facts, aliases);
}

std::optional<EntityIdx> KnowledgeBase::find_entity(const std::string& id) const {
  auto it = entity_of_id_.find(id);
  if (it == entity_of_id_.end()) return std::nullopt;
  return it->second;
}

std::optional<RelationIdx> KnowledgeBase::find_relation(const std::string& id) const {
  auto it = relation_of_id_.find(id);
  if (it == relation_of_id_.end()) return std::nullopt;
  return it->second;
}

const std::vector<RelationIdx>& KnowledgeBase::relations_of(EntityIdx e) const {
  if (e < 0 || static_cast<std::size_t>(e) >= entity_ids_.size()) {
    throw std::out_of_range("relations_of: unknown entity index " + std::to_string(e));
  }
  return relations_by_entity_[e];
}

const std::vector<Fact>& KnowledgeBase::facts_of(EntityIdx e) const {
  if (e < 0 || static_cast<std::size_t>(e) >= entity_ids_.size()) {
    throw std::out_of_range("facts_of: unknown entity index " + std::to_string(e));
  }
  return facts_by_entity_[e];
}

}  // namespace foqa

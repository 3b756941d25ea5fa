#include "foqa/reach_index.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace foqa {

ReachIndex ReachIndex::build(const KnowledgeBase& kb) {
  ReachIndex idx;
  idx.entity_ids_ = kb.entity_ids();
  idx.relation_ids_ = kb.relation_ids();
  idx.entries_.resize(kb.num_entities());
  idx.relations_of_.resize(kb.num_entities());
  for (const Fact& f : kb.facts()) {
    idx.entries_[f.subject].push_back(ReachEntry{f.object, f.object.text, {f.relation}});
  }
  for (EntityIdx e = 0; e < static_cast<EntityIdx>(idx.entries_.size()); ++e) {
    auto& list = idx.entries_[e];
    std::sort(list.begin(), list.end(), [](const ReachEntry& a, const ReachEntry& b) {
      if (a.path[0] != b.path[0]) return a.path[0] < b.path[0];
      return a.text < b.text;
    });
    for (const auto& entry : list) {
      auto& rels = idx.relations_of_[e];
      if (rels.empty() || rels.back() != entry.path[0]) rels.push_back(entry.path[0]);
    }
  }
  return idx;
}

std::span<const ReachEntry> ReachIndex::entries(EntityIdx e) const {
  if (e < 0 || static_cast<std::size_t>(e) >= entries_.size()) return {};
  return entries_[e];
}

std::vector<ReachEntry> ReachIndex::reachable_via(EntityIdx e, RelationIdx r) const {
  std::vector<ReachEntry> out;
  for (const ReachEntry& entry : entries(e)) {
    if (std::find(entry.path.begin(), entry.path.end(), r) != entry.path.end()) out.push_back(entry);
  }
  return out;
}

std::span<const RelationIdx> ReachIndex::relations_of(EntityIdx e) const {
  if (e < 0 || static_cast<std::size_t>(e) >= relations_of_.size()) return {};
  return relations_of_[e];
}

std::size_t ReachIndex::total_entries() const {
  std::size_t n = 0;
  for (const auto& list : entries_) n += list.size();
  return n;
}

std::optional<RelationIdx> ReachIndex::find_relation(const std::string& id) const {
  auto it = std::lower_bound(relation_ids_.begin(), relation_ids_.end(), id);
  if (it == relation_ids_.end() || *it != id) return std::nullopt;
  return static_cast<RelationIdx>(it - relation_ids_.begin());
}

void ReachIndex::save(std::ostream& out) const {
  out << "FOQA-RIDX v1\n";
  out << "entities " << entity_ids_.size() << "\n";
  for (const auto& id : entity_ids_) out << id << "\n";
  out << "relations " << relation_ids_.size() << "\n";
  for (const auto& id : relation_ids_) out << id << "\n";
  out << "entries " << total_entries() << "\n";
  for (EntityIdx e = 0; e < static_cast<EntityIdx>(entries_.size()); ++e) {
    for (const ReachEntry& entry : entries_[e]) {
      out << e << '\t' << entry.path[0] << '\t' << (entry.node.is_entity ? "@" : "=")
          << (entry.node.is_entity ? std::to_string(entry.node.entity) : entry.node.text) << '\t'
          << entry.text << "\n";
    }
  }
}

void ReachIndex::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw parse_error("cannot write reach index: " + path);
  save(out);
}

ReachIndex ReachIndex::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "FOQA-RIDX v1") {
    throw parse_error("reach index: version mismatch, expected 'FOQA-RIDX v1', got '" + line + "'");
  }
  auto read_count = [&](const std::string& label) {
    std::string word;
    std::size_t n = 0;
    if (!(in >> word >> n) || word != label) {
      throw parse_error("reach index: malformed '" + label + "' line");
    }
    in.ignore();
    return n;
  };
  ReachIndex idx;
  idx.entity_ids_.resize(read_count("entities"));
  for (auto& id : idx.entity_ids_) {
    if (!std::getline(in, id)) throw parse_error("reach index: truncated entity table");
  }
  idx.relation_ids_.resize(read_count("relations"));
  for (auto& id : idx.relation_ids_) {
    if (!std::getline(in, id)) throw parse_error("reach index: truncated relation table");
  }
  std::size_t total = read_count("entries");
  idx.entries_.resize(idx.entity_ids_.size());
  idx.relations_of_.resize(idx.entity_ids_.size());
  for (std::size_t i = 0; i < total; ++i) {
    if (!std::getline(in, line)) throw parse_error("reach index: truncated entries");
    std::istringstream ls(line);
    std::string subject, relation, object, text;
    if (!std::getline(ls, subject, '\t') || !std::getline(ls, relation, '\t') ||
        !std::getline(ls, object, '\t') || !std::getline(ls, text)) {
      throw parse_error("reach index: malformed entry: " + line);
    }
    ReachEntry entry;
    entry.text = text;
    entry.path = {static_cast<RelationIdx>(std::stol(relation))};
    if (object.empty()) throw parse_error("reach index: malformed entry: " + line);
    if (object[0] == '@') {
      entry.node.is_entity = true;
      entry.node.entity = static_cast<EntityIdx>(std::stol(object.substr(1)));
    } else if (object[0] == '=') {
      entry.node.text = object.substr(1);
    } else {
      throw parse_error("reach index: malformed object field: " + object);
    }
    entry.node.text = entry.node.is_entity ? text : object.substr(1);
    EntityIdx e = static_cast<EntityIdx>(std::stol(subject));
    if (e < 0 || static_cast<std::size_t>(e) >= idx.entries_.size()) {
      throw parse_error("reach index: entry for unknown entity: " + line);
    }
    auto& rels = idx.relations_of_[e];
    if (rels.empty() || rels.back() != entry.path[0]) rels.push_back(entry.path[0]);
    idx.entries_[e].push_back(std::move(entry));
  }
  return idx;
}

ReachIndex ReachIndex::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot open reach index: " + path);
  return load(in);
}

}  // namespace foqa

#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "foqa/kb.hpp"

namespace foqa {

// One-hop edge out of a source entity. `path` is a sequence so a wider
// search keeps the same schema; length is always 1 here.
struct ReachEntry {
  ObjectRef node;
  std::string text;  // display text of node
  std::vector<RelationIdx> path;

  friend bool operator==(const ReachEntry&, const ReachEntry&) = default;
};

// Graph reachability index: entity -> one-hop reachable nodes with relation
// paths. Immutable after build.
class ReachIndex {
 public:
  static ReachIndex build(const KnowledgeBase& kb);

  std::span<const ReachEntry> entries(EntityIdx e) const;

  // Entries of e whose path contains r. Unknown entity or relation gives
  // an empty result.
  std::vector<ReachEntry> reachable_via(EntityIdx e, RelationIdx r) const;

  // Relations with at least one outgoing edge from e, ascending.
  std::span<const RelationIdx> relations_of(EntityIdx e) const;

  std::size_t total_entries() const;
  std::size_t num_entities() const { return entity_ids_.size(); }

  const std::vector<std::string>& entity_ids() const { return entity_ids_; }
  const std::vector<std::string>& relation_ids() const { return relation_ids_; }
  const std::string& entity_id(EntityIdx e) const { return entity_ids_.at(e); }
  const std::string& relation_id(RelationIdx r) const { return relation_ids_.at(r); }
  std::optional<RelationIdx> find_relation(const std::string& id) const;

  // `FOQA-RIDX v1` deterministic text dump, entries in invariant order.
  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static ReachIndex load(std::istream& in);
  static ReachIndex load_file(const std::string& path);

 private:
  std::vector<std::vector<ReachEntry>> entries_;  // by entity, sorted (relation, text)
  std::vector<std::vector<RelationIdx>> relations_of_;
  std::vector<std::string> entity_ids_;
  std::vector<std::string> relation_ids_;
};

}  // namespace foqa

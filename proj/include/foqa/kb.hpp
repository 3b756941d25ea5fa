#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace foqa {

using EntityIdx = std::int32_t;
using RelationIdx = std::int32_t;

struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Object side of a fact: either a reference to a KB entity or a literal.
// Display text is always set so answers are printable.
struct ObjectRef {
  bool is_entity = false;
  EntityIdx entity = -1;   // valid iff is_entity
  std::string text;        // display text (raw literal, or the entity's alias)

  friend bool operator==(const ObjectRef& a, const ObjectRef& b) {
    return a.is_entity == b.is_entity && a.entity == b.entity && a.text == b.text;
  }
};

struct Fact {
  EntityIdx subject = -1;
  RelationIdx relation = -1;
  ObjectRef object;

  friend bool operator==(const Fact&, const Fact&) = default;
};

struct KbStats {
  std::size_t num_entities = 0;
  std::size_t num_facts = 0;
  std::size_t k = 0;  // distinct relations appearing in facts
};

// Immutable after load. Entity and relation ids are interned in
// lexicographic order, so index comparisons equal string-id comparisons.
class KnowledgeBase {
 public:
  const std::vector<std::string>& entity_ids() const { return entity_ids_; }
  const std::vector<std::string>& relation_ids() const { return relation_ids_; }
  const std::vector<Fact>& facts() const { return facts_; }

  std::size_t num_entities() const { return entity_ids_.size(); }
  std::size_t num_relations() const { return relation_ids_.size(); }

  const std::string& entity_id(EntityIdx e) const { return entity_ids_.at(e); }
  const std::string& relation_id(RelationIdx r) const { return relation_ids_.at(r); }

  // Raw alias as written in the aliases file; empty if the entity has none.
  const std::string& alias_raw(EntityIdx e) const { return alias_raw_.at(e); }
  // kb normalization applied; empty if none survives.
  const std::string& alias(EntityIdx e) const { return alias_norm_.at(e); }

  std::optional<EntityIdx> find_entity(const std::string& id) const;
  std::optional<RelationIdx> find_relation(const std::string& id) const;

  // Relations r with at least one fact (e, r, .), ascending. Throws on
  // an out-of-range entity.
  const std::vector<RelationIdx>& relations_of(EntityIdx e) const;

  const std::vector<Fact>& facts_of(EntityIdx e) const;

  KbStats stats() const { return {entity_ids_.size(), facts_.size(), relation_ids_.size()}; }

  friend bool operator==(const KnowledgeBase& a, const KnowledgeBase& b) {
    return a.entity_ids_ == b.entity_ids_ && a.relation_ids_ == b.relation_ids_ &&
           a.alias_raw_ == b.alias_raw_ && a.facts_ == b.facts_;
  }

  friend KnowledgeBase load_kb(std::istream& facts_source, std::istream& aliases_source);

 private:
  std::vector<std::string> entity_ids_;
  std::vector<std::string> alias_raw_;
  std::vector<std::string> alias_norm_;
  std::vector<std::string> relation_ids_;
  std::vector<Fact> facts_;  // sorted by (subject, relation, object text), deduplicated
  std::vector<std::vector<RelationIdx>> relations_by_entity_;
  std::vector<std::vector<Fact>> facts_by_entity_;
  std::unordered_map<std::string, EntityIdx> entity_of_id_;
  std::unordered_map<std::string, RelationIdx> relation_of_id_;
};

// Facts: `subject<TAB>relation<TAB>object`, object `@entity_id` for entity
// references, raw text otherwise. Aliases: `entity_id<TAB>alias text`.
// Lines starting with '#' and blank lines are ignored. Duplicate facts are
// dropped; the first alias per entity wins.
KnowledgeBase load_kb(std::istream& facts_source, std::istream& aliases_source);
KnowledgeBase load_kb_files(const std::string& facts_path, const std::string& aliases_path);

}  // namespace foqa

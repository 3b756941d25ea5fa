#pragma once

#include <optional>
#include <string>
#include <vector>

#include "foqa/classifier.hpp"
#include "foqa/entity_index.hpp"
#include "foqa/reach_index.hpp"
#include "foqa/tagger.hpp"

namespace foqa {

// Intermediate representation between understanding and retrieval.
struct StructuredQuery {
  std::vector<std::string> spans;      // entity text spans (may be empty)
  bool no_entity = false;              // tagging produced no E token
  std::string relation;                // unconstrained argmax
  nn::VecX<double> distribution;       // full label-space distribution
};

struct Candidate {
  EntityIdx node = -1;
  double score = 0.0;       // max TF-IDF over all matched keys
  NGramKey matched_key;     // the key that produced the max score
};

// One executed pass of the linking loop; n = 0 is the exact (infinity) pass.
struct LinkPass {
  int n = 0;
  std::size_t keys_queried = 0;
  std::size_t postings_appended = 0;
  bool stopped_after = false;
};

struct CandidateSet {
  std::vector<Candidate> candidates;  // deduplicated, score-descending
  std::vector<LinkPass> passes;       // audit trail
};

struct Answer {
  ObjectRef node;
  std::string text;
  EntityIdx source_entity = -1;
  std::string source_entity_id;  // string id, for reporting and evaluation
  RelationIdx relation = -1;     // reach-index relation id
  double score = 0.0;
};

// Decreasing-n linking: exact pass first, then n = 3, 2, 1 over the
// entityText's n-grams. Stops once the candidate set is non-empty and
// n <= token count (the exact pass never stops the loop).
CandidateSet link(const EntityIndex& idx, const std::string& entity_text);

struct StageTimings {
  double tag_ms = 0.0;
  double predict_ms = 0.0;
  double link_ms = 0.0;
  double select_ms = 0.0;
  double total_ms = 0.0;
};

struct QaResult {
  StructuredQuery query;
  CandidateSet candidates;
  std::optional<Answer> answer;
  std::string constrained_relation;     // final relation actually used
  std::size_t allowed_relation_count = 0;
  StageTimings timings;
};

// Assembled serving state: both indexes plus both models. Immutable;
// answer_question is safe for concurrent callers.
struct Engine {
  EntityIndex entity_index;
  ReachIndex reach_index;
  TaggerModel tagger;
  ClassifierModel classifier;

  // classifier label index per reach relation (-1 when unseen in training)
  std::vector<int> label_of_relation;
  // reach relation index per classifier label (-1 when absent from the KB)
  std::vector<RelationIdx> relation_of_label;

  void finalize();  // builds the label/relation maps; call after loading
};

StructuredQuery build_structured_query(const TaggerModel& tagger, const ClassifierModel& classifier,
                                       const std::string& question);

// Relation-constrained single-hop selection over the candidates. The
// constrained relation maximizes the recorded distribution over the union
// of the candidates' relation sets (falling back to the unconstrained
// argmax when that union misses the label space entirely).
struct SelectionResult {
  std::optional<Answer> answer;
  std::string constrained_relation;
  std::size_t allowed_relation_count = 0;
};
SelectionResult select_answer(const Engine& engine, const CandidateSet& candidates,
                              const StructuredQuery& query);

struct AnswerOptions {
  bool whole_question_entity = false;            // naive-ED ablation
  std::optional<std::string> forced_relation;    // naive-RP ablation (no constraining)
};

QaResult answer_question(const Engine& engine, const std::string& question,
                         const AnswerOptions& options = {});

// One JSON-lines diagnostic record per question; stable field names.
std::string diagnostic_json(const std::string& question, const QaResult& result);

}  // namespace foqa

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "foqa/datasets.hpp"
#include "foqa/metrics.hpp"
#include "foqa/pipeline.hpp"

namespace foqa {

struct EvalRecord {
  std::string question;
  std::string gold_entity;
  std::string gold_relation;
  std::string predicted_entity;   // empty when no answer
  std::string predicted_relation; // the relation actually used
  bool correct = false;
  bool gold_relation_in_label_space = true;
  std::size_t allowed_relation_count = 0;
  StageTimings timings;
};

struct EvalSummary {
  double p_at_1 = 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;
  std::size_t gold_relation_outside_label_space = 0;
  double mean_allowed_relations = 0.0;
  std::vector<EvalRecord> records;
};

// A question answerer: question text in, (entity id, relation id, result) out.
// The engine, the ablation baselines, and the gold-input oracle all fit it.
using AnswerFn = std::function<QaResult(const std::string& question)>;

// Correct iff predicted (entity, relation) both match the gold annotation.
// `jobs` > 1 evaluates questions in parallel (record order preserved).
EvalSummary evaluate_p_at_1(const AnswerFn& answer, const std::vector<AnnotatedQuestion>& test,
                            const std::vector<std::string>& label_space, int jobs = 1);

AnswerFn engine_answerer(const Engine& engine, const AnswerOptions& options = {});

// Bypasses both models: gold alias as the (single) span, gold relation as a
// one-hot distribution. Isolates linking + selection.
AnswerFn oracle_input_answerer(const Engine& engine, const KnowledgeBase& kb);

// Most frequent relation in the training questions, ties lexicographic.
std::string most_frequent_relation(const std::vector<AnnotatedQuestion>& train);

struct AblationRow {
  std::string name;  // full | naive ED | naive RP | naive ED and RP
  double p_at_1 = 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;
};

// Four-row ablation: the trained pipeline, whole-question entity text
// (naive ED), fixed most-frequent training relation with constraining
// disabled (naive RP), and both baselines at once.
std::vector<AblationRow> run_ablations(const Engine& engine,
                                       const std::vector<AnnotatedQuestion>& train,
                                       const std::vector<AnnotatedQuestion>& test, int jobs = 1);

struct BlameReport {
  std::size_t errors = 0;
  std::size_t entity_blame = 0;    // relation right, entity wrong
  std::size_t relation_blame = 0;  // entity right, relation wrong
  std::size_t both_blame = 0;
  double entity_pct = 0.0;
  double relation_pct = 0.0;
  double both_pct = 0.0;
  bool no_errors = false;
};

BlameReport blame_analysis(const std::vector<EvalRecord>& records);

struct LatencyStats {
  double mean_ms = 0.0;
  double stdev_ms = 0.0;
  StageTimings stage_means;
  std::size_t samples = 0;
  std::string formatted() const;  // "mean±stdev ms"
};

// Wall clock around answer_question only; one untimed warm-up pass runs
// first. Strictly sequential.
LatencyStats latency_bench(const Engine& engine, const std::vector<std::string>& questions,
                           int repetitions);

// Table-2-style categorization of externally annotated records.
struct RealLogRecord {
  bool first_order = true;
  bool entity_correct = false;
  bool relation_correct = false;
};

struct RealLogTable {
  std::size_t correct = 0;
  std::size_t incorrect_entity = 0;
  std::size_t incorrect_relation = 0;
  std::size_t not_first_order = 0;
};

RealLogTable categorize_real_log(const std::vector<RealLogRecord>& records);

}  // namespace foqa

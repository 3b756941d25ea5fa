#include "foqa/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <thread>

#include "foqa/text.hpp"

namespace foqa {

AnswerFn engine_answerer(const Engine& engine, const AnswerOptions& options) {
  return [&engine, options](const std::string& question) {
    return answer_question(engine, question, options);
  };
}

AnswerFn oracle_input_answerer(const Engine& engine, const KnowledgeBase& kb) {
  return [&engine, &kb](const std::string& question) {
    QaResult result;
    // The caller encodes gold as "entity_id<TAB>relation_id" in place of a
    // natural question; models are bypassed entirely.
    const std::size_t tab = question.find('\t');
    if (tab == std::string::npos) throw std::invalid_argument("oracle answerer: malformed input");
    const std::string entity_id = question.substr(0, tab);
    const std::string relation_id = question.substr(tab + 1);
    auto entity = kb.find_entity(entity_id);
    if (!entity) return result;
    const std::string span = kb.alias(*entity);
    if (span.empty()) return result;
    result.query.spans = {span};
    result.query.relation = relation_id;
    const int label = engine.classifier.label_index(relation_id);
    result.query.distribution = nn::VecX<double>::Zero(engine.classifier.labels.size());
    if (label >= 0) result.query.distribution[label] = 1.0;
    result.candidates = link(engine.entity_index, span);
    SelectionResult selection = select_answer(engine, result.candidates, result.query);
    result.answer = std::move(selection.answer);
    result.constrained_relation = selection.constrained_relation;
    result.allowed_relation_count = selection.allowed_relation_count;
    return result;
  };
}

EvalSummary evaluate_p_at_1(const AnswerFn& answer, const std::vector<AnnotatedQuestion>& test,
                            const std::vector<std::string>& label_space, int jobs) {
  if (test.empty()) throw std::invalid_argument("evaluate_p_at_1: empty test set");
  EvalSummary summary;
  summary.total = test.size();
  summary.records.resize(test.size());

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const AnnotatedQuestion& row = test[i];
      EvalRecord& record = summary.records[i];
      record.question = row.question;
      record.gold_entity = row.subject;
      record.gold_relation = row.relation;
      record.gold_relation_in_label_space =
          std::find(label_space.begin(), label_space.end(), row.relation) != label_space.end();
      QaResult result = answer(row.question);
      record.timings = result.timings;
      record.allowed_relation_count = result.allowed_relation_count;
      record.predicted_relation = result.constrained_relation;
      record.predicted_entity = result.answer ? result.answer->source_entity_id : "";
      record.correct =
          record.predicted_entity == record.gold_entity &&
          record.predicted_relation == record.gold_relation;
    }
  };

  if (jobs <= 1) {
    work(0, test.size());
  } else {
    std::vector<std::thread> threads;
    const std::size_t chunk = (test.size() + jobs - 1) / jobs;
    for (int j = 0; j < jobs; ++j) {
      const std::size_t begin = std::min(test.size(), j * chunk);
      const std::size_t end = std::min(test.size(), begin + chunk);
      if (begin < end) threads.emplace_back(work, begin, end);
    }
    for (auto& t : threads) t.join();
  }

  double allowed_sum = 0.0;
  for (const EvalRecord& record : summary.records) {
    if (record.correct) ++summary.correct;
    if (!record.gold_relation_in_label_space) ++summary.gold_relation_outside_label_space;
    allowed_sum += static_cast<double>(record.allowed_relation_count);
  }
  summary.p_at_1 = static_cast<double>(summary.correct) / static_cast<double>(summary.total);
  summary.mean_allowed_relations = allowed_sum / static_cast<double>(summary.total);
  return summary;
}

std::string most_frequent_relation(const std::vector<AnnotatedQuestion>& train) {
  if (train.empty()) throw std::invalid_argument("most_frequent_relation: empty training set");
  std::map<std::string, std::size_t> counts;
  for (const auto& row : train) ++counts[row.relation];
  std::string best;
  std::size_t best_count = 0;
  for (const auto& [relation, count] : counts) {
    if (count > best_count) {  // map order makes ties lexicographic
      best = relation;
      best_count = count;
    }
  }
  return best;
}

std::vector<AblationRow> run_ablations(const Engine& engine,
                                       const std::vector<AnnotatedQuestion>& train,
                                       const std::vector<AnnotatedQuestion>& test, int jobs) {
  const std::string mfr = most_frequent_relation(train);
  const auto& labels = engine.classifier.labels;
  std::vector<AblationRow> rows;
  const std::vector<std::pair<std::string, AnswerOptions>> configs = {
      {"full", {}},
      {"naive ED", {true, std::nullopt}},
      {"naive RP", {false, mfr}},
      {"naive ED and RP", {true, mfr}},
  };
  for (const auto& [name, options] : configs) {
    EvalSummary summary = evaluate_p_at_1(engine_answerer(engine, options), test, labels, jobs);
    rows.push_back(AblationRow{name, summary.p_at_1, summary.correct, summary.total});
  }
  return rows;
}

BlameReport blame_analysis(const std::vector<EvalRecord>& records) {
  BlameReport report;
  for (const EvalRecord& record : records) {
    if (record.correct) continue;
    ++report.errors;
    const bool entity_ok = record.predicted_entity == record.gold_entity;
    const bool relation_ok = record.predicted_relation == record.gold_relation;
    if (relation_ok && !entity_ok) ++report.entity_blame;
    else if (entity_ok && !relation_ok) ++report.relation_blame;
    else ++report.both_blame;
  }
  if (report.errors == 0) {
    report.no_errors = true;
    return report;
  }
  const double denom = static_cast<double>(report.errors);
  report.entity_pct = 100.0 * static_cast<double>(report.entity_blame) / denom;
  report.relation_pct = 100.0 * static_cast<double>(report.relation_blame) / denom;
  report.both_pct = 100.0 * static_cast<double>(report.both_blame) / denom;
  return report;
}

std::string LatencyStats::formatted() const {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%.2f±%.2f ms", mean_ms, stdev_ms);
  return buf;
}

LatencyStats latency_bench(const Engine& engine, const std::vector<std::string>& questions,
                           int repetitions) {
  if (questions.empty()) throw std::invalid_argument("latency_bench: empty question list");
  if (repetitions < 1) throw std::invalid_argument("latency_bench: repetitions must be >= 1");

  for (const std::string& q : questions) answer_question(engine, q);  // warm-up, untimed

  LatencyStats stats;
  std::vector<double> samples;
  samples.reserve(questions.size() * repetitions);
  StageTimings sums;
  for (int rep = 0; rep < repetitions; ++rep) {
    for (const std::string& q : questions) {
      QaResult result = answer_question(engine, q);
      samples.push_back(result.timings.total_ms);
      sums.tag_ms += result.timings.tag_ms;
      sums.predict_ms += result.timings.predict_ms;
      sums.link_ms += result.timings.link_ms;
      sums.select_ms += result.timings.select_ms;
      sums.total_ms += result.timings.total_ms;
    }
  }
  stats.samples = samples.size();
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double v : samples) var += (v - mean) * (v - mean);
  var = samples.size() > 1 ? var / static_cast<double>(samples.size() - 1) : 0.0;
  stats.mean_ms = mean;
  stats.stdev_ms = std::sqrt(var);
  const double inv = 1.0 / static_cast<double>(samples.size());
  stats.stage_means = {sums.tag_ms * inv, sums.predict_ms * inv, sums.link_ms * inv,
                       sums.select_ms * inv, sums.total_ms * inv};
  return stats;
}

RealLogTable categorize_real_log(const std::vector<RealLogRecord>& records) {
  RealLogTable table;
  for (const RealLogRecord& record : records) {
    if (!record.first_order) {
      ++table.not_first_order;
    } else if (record.entity_correct && record.relation_correct) {
      ++table.correct;
    } else if (!record.entity_correct) {
      ++table.incorrect_entity;
    } else {
      ++table.incorrect_relation;
    }
  }
  return table;
}

}  // namespace foqa

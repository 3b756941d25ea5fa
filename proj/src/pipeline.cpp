#include "foqa/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>

#include <json.hpp>

#include "foqa/text.hpp"

namespace foqa {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void append_postings(const std::vector<Posting>& postings, const NGramKey& key,
                     std::map<EntityIdx, Candidate>& best, std::size_t& appended) {
  for (const Posting& p : postings) {
    ++appended;
    auto [it, inserted] = best.try_emplace(p.node, Candidate{p.node, p.score, key});
    if (!inserted && p.score > it->second.score) {
      it->second.score = p.score;
      it->second.matched_key = key;
    }
  }
}

}  // namespace

CandidateSet link(const EntityIndex& idx, const std::string& entity_text) {
  const std::vector<std::string> tokens = tokenize(entity_text);
  if (tokens.empty()) throw std::invalid_argument("link: empty entityText");
  const int token_count = static_cast<int>(tokens.size());

  CandidateSet result;
  std::map<EntityIdx, Candidate> best;
  // n = 0 encodes the exact pass; it never satisfies the stop condition.
  for (int n : {0, 3, 2, 1}) {
    LinkPass pass;
    pass.n = n;
    if (n == 0) {
      NGramKey key = NGramKey::exact(join_tokens(tokens));
      pass.keys_queried = 1;
      append_postings(idx.lookup(key), key, best, pass.postings_appended);
    } else {
      for (NGramKey& key : ngram_keys(tokens, static_cast<std::uint8_t>(n))) {
        ++pass.keys_queried;
        append_postings(idx.lookup(key), key, best, pass.postings_appended);
      }
    }
    const bool stop = !best.empty() && n != 0 && n <= token_count;
    pass.stopped_after = stop;
    result.passes.push_back(pass);
    if (stop) break;
  }

  result.candidates.reserve(best.size());
  for (auto& [node, candidate] : best) result.candidates.push_back(std::move(candidate));
  std::sort(result.candidates.begin(), result.candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.node < b.node;
            });
  return result;
}

void Engine::finalize() {
  label_of_relation.assign(reach_index.relation_ids().size(), -1);
  relation_of_label.assign(classifier.labels.size(), -1);
  for (std::size_t r = 0; r < reach_index.relation_ids().size(); ++r) {
    const int label = classifier.label_index(reach_index.relation_ids()[r]);
    label_of_relation[r] = label;
    if (label >= 0) relation_of_label[label] = static_cast<RelationIdx>(r);
  }
}

StructuredQuery build_structured_query(const TaggerModel& tagger, const ClassifierModel& classifier,
                                       const std::string& question) {
  const std::vector<std::string> tokens = tokenize(question);
  if (tokens.empty()) throw std::invalid_argument("empty question");
  StructuredQuery query;
  const std::vector<int> tags = tag_tokens(tagger, tokens);
  const std::vector<std::string> tagged_tokens(tokens.begin(), tokens.begin() + tags.size());
  query.spans = extract_entities(tags, tagged_tokens);
  query.no_entity = query.spans.empty();
  RelationPrediction pred = predict_relation_tokens(classifier, tokens);
  query.relation = pred.relation;
  query.distribution = std::move(pred.distribution);
  return query;
}

SelectionResult select_answer(const Engine& engine, const CandidateSet& candidates,
                              const StructuredQuery& query) {
  SelectionResult result;
  result.constrained_relation = query.relation;
  if (candidates.candidates.empty()) return result;

  std::set<RelationIdx> allowed_relations;
  for (const Candidate& c : candidates.candidates) {
    auto rels = engine.reach_index.relations_of(c.node);
    allowed_relations.insert(rels.begin(), rels.end());
  }
  result.allowed_relation_count = allowed_relations.size();

  std::vector<int> allowed_labels;
  for (RelationIdx r : allowed_relations) {
    if (engine.label_of_relation[r] >= 0) allowed_labels.push_back(engine.label_of_relation[r]);
  }
  RelationIdx target_relation = -1;
  if (!allowed_labels.empty() && query.distribution.size() > 0) {
    RelationPrediction constrained =
        predict_constrained(engine.classifier, query.distribution, allowed_labels);
    result.constrained_relation = constrained.relation;
    target_relation = engine.relation_of_label[constrained.label];
  } else {
    // No candidate relation is in the label space: fall back to the
    // unconstrained argmax and traverse with it if the KB knows it.
    auto rel = engine.reach_index.find_relation(query.relation);
    target_relation = rel ? *rel : -1;
  }
  if (target_relation < 0) return result;

  std::optional<Answer> best;
  for (const Candidate& c : candidates.candidates) {
    for (const ReachEntry& entry : engine.reach_index.reachable_via(c.node, target_relation)) {
      Answer a{entry.node, entry.text, c.node, engine.reach_index.entity_id(c.node),
               target_relation, c.score};
      if (!best) {
        best = std::move(a);
        continue;
      }
      const bool better =
          a.score > best->score ||
          (a.score == best->score &&
           (a.source_entity < best->source_entity ||
            (a.source_entity == best->source_entity && a.text < best->text)));
      if (better) best = std::move(a);
    }
  }
  result.answer = std::move(best);
  return result;
}

QaResult answer_question(const Engine& engine, const std::string& question,
                         const AnswerOptions& options) {
  QaResult result;
  const auto t_total = Clock::now();

  // Stage 1: structured query.
  const std::vector<std::string> tokens = tokenize(question);
  if (tokens.empty()) throw std::invalid_argument("empty question");
  {
    const auto t = Clock::now();
    if (options.whole_question_entity) {
      result.query.spans = {join_tokens(tokens)};
    } else {
      const std::vector<int> tags = tag_tokens(engine.tagger, tokens);
      const std::vector<std::string> tagged(tokens.begin(), tokens.begin() + tags.size());
      result.query.spans = extract_entities(tags, tagged);
      result.query.no_entity = result.query.spans.empty();
    }
    result.timings.tag_ms = ms_since(t);
  }
  {
    const auto t = Clock::now();
    if (options.forced_relation) {
      result.query.relation = *options.forced_relation;
    } else {
      RelationPrediction pred = predict_relation_tokens(engine.classifier, tokens);
      result.query.relation = pred.relation;
      result.query.distribution = std::move(pred.distribution);
    }
    result.timings.predict_ms = ms_since(t);
  }

  // Stage 2: entity linking; spans union their candidates. With no entity
  // span the whole question acts as entityText (the naive-ED behavior).
  {
    const auto t = Clock::now();
    std::vector<std::string> spans = result.query.spans;
    if (spans.empty()) spans = {join_tokens(tokens)};
    std::map<EntityIdx, Candidate> best;
    for (const std::string& span : spans) {
      CandidateSet set = link(engine.entity_index, span);
      if (result.candidates.passes.empty()) {
        result.candidates.passes = set.passes;
      }
      for (Candidate& c : set.candidates) {
        auto [it, inserted] = best.try_emplace(c.node, c);
        if (!inserted && c.score > it->second.score) it->second = c;
      }
    }
    result.candidates.candidates.assign(best.size(), Candidate{});
    std::size_t i = 0;
    for (auto& [node, c] : best) result.candidates.candidates[i++] = c;
    std::sort(result.candidates.candidates.begin(), result.candidates.candidates.end(),
              [](const Candidate& a, const Candidate& b) {
                if (a.score != b.score) return a.score > b.score;
                return a.node < b.node;
              });
    result.timings.link_ms = ms_since(t);
  }

  // Stage 3: relation-constrained answer selection.
  {
    const auto t = Clock::now();
    if (options.forced_relation) {
      // Naive RP: fixed relation, constraining disabled.
      result.constrained_relation = *options.forced_relation;
      auto rel = engine.reach_index.find_relation(*options.forced_relation);
      if (rel) {
        std::optional<Answer> best;
        for (const Candidate& c : result.candidates.candidates) {
          for (const ReachEntry& entry : engine.reach_index.reachable_via(c.node, *rel)) {
            Answer a{entry.node, entry.text, c.node, engine.reach_index.entity_id(c.node), *rel,
                     c.score};
            const bool better =
                !best || a.score > best->score ||
                (a.score == best->score &&
                 (a.source_entity < best->source_entity ||
                  (a.source_entity == best->source_entity && a.text < best->text)));
            if (better) best = std::move(a);
          }
        }
        result.answer = std::move(best);
      }
    } else {
      SelectionResult selection = select_answer(engine, result.candidates, result.query);
      result.answer = std::move(selection.answer);
      result.constrained_relation = selection.constrained_relation;
      result.allowed_relation_count = selection.allowed_relation_count;
    }
    result.timings.select_ms = ms_since(t);
  }

  result.timings.total_ms = ms_since(t_total);
  return result;
}

std::string diagnostic_json(const std::string& question, const QaResult& result) {
  nlohmann::json j;
  j["question"] = question;
  j["spans"] = result.query.spans;
  j["relation"] = result.query.relation;
  j["constrained_relation"] = result.constrained_relation;
  j["candidates"] = result.candidates.candidates.size();
  if (result.answer) {
    j["answer"] = result.answer->text;
  } else {
    j["answer"] = nullptr;
  }
  j["ms"] = {{"tag", result.timings.tag_ms},
             {"relation", result.timings.predict_ms},
             {"link", result.timings.link_ms},
             {"select", result.timings.select_ms},
             {"total", result.timings.total_ms}};
  return j.dump();
}

}  // namespace foqa

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "foqa/classifier.hpp"
#include "foqa/metrics.hpp"
#include "foqa/tagger.hpp"
#include "foqa/text.hpp"

using namespace foqa;

namespace {

// Tiny fully-separable corpus: names are E, everything else C, relation is
// broadcast by the verb.
struct TinyData {
  std::vector<TaggedQuestion> tagged_train, tagged_valid;
  std::vector<LabeledQuestion> labeled_train, labeled_valid;
};

TinyData tiny_data() {
  TinyData data;
  const std::vector<std::pair<std::string, std::string>> rows = {
      {"how old is kim novak", "C C C E E"},
      {"how old is lee marvin", "C C C E E"},
      {"where does kim novak live", "C C E E C"},
      {"where does ada wong live", "C C E E C"},
      {"how old is ada wong", "C C C E E"},
      {"where does lee marvin live", "C C E E C"},
      {"how old is sue storm", "C C C E E"},
      {"where does sue storm live", "C C E E C"},
  };
  auto parse = [](const std::string& text, const std::string& tags) {
    TaggedQuestion q;
    q.tokens = tokenize(text);
    for (char c : tags) {
      if (c == 'E') q.tags.push_back(kTagE);
      if (c == 'C') q.tags.push_back(kTagC);
    }
    return q;
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    TaggedQuestion q = parse(rows[i].first, rows[i].second);
    const std::string relation = rows[i].first.starts_with("how") ? "bornOn" : "livesIn";
    if (i % 4 == 3) {
      data.tagged_valid.push_back(q);
      data.labeled_valid.push_back({q.tokens, relation});
    } else {
      data.tagged_train.push_back(q);
      data.labeled_train.push_back({q.tokens, relation});
    }
  }
  return data;
}

TrainConfig fast_config() {
  TrainConfig cfg;
  cfg.cell = nn::CellKind::gru;
  cfg.bidirectional = true;
  cfg.depth = 1;
  cfg.hidden = 12;
  cfg.embedding_dim = 8;
  cfg.dropout = 0.0;
  cfg.learning_rate = 0.5;
  cfg.epochs = 60;
  cfg.seed = 3;
  return cfg;
}

}  // namespace

TEST_CASE("pad_question prepends pads, truncates the tail, maps positions") {
  PaddedQuestion p = pad_question({"a", "b"}, 4);
  CHECK(p.tokens == std::vector<std::string>{"<pad>", "<pad>", "a", "b"});
  CHECK(p.source_index == std::vector<int>{-1, -1, 0, 1});
  CHECK(p.dropped_tail == 0);

  PaddedQuestion same = pad_question({"a", "b", "c"}, 3);
  CHECK(same.tokens == std::vector<std::string>{"a", "b", "c"});

  PaddedQuestion cut = pad_question({"a", "b", "c", "d", "e"}, 3);
  CHECK(cut.tokens == std::vector<std::string>{"a", "b", "c"});
  CHECK(cut.dropped_tail == 2);

  CHECK_THROWS_AS(pad_question({}, 3), std::invalid_argument);
  CHECK_THROWS_AS(pad_question({"a"}, 0), std::invalid_argument);
}

TEST_CASE("extract_entities groups maximal runs in order") {
  const std::vector<std::string> tokens = {"how", "old", "is", "michelle", "gellar"};
  CHECK(extract_entities({kTagC, kTagC, kTagC, kTagE, kTagE}, tokens) ==
        std::vector<std::string>{"michelle gellar"});
  CHECK(extract_entities({kTagC, kTagC, kTagC, kTagC, kTagC}, tokens).empty());
  CHECK(extract_entities({kTagE, kTagC, kTagE, kTagE}, {"a", "b", "c", "d"}) ==
        std::vector<std::string>{"a", "c d"});
  CHECK_THROWS_AS(extract_entities({kTagE}, tokens), std::invalid_argument);
}

TEST_CASE("micro F1 fixtures") {
  // perfect prediction
  CHECK(micro_f1({{1, 0, 1}}, {{1, 0, 1}}).f1 == doctest::Approx(1.0));
  // all-E vs half-E gold: P=0.5, R=1, F1=2/3
  F1Score s = micro_f1({{1, 1, 1, 1}}, {{1, 1, 0, 0}});
  CHECK(s.precision == doctest::Approx(0.5));
  CHECK(s.recall == doctest::Approx(1.0));
  CHECK(s.f1 == doctest::Approx(2.0 / 3.0));
  // all-C prediction with gold entities present: F1 = 0
  CHECK(micro_f1({{0, 0}}, {{1, 0}}).f1 == doctest::Approx(0.0));
  CHECK_THROWS_AS(micro_f1({{1}}, {{1, 0}}), std::invalid_argument);

  // committed 3-sentence fixture, hand-computed: TP=2, FP=1, FN=1
  const std::vector<std::vector<int>> pred = {{1, 0, 0}, {0, 0}, {1, 1}};
  const std::vector<std::vector<int>> gold = {{1, 1, 0}, {0, 0}, {1, 0}};
  F1Score fx = micro_f1(pred, gold);
  CHECK(fx.precision == doctest::Approx(2.0 / 3.0));
  CHECK(fx.recall == doctest::Approx(2.0 / 3.0));
  CHECK(fx.f1 == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("training file round trips and converters") {
  TinyData data = tiny_data();
  std::ostringstream out;
  write_tagged_file(out, data.tagged_train);
  std::istringstream back(out.str());
  auto reread = read_tagged_file(back, "mem");
  REQUIRE(reread.size() == data.tagged_train.size());
  CHECK(reread[0].tokens == data.tagged_train[0].tokens);
  CHECK(reread[0].tags == data.tagged_train[0].tags);

  std::istringstream bad("question text\tE C Q\n");
  CHECK_THROWS_AS(read_tagged_file(bad, "mem"), parse_error);
  std::istringstream misaligned("three token question\tE C\n");
  CHECK_THROWS_AS(read_tagged_file(misaligned, "mem"), parse_error);

  std::ostringstream lab;
  write_labeled_file(lab, data.labeled_train);
  std::istringstream lab_in(lab.str());
  auto relabeled = read_labeled_file(lab_in, "mem");
  CHECK(relabeled.size() == data.labeled_train.size());
  CHECK(relabeled[0].relation == data.labeled_train[0].relation);
}

TEST_CASE("annotated rows convert to tagged rows by alias matching") {
  std::istringstream facts("e1\tbornOn\t4/14/1977\ne2\tlivesIn\tparis\n");
  std::istringstream aliases("e1\tSarah Michelle Gellar\ne2\tKim Novak\n");
  KnowledgeBase kb = load_kb(facts, aliases);

  std::vector<AnnotatedQuestion> annotated = {
      {"e1", "bornOn", "4/14/1977", "how old is sarah michelle gellar"},
      {"e2", "livesIn", "paris", "where does kim novak live"},
      {"e1", "bornOn", "4/14/1977", "how old is gellar"},        // partial alias still matches
      {"e2", "livesIn", "paris", "where does nobody famous live"},  // no alias tokens: skipped
      {"ghost", "bornOn", "x", "who is this"},                      // unknown subject: skipped
  };
  TagConversion conv = annotated_to_tagged(annotated, kb);
  CHECK(conv.skipped == 2);
  REQUIRE(conv.rows.size() == 3);
  CHECK(conv.rows[0].tags == std::vector<int>{0, 0, 0, 1, 1, 1});
  CHECK(conv.rows[2].tags == std::vector<int>{0, 0, 0, 1});

  auto labeled = annotated_to_labeled(annotated);
  CHECK(labeled.size() == 5);
  CHECK(labeled[0].relation == "bornOn");
}

TEST_CASE("trained tagger tags the running example and survives a round trip") {
  TinyData data = tiny_data();
  TaggerTrainResult result = train_tagger(data.tagged_train, data.tagged_valid, {fast_config()});
  REQUIRE(result.report.size() == 1);
  CHECK(result.report[0].best_metric > 0.99);  // separable

  auto tags = tag(result.best, "how old is kim novak");
  CHECK(tags == std::vector<int>{kTagC, kTagC, kTagC, kTagE, kTagE});
  CHECK(extract_entities(tags, tokenize("how old is kim novak")) ==
        std::vector<std::string>{"kim novak"});

  // pad invariance: same question, same result, no cross-call state
  CHECK(tag(result.best, "how old is kim novak") == tags);
  CHECK_THROWS_AS(tag(result.best, "  ?!  "), std::invalid_argument);

  const std::string path = (std::filesystem::temp_directory_path() / "foqa_tagger.model").string();
  result.best.save(path);
  TaggerModel loaded = TaggerModel::load(path);
  CHECK(loaded.input_length == result.best.input_length);
  CHECK(tag(loaded, "how old is kim novak") == tags);
  std::filesystem::remove(path);
}

TEST_CASE("tagger training validates inputs") {
  TinyData data = tiny_data();
  CHECK_THROWS_AS(train_tagger({}, data.tagged_valid, {fast_config()}), std::invalid_argument);
  CHECK_THROWS_AS(train_tagger(data.tagged_train, data.tagged_valid, {}), std::invalid_argument);
  TrainConfig bad = fast_config();
  bad.dropout = 0.9;  // outside the searched range
  CHECK_THROWS_AS(train_tagger(data.tagged_train, data.tagged_valid, {bad}),
                  std::invalid_argument);
}

TEST_CASE("trained classifier predicts relations; constrained prediction masks") {
  TinyData data = tiny_data();
  ClassifierTrainResult result =
      train_classifier(data.labeled_train, data.labeled_valid, {fast_config()});
  CHECK(result.report[0].best_metric == doctest::Approx(1.0));

  RelationPrediction pred = predict_relation(result.best, "how old is kim novak");
  CHECK(pred.relation == "bornOn");
  CHECK(std::abs(pred.distribution.sum() - 1.0) < 1e-9);

  // allowed = full label space: same argmax as unconstrained
  std::vector<int> all_labels;
  for (std::size_t i = 0; i < result.best.labels.size(); ++i) all_labels.push_back(int(i));
  CHECK(predict_constrained(result.best, pred.distribution, all_labels).relation == pred.relation);

  // allowed = single label: that label wins regardless of scores
  const int lives = result.best.label_index("livesIn");
  RelationPrediction forced = predict_constrained(result.best, pred.distribution, {lives});
  CHECK(forced.relation == "livesIn");
  CHECK(forced.distribution[lives] == doctest::Approx(1.0));

  CHECK_THROWS_AS(predict_constrained(result.best, pred.distribution, {}), std::invalid_argument);
  CHECK_THROWS_AS(predict_constrained(result.best, pred.distribution, {-5, 99}),
                  std::invalid_argument);
  CHECK_THROWS_AS(predict_relation(result.best, "   "), std::invalid_argument);
}

TEST_CASE("constrained argmax equals brute force over allowed unconstrained probabilities") {
  TinyData data = tiny_data();
  ClassifierTrainResult result =
      train_classifier(data.labeled_train, data.labeled_valid, {fast_config()});
  std::mt19937_64 rng(17);
  nn::VecX<double> dist(result.best.labels.size());
  for (int trial = 0; trial < 50; ++trial) {
    double sum = 0.0;
    std::uniform_real_distribution<double> uni(0.01, 1.0);
    for (Eigen::Index i = 0; i < dist.size(); ++i) {
      dist[i] = uni(rng);
      sum += dist[i];
    }
    dist /= sum;
    std::vector<int> allowed;
    for (Eigen::Index i = 0; i < dist.size(); ++i) {
      if (rng() % 2 == 0) allowed.push_back(static_cast<int>(i));
    }
    if (allowed.empty()) allowed.push_back(0);
    RelationPrediction pred = predict_constrained(result.best, dist, allowed);
    int best = allowed[0];
    for (int label : allowed) {
      if (dist[label] > dist[best]) best = label;
    }
    CHECK(pred.label == best);
  }
}

TEST_CASE("argmax is invariant under positive logit scaling") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> uni(-3.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    nn::VecX<double> logits(6);
    for (int i = 0; i < 6; ++i) logits[i] = uni(rng);
    const nn::VecX<double> scaled = logits * 7.5;
    CHECK(nn::argmax<double>(nn::softmax<double>(logits)) ==
          nn::argmax<double>(nn::softmax<double>(scaled)));
  }
}

TEST_CASE("single-config grid returns that config; classifier round trip") {
  TinyData data = tiny_data();
  ClassifierTrainResult result =
      train_classifier(data.labeled_train, data.labeled_valid, {fast_config()});
  CHECK(result.best_config == 0);
  CHECK(result.best.labels == std::vector<std::string>{"bornOn", "livesIn"});

  const std::string path =
      (std::filesystem::temp_directory_path() / "foqa_classifier.model").string();
  result.best.save(path);
  ClassifierModel loaded = ClassifierModel::load(path);
  CHECK(loaded.labels == result.best.labels);
  CHECK(predict_relation(loaded, "how old is ada wong").relation ==
        predict_relation(result.best, "how old is ada wong").relation);
  std::filesystem::remove(path);

  // loading the wrong task through the classifier loader fails
  const std::string tag_path =
      (std::filesystem::temp_directory_path() / "foqa_not_classifier.model").string();
  TaggerTrainResult tg = train_tagger(data.tagged_train, data.tagged_valid, {fast_config()});
  tg.best.save(tag_path);
  CHECK_THROWS(ClassifierModel::load(tag_path));
  std::filesystem::remove(tag_path);
}

TEST_CASE("all-same-label dataset trains to accuracy 1.0") {
  std::vector<LabeledQuestion> train, valid;
  for (int i = 0; i < 8; ++i) {
    LabeledQuestion q{{"what", "is", "item" + std::to_string(i)}, "onlyRelation"};
    (i % 4 == 3 ? valid : train).push_back(q);
  }
  TrainConfig cfg = fast_config();
  cfg.epochs = 20;
  ClassifierTrainResult result = train_classifier(train, valid, {cfg});
  CHECK(result.report[0].best_metric == doctest::Approx(1.0));
  // label space is padded with an explicit reject column to keep k >= 2
  CHECK(result.best.labels.size() == 2);
  CHECK(predict_relation(result.best, "what is item0").relation == "onlyRelation");
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "foqa/entity_index.hpp"
#include "foqa/reach_index.hpp"
#include "oracles.hpp"

using namespace foqa;

namespace {

KnowledgeBase kb_from(const std::string& facts, const std::string& aliases) {
  std::istringstream f(facts), a(aliases);
  return load_kb(f, a);
}

KnowledgeBase gellar_kb() {
  return kb_from("e1\tbornOn\t4/14/1977\ne2\tactedIn\tSex and the City\n",
                 "e1\tSarah Michelle Gellar\ne2\tSarah Jessica Parker\n");
}

}  // namespace

TEST_CASE("alias contributes unigrams, bigrams, trigram and exact key") {
  KnowledgeBase kb = kb_from("e1\tbornOn\tv\n", "e1\tsarah michelle gellar\n");
  EntityIndex idx = EntityIndex::build(kb);
  // 3 unigrams + 2 bigrams + 1 trigram + 1 exact
  CHECK(idx.key_count() == 7);
  CHECK(idx.lookup(NGramKey::gram(2, "sarah michelle")).size() == 1);
  CHECK(idx.lookup(NGramKey::gram(2, "michelle gellar")).size() == 1);
  CHECK(idx.lookup(NGramKey::gram(3, "sarah michelle gellar")).size() == 1);
  CHECK(idx.lookup(NGramKey::exact("sarah michelle gellar")).size() == 1);
}

TEST_CASE("single-token alias: one unigram plus exact, nothing else") {
  KnowledgeBase kb = kb_from("e1\tr\tv\n", "e1\tgellar\n");
  EntityIndex idx = EntityIndex::build(kb);
  CHECK(idx.key_count() == 2);
  CHECK(idx.lookup(NGramKey::gram(1, "gellar")).size() == 1);
  CHECK(idx.lookup(NGramKey::exact("gellar")).size() == 1);
}

TEST_CASE("shared unigram links to both entities") {
  EntityIndex idx = EntityIndex::build(gellar_kb());
  const auto& postings = idx.lookup(NGramKey::gram(1, "sarah"));
  REQUIRE(postings.size() == 2);
  CHECK(postings[0].score >= postings[1].score);
}

TEST_CASE("tf-idf hand values") {
  // single-alias corpus "a b": TF(unigram a) = 1/2, IDF = ln 2
  KnowledgeBase kb = kb_from("e1\tr\tv\n", "e1\ta b\n");
  EntityIndex idx = EntityIndex::build(kb);
  const double ln2 = std::log(2.0);
  CHECK(tf_idf(NGramKey::gram(1, "a"), {"a", "b"}, idx.stats()) == doctest::Approx(ln2 / 2).epsilon(1e-12));
  CHECK(tf_idf(NGramKey::exact("a b"), {"a", "b"}, idx.stats()) == doctest::Approx(ln2).epsilon(1e-12));
  CHECK_THROWS_AS(tf_idf(NGramKey::gram(1, "zzz"), {"a", "b"}, idx.stats()), std::invalid_argument);

  // key occurring in every alias of a 10-alias corpus: IDF = ln 2
  std::string facts, aliases;
  for (int i = 0; i < 10; ++i) {
    facts += "e" + std::to_string(i) + "\tr\tv\n";
    aliases += "e" + std::to_string(i) + "\tcommon word" + std::to_string(i) + "\n";
  }
  EntityIndex idx10 = EntityIndex::build(kb_from(facts, aliases));
  CHECK(idf(NGramKey::gram(1, "common"), idx10.stats()) == doctest::Approx(ln2).epsilon(1e-12));
}

TEST_CASE("repeated n-grams fold into TF with one posting per entity") {
  KnowledgeBase kb = kb_from("e1\tr\tv\n", "e1\ta b a\n");
  EntityIndex idx = EntityIndex::build(kb);
  const auto& postings = idx.lookup(NGramKey::gram(1, "a"));
  REQUIRE(postings.size() == 1);
  // TF = 2/3, IDF = ln(1 + 1/1)
  CHECK(postings[0].score == doctest::Approx(2.0 / 3.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("unseen key gives an empty posting list") {
  EntityIndex idx = EntityIndex::build(gellar_kb());
  CHECK(idx.lookup(NGramKey::gram(1, "zzz")).empty());
  CHECK(idx.lookup(NGramKey::exact("no such alias")).empty());
}

TEST_CASE("empty aliases are skipped with a count") {
  KnowledgeBase kb = kb_from("e1\tr\tv\ne2\tr\tv\n", "e1\treal name\ne2\t...\n");
  EntityIndex idx = EntityIndex::build(kb);
  CHECK(idx.skipped_empty_aliases() == 1);
  CHECK(idx.stats().alias_count == 1);
}

TEST_CASE("lookup equals the linear-scan oracle on random KBs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 8; ++trial) {
    KnowledgeBase kb = oracle::random_kb(rng, 60 + trial * 40, 5);
    EntityIndex idx = EntityIndex::build(kb);
    // probe every key the corpus can contain, plus misses
    std::set<NGramKey> keys;
    for (EntityIdx e = 0; e < static_cast<EntityIdx>(kb.num_entities()); ++e) {
      const auto tokens = tokenize(kb.alias(e));
      for (std::uint8_t n = 1; n <= 3; ++n) {
        for (auto& k : ngram_keys(tokens, n)) keys.insert(k);
      }
      keys.insert(NGramKey::exact(kb.alias(e)));
    }
    keys.insert(NGramKey::gram(1, "nosuchtoken"));
    for (const NGramKey& key : keys) {
      const auto expected = oracle::lookup_linear(kb, key);
      const auto& got = idx.lookup(key);
      REQUIRE(got.size() == expected.size());
      for (const Posting& p : got) {
        auto it = expected.find(p.node);
        REQUIRE(it != expected.end());
        CHECK(p.score == doctest::Approx(it->second).epsilon(1e-9));
      }
      for (std::size_t i = 1; i < got.size(); ++i) {
        CHECK(got[i - 1].score >= got[i].score);  // invariant order
      }
    }
  }
}

TEST_CASE("IDF is strictly monotone in document frequency") {
  std::mt19937_64 rng(11);
  KnowledgeBase kb = oracle::random_kb(rng, 300, 4);
  EntityIndex idx = EntityIndex::build(kb);
  std::vector<std::pair<std::uint32_t, double>> samples;
  for (EntityIdx e = 0; e < 50; ++e) {
    for (auto& key : ngram_keys(tokenize(kb.alias(e)), 1)) {
      samples.emplace_back(idx.stats().df(key), idf(key, idx.stats()));
    }
  }
  for (const auto& [df1, idf1] : samples) {
    for (const auto& [df2, idf2] : samples) {
      if (df1 < df2) CHECK(idf1 > idf2);
    }
  }
}

TEST_CASE("entity index serialization round-trips byte-identically") {
  std::mt19937_64 rng(13);
  KnowledgeBase kb = oracle::random_kb(rng, 120, 4);
  EntityIndex idx = EntityIndex::build(kb);
  std::ostringstream first;
  idx.save(first);

  // rebuild from the same KB: identical dump
  EntityIndex idx2 = EntityIndex::build(kb);
  std::ostringstream second;
  idx2.save(second);
  CHECK(first.str() == second.str());

  // load then save: identical dump, identical lookups
  std::istringstream in(first.str());
  EntityIndex loaded = EntityIndex::load(in);
  std::ostringstream third;
  loaded.save(third);
  CHECK(first.str() == third.str());

  std::istringstream bad("FOQA-EIDX v0\n");
  CHECK_THROWS_AS(EntityIndex::load(bad), parse_error);
}

// --- reach index -----------------------------------------------------------

TEST_CASE("reach entries mirror the running example") {
  KnowledgeBase kb = kb_from(
      "e1\tactedIn\tThe Grudge\ne1\tbornOn\t4/14/1977\ne1\tmarriedTo\tF. Prinze\n",
      "e1\tsarah michelle gellar\n");
  ReachIndex idx = ReachIndex::build(kb);
  const EntityIdx e1 = *kb.find_entity("e1");
  REQUIRE(idx.entries(e1).size() == 3);
  const auto born = idx.reachable_via(e1, *kb.find_relation("bornOn"));
  REQUIRE(born.size() == 1);
  CHECK(born[0].text == "4/14/1977");
  CHECK(born[0].path.size() == 1);
  CHECK(idx.reachable_via(e1, 999).empty());
}

TEST_CASE("zero out-degree entity has no entries") {
  KnowledgeBase kb = kb_from("e1\tknows\t@e2\n", "e1\ta\ne2\tb\n");
  ReachIndex idx = ReachIndex::build(kb);
  CHECK(idx.entries(*kb.find_entity("e2")).empty());
}

TEST_CASE("reach index bijection and oracle equivalence on random KBs") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    KnowledgeBase kb = oracle::random_kb(rng, 100, 6);
    ReachIndex idx = ReachIndex::build(kb);
    CHECK(idx.total_entries() == kb.stats().num_facts);
    for (EntityIdx e = 0; e < static_cast<EntityIdx>(kb.num_entities()); ++e) {
      CHECK(idx.entries(e).size() == kb.facts_of(e).size());
      for (RelationIdx r = 0; r < static_cast<RelationIdx>(kb.num_relations()); ++r) {
        std::size_t expected = 0;
        for (const Fact& f : kb.facts_of(e)) {
          if (f.relation == r) ++expected;
        }
        const auto got = idx.reachable_via(e, r);
        CHECK(got.size() == expected);
        const auto& rels = kb.relations_of(e);
        const bool in_relations = std::find(rels.begin(), rels.end(), r) != rels.end();
        CHECK(got.empty() == !in_relations);
      }
      const auto entries = idx.entries(e);
      for (std::size_t i = 1; i < entries.size(); ++i) {
        const bool ordered = entries[i - 1].path[0] < entries[i].path[0] ||
                             (entries[i - 1].path[0] == entries[i].path[0] &&
                              entries[i - 1].text <= entries[i].text);
        CHECK(ordered);
      }
    }
  }
}

TEST_CASE("reach index serialization round-trips byte-identically") {
  std::mt19937_64 rng(19);
  KnowledgeBase kb = oracle::random_kb(rng, 80, 5);
  ReachIndex idx = ReachIndex::build(kb);
  std::ostringstream first;
  idx.save(first);
  std::istringstream in(first.str());
  ReachIndex loaded = ReachIndex::load(in);
  std::ostringstream second;
  loaded.save(second);
  CHECK(first.str() == second.str());

  std::istringstream bad("FOQA-RIDX v2\n");
  CHECK_THROWS_AS(ReachIndex::load(bad), parse_error);
}

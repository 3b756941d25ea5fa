#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "foqa/kb.hpp"
#include "foqa/text.hpp"

using namespace foqa;

TEST_CASE("tokenize lowercases, strips edge punctuation, collapses whitespace") {
  CHECK(tokenize("How old is Sarah Michelle Gellar?") ==
        std::vector<std::string>{"how", "old", "is", "sarah", "michelle", "gellar"});
  CHECK(tokenize("  ``sarah''   GELLAR!  ") == std::vector<std::string>{"sarah", "gellar"});
  CHECK(tokenize("4/14/1977") == std::vector<std::string>{"4/14/1977"});  // inner punct kept
  CHECK(tokenize("...") == std::vector<std::string>{});
  CHECK(normalize_text("La  Kings\t") == "la kings");
}

TEST_CASE("fnv1a64 is stable") {
  CHECK(fnv1a64("gellar") == fnv1a64("gellar"));
  CHECK(fnv1a64("gellar") != fnv1a64("parker"));
}

namespace {

KnowledgeBase kb_from(const std::string& facts, const std::string& aliases) {
  std::istringstream f(facts), a(aliases);
  return load_kb(f, a);
}

}  // namespace

TEST_CASE("running-example KB: one entity, one fact, K=1") {
  KnowledgeBase kb = kb_from("e1\tbornOn\t4/14/1977\n", "e1\tSarah Michelle Gellar\n");
  const KbStats stats = kb.stats();
  CHECK(stats.num_entities == 1);
  CHECK(stats.num_facts == 1);
  CHECK(stats.k == 1);
  const EntityIdx e = *kb.find_entity("e1");
  CHECK(kb.alias(e) == "sarah michelle gellar");
  CHECK(kb.facts()[0].object.text == "4/14/1977");
  CHECK_FALSE(kb.facts()[0].object.is_entity);
}

TEST_CASE("empty sources are rejected") {
  CHECK_THROWS_AS(kb_from("", ""), parse_error);
  CHECK_THROWS_AS(kb_from("# only a comment\n", "e1\tx\n"), parse_error);
  CHECK_THROWS_AS(kb_from("e1\tr\tv\n", "# nothing\n"), parse_error);
}

TEST_CASE("malformed lines report their line number") {
  try {
    kb_from("e1\tbornOn\t4/14/1977\ne2 missing tabs\n", "e1\tx\n");
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(kb_from("e1\tr\tv\n", "ghost\talias for unknown\n"), parse_error);
}

TEST_CASE("10 entities x 3 relations -> K=3 and 30 facts") {
  std::string facts, aliases;
  for (int e = 0; e < 10; ++e) {
    const std::string id = "e" + std::to_string(e);
    for (int r = 0; r < 3; ++r) {
      facts += id + "\trel" + std::to_string(r) + "\tval" + std::to_string(e * 3 + r) + "\n";
    }
    aliases += id + "\tname " + std::to_string(e) + "\n";
  }
  KnowledgeBase kb = kb_from(facts, aliases);
  CHECK(kb.stats().num_entities == 10);
  CHECK(kb.stats().num_facts == 30);
  CHECK(kb.stats().k == 3);
}

TEST_CASE("duplicate facts deduplicate, duplicate aliases keep the first") {
  KnowledgeBase kb = kb_from("e1\tr\tv\ne1\tr\tv\ne1\tr\tw\n", "e1\tFirst Name\ne1\tSecond Name\n");
  CHECK(kb.stats().num_facts == 2);
  CHECK(kb.alias(*kb.find_entity("e1")) == "first name");
}

TEST_CASE("object entity references join the universe and carry alias text") {
  KnowledgeBase kb = kb_from("e1\tmarriedTo\t@e2\n", "e1\tA Person\ne2\tOther Person\n");
  CHECK(kb.stats().num_entities == 2);
  const Fact& f = kb.facts()[0];
  CHECK(f.object.is_entity);
  CHECK(f.object.text == "Other Person");
}

TEST_CASE("relations_of: set semantics, empty set, unknown entity") {
  KnowledgeBase kb = kb_from("e1\tbornOn\tv1\ne1\tactedIn\tm1\ne1\tactedIn\tm2\ne1\tactedIn\tm1\n",
                             "e1\tx\n");
  const EntityIdx e1 = *kb.find_entity("e1");
  const auto& rels = kb.relations_of(e1);
  CHECK(rels.size() == 2);  // {bornOn, actedIn}
  CHECK_THROWS_AS(kb.relations_of(99), std::out_of_range);

  // an entity that only appears as an object has no outgoing facts
  KnowledgeBase kb2 = kb_from("e1\tknows\t@e2\n", "e1\ta\ne2\tb\n");
  CHECK(kb2.relations_of(*kb2.find_entity("e2")).empty());
}

TEST_CASE("load_kb is deterministic and order-independent") {
  const std::string aliases = "e1\tsarah gellar\ne2\tsarah parker\n";
  KnowledgeBase a = kb_from("e1\tr1\tx\ne2\tr2\ty\n", aliases);
  KnowledgeBase b = kb_from("e2\tr2\ty\ne1\tr1\tx\n", aliases);
  CHECK(a == b);
}

TEST_CASE("relations_of unions to the relation vocabulary") {
  KnowledgeBase kb = kb_from("e1\tr1\tx\ne2\tr2\ty\ne3\tr1\tz\n", "e1\ta\ne2\tb\ne3\tc\n");
  std::set<RelationIdx> seen;
  for (EntityIdx e = 0; e < static_cast<EntityIdx>(kb.num_entities()); ++e) {
    for (RelationIdx r : kb.relations_of(e)) seen.insert(r);
  }
  CHECK(seen.size() == kb.num_relations());
}

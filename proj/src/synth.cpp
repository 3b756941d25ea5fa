#include "foqa/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "foqa/text.hpp"

namespace foqa {

void GeneratorSpec::validate() const {
  if (num_relations < 2) throw std::invalid_argument("generator: num_relations must be >= 2");
  if (questions_count < 10) throw std::invalid_argument("generator: questions_count must be >= 10");
  if (num_entities < 4) throw std::invalid_argument("generator: num_entities must be >= 4");
  if (alias_len_min < 1 || alias_len_max < alias_len_min) {
    throw std::invalid_argument("generator: bad alias length range");
  }
  if (templates_per_relation < 3) {
    throw std::invalid_argument("generator: templates_per_relation must be >= 3");
  }
  const double sum = train_ratio + valid_ratio + test_ratio;
  if (train_ratio < 0 || valid_ratio < 0 || test_ratio < 0 || std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("generator: split ratios must be non-negative and sum to 1");
  }
  if (noise_rate < 0 || noise_rate > 0.5) {
    throw std::invalid_argument("generator: noise_rate must be within [0, 0.5]");
  }
  if (overlap_fraction < 0 || overlap_fraction > 0.5) {
    throw std::invalid_argument("generator: overlap_fraction must be within [0, 0.5]");
  }
}

namespace {

const std::vector<std::string> kFirstNames = {
    "sarah",   "michelle", "jessica", "emily",  "laura",  "nora",    "clara",  "irene",
    "maya",    "tessa",    "ruth",    "alice",  "brian",  "carlos",  "derek",  "edgar",
    "felix",   "gavin",    "hector",  "ivan",   "jonas",  "kevin",   "liam",   "marco",
    "nathan",  "oscar",    "pedro",   "quentin", "ramon",  "stefan",  "tomas",  "victor",
    "walter",  "xavier",   "yusuf",   "amara",   "bianca", "celine",  "dalia",  "elena",
    "farida",  "gloria",   "helena",  "ingrid",  "janet",  "karina",  "lidia",  "monica"};

const std::vector<std::string> kSurnames = {
    "gellar",   "parker",    "hanks",     "moreau",   "castillo", "novak",    "larsen",
    "okafor",   "tanaka",    "rossi",     "dubois",   "keller",   "vance",    "mercer",
    "holloway", "driscoll",  "whitaker",  "lennox",   "barros",   "quimby",   "sandoval",
    "riggins",  "calloway",  "ferreira",  "lindqvist", "moretti",  "nakamura", "obrien",
    "paxton",   "quintero",  "ramsey",    "silva",    "thornton", "ulrich",   "vasquez",
    "winslow",  "yamada",    "zubiri",    "ashford",  "bellamy",  "crowder",  "donovan",
    "eastman",  "fontaine",  "garrido",   "hastings", "iverson",  "jimenez",  "kowalski",
    "lambert",  "mendes",    "norwood",   "ostrander", "pellegrino", "quirke", "rowan",
    "sterling", "treadway",  "underhill", "villar",   "wexler",   "xiong",    "yarrow",
    "zamora"};

// Decoy aliases double as template filler words; they never surface as
// question subjects, so a tagger should learn them as context.
const std::vector<std::string> kTrapWords = {"galaxy",  "cinema",   "stadium", "studio",
                                             "arena",   "festival", "matinee", "jubilee",
                                             "carnival", "premiere"};

struct RelationConcept {
  const char* id;
  std::array<const char*, 3> words;
};

const std::vector<RelationConcept> kConcepts = {
    {"bornOn", {"birth", "birthday", "birthdate"}},
    {"actedIn", {"movie", "film", "picture"}},
    {"marriedTo", {"spouse", "partner", "sweetheart"}},
    {"directedBy", {"director", "filmmaker", "auteur"}},
    {"writtenBy", {"writer", "author", "scribe"}},
    {"livesIn", {"home", "residence", "hometown"}},
    {"worksAs", {"job", "profession", "occupation"}},
    {"playsFor", {"team", "club", "squad"}},
    {"sangBy", {"singer", "vocalist", "ballad"}},
    {"foundedBy", {"founder", "creator", "originator"}},
    {"capitalOf", {"capital", "metropolis", "seat"}},
    {"colorOf", {"color", "shade", "hue"}},
    {"locatedIn", {"location", "territory", "region"}},
    {"ownedBy", {"owner", "proprietor", "holder"}},
    {"speaksLang", {"language", "tongue", "dialect"}},
    {"studiedAt", {"school", "college", "university"}},
};

// {W} = relation word, {E} = entity span, {T} = decoy word. Decoy slots
// stay well away from the entity slot.
const std::vector<std::string> kFrames = {
    "who is the {W} of {E}",
    "what is the {W} of {E}",
    "tell me the {W} of {E}",
    "at the {T} show who is the {W} of {E}",
    "what {W} does {E} have",
    "i want to know the {W} of {E}",
    "for all {T} fans what is the {W} of {E}",
};

struct RelationInfo {
  std::string id;
  std::vector<std::string> words;
};

std::vector<RelationInfo> make_relations(int count) {
  std::vector<RelationInfo> relations;
  for (int r = 0; r < count; ++r) {
    RelationInfo info;
    if (r < static_cast<int>(kConcepts.size())) {
      info.id = kConcepts[r].id;
      for (const char* w : kConcepts[r].words) info.words.push_back(w);
    } else {
      info.id = "relType" + std::to_string(r);
      for (int v = 0; v < 3; ++v) {
        info.words.push_back("relword" + std::to_string(r) + static_cast<char>('a' + v));
      }
    }
    relations.push_back(std::move(info));
  }
  return relations;
}

struct EntityRow {
  std::string id;
  std::vector<std::string> alias;  // tokens
  bool trap = false;
  std::vector<int> relations;                 // relation indices with a fact
  std::vector<std::string> object_of;         // serialized object per relation index
};

std::string pad_number(int v, int width) {
  std::string s = std::to_string(v);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

}  // namespace

GeneratedData generate(const GeneratorSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  auto pick = [&rng](const auto& pool) -> const auto& {
    std::uniform_int_distribution<std::size_t> d(0, pool.size() - 1);
    return pool[d(rng)];
  };
  auto chance = [&rng](double p) {
    std::uniform_real_distribution<double> d(0.0, 1.0);
    return d(rng) < p;
  };

  const std::vector<RelationInfo> relations = make_relations(spec.num_relations);

  // --- entities and aliases -------------------------------------------------
  std::vector<EntityRow> entities;
  std::set<std::string> used_aliases;
  std::size_t overlap_pairs = 0;

  const int trap_count = std::max(2, spec.num_entities / 25);
  for (int k = 0; k < trap_count; ++k) {
    EntityRow row;
    row.id = "decoy_" + pad_number(k, 2);
    row.alias = {kTrapWords[k % kTrapWords.size()]};
    row.trap = true;
    if (!used_aliases.insert(join_tokens(row.alias)).second) continue;
    entities.push_back(std::move(row));
  }

  const int regular_count = spec.num_entities;
  std::uniform_int_distribution<int> len_dist(spec.alias_len_min, spec.alias_len_max);
  for (int k = 0; k < regular_count; ++k) {
    EntityRow row;
    row.id = "ent_" + pad_number(k, 4);
    const bool near_duplicate = !entities.empty() && chance(spec.overlap_fraction);
    for (int attempt = 0; attempt < 64; ++attempt) {
      row.alias.clear();
      if (near_duplicate && attempt < 8) {
        const EntityRow& base = entities[std::uniform_int_distribution<std::size_t>(
            0, entities.size() - 1)(rng)];
        if (base.trap) continue;
        row.alias = base.alias;
        row.alias.push_back("ii");
      } else {
        const int len = len_dist(rng);
        if (len == 1) {
          row.alias = {pick(kSurnames)};
        } else if (len == 2) {
          row.alias = {pick(kFirstNames), pick(kSurnames)};
        } else {
          row.alias = {pick(kFirstNames), pick(kFirstNames), pick(kSurnames)};
        }
      }
      if (used_aliases.insert(join_tokens(row.alias)).second) break;
      row.alias.clear();
    }
    if (row.alias.empty()) {
      // Pool exhausted for short names; force uniqueness with a numbered tail.
      row.alias = {pick(kFirstNames), pick(kSurnames), "x" + std::to_string(k)};
      used_aliases.insert(join_tokens(row.alias));
    }
    if (row.alias.size() >= 2 && row.alias.back() == "ii") ++overlap_pairs;
    entities.push_back(std::move(row));
  }

  // --- facts -----------------------------------------------------------------
  auto make_literal = [&rng]() {
    std::uniform_int_distribution<int> month(1, 12), day(1, 28), year(1900, 2020);
    return std::to_string(month(rng)) + "/" + std::to_string(day(rng)) + "/" +
           std::to_string(year(rng));
  };
  const int max_rels_per_entity = std::min(spec.num_relations, 8);
  std::uniform_int_distribution<int> rel_count_dist(std::min(3, max_rels_per_entity),
                                                    max_rels_per_entity);
  for (EntityRow& row : entities) {
    std::vector<int> order(spec.num_relations);
    for (int r = 0; r < spec.num_relations; ++r) order[r] = r;
    std::shuffle(order.begin(), order.end(), rng);
    const int count = row.trap ? spec.num_relations : rel_count_dist(rng);
    row.relations.assign(order.begin(), order.begin() + count);
    std::sort(row.relations.begin(), row.relations.end());
    row.object_of.resize(spec.num_relations);
    for (int r : row.relations) {
      if (chance(0.2)) {
        const EntityRow& target = entities[std::uniform_int_distribution<std::size_t>(
            0, entities.size() - 1)(rng)];
        row.object_of[r] = "@" + target.id;
      } else {
        row.object_of[r] = make_literal();
      }
    }
  }

  GeneratedData data;
  data.spec = spec;
  data.overlap_pairs = overlap_pairs;
  data.trap_entities = static_cast<std::size_t>(trap_count);
  for (const EntityRow& row : entities) {
    data.alias_lines.push_back(row.id + "\t" + join_tokens(row.alias));
    for (int r : row.relations) {
      data.fact_lines.push_back(row.id + "\t" + relations[r].id + "\t" + row.object_of[r]);
    }
  }

  // --- question combos --------------------------------------------------------
  struct Combo {
    std::size_t entity;
    int relation;
    int template_idx;
  };
  std::vector<Combo> combos;
  for (std::size_t e = 0; e < entities.size(); ++e) {
    if (entities[e].trap) continue;
    for (int r : entities[e].relations) {
      for (int t = 0; t < spec.templates_per_relation; ++t) combos.push_back({e, r, t});
    }
  }
  if (static_cast<int>(combos.size()) < spec.questions_count) {
    throw std::invalid_argument(
        "generator: infeasible spec, only " + std::to_string(combos.size()) +
        " template-entity combinations for " + std::to_string(spec.questions_count) +
        " questions");
  }
  std::shuffle(combos.begin(), combos.end(), rng);

  struct QuestionRow {
    AnnotatedQuestion annotated;
    TaggedQuestion tagged;
    LabeledQuestion labeled;
  };
  std::vector<QuestionRow> questions;
  std::set<std::string> used_questions;
  for (const Combo& combo : combos) {
    if (static_cast<int>(questions.size()) >= spec.questions_count) break;
    const EntityRow& entity = entities[combo.entity];
    const RelationInfo& relation = relations[combo.relation];
    const std::string& frame = kFrames[combo.template_idx % kFrames.size()];
    const std::string& word = relation.words[combo.template_idx % relation.words.size()];

    std::vector<std::string> entity_tokens = entity.alias;
    if (entity_tokens.size() >= 2 && chance(spec.noise_rate)) {
      const std::size_t drop =
          std::uniform_int_distribution<std::size_t>(0, entity_tokens.size() - 1)(rng);
      entity_tokens.erase(entity_tokens.begin() + drop);
    }

    std::vector<std::string> tokens;
    std::vector<int> tags;
    std::istringstream frame_stream(frame);
    std::string frame_token;
    while (frame_stream >> frame_token) {
      if (frame_token == "{W}") {
        tokens.push_back(word);
        tags.push_back(kTagC);
      } else if (frame_token == "{T}") {
        tokens.push_back(pick(kTrapWords));
        tags.push_back(kTagC);
      } else if (frame_token == "{E}") {
        for (const std::string& tok : entity_tokens) {
          tokens.push_back(tok);
          tags.push_back(kTagE);
        }
      } else {
        tokens.push_back(frame_token);
        tags.push_back(kTagC);
      }
    }
    const std::string question = join_tokens(tokens);
    if (!used_questions.insert(question).second) continue;

    QuestionRow row;
    row.annotated = {entity.id, relation.id, entity.object_of[combo.relation], question};
    row.tagged = {tokens, tags};
    row.labeled = {tokens, relation.id};
    questions.push_back(std::move(row));
  }
  if (static_cast<int>(questions.size()) < spec.questions_count) {
    throw std::invalid_argument("generator: could not realize enough distinct questions");
  }

  const std::size_t total = questions.size();
  const std::size_t train_n = static_cast<std::size_t>(std::llround(total * spec.train_ratio));
  const std::size_t valid_n = static_cast<std::size_t>(std::llround(total * spec.valid_ratio));
  auto emit = [&questions](GeneratedSplit& split, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end && i < questions.size(); ++i) {
      split.annotated.push_back(questions[i].annotated);
      split.tagged.push_back(questions[i].tagged);
      split.labeled.push_back(questions[i].labeled);
    }
  };
  emit(data.train, 0, train_n);
  emit(data.valid, train_n, train_n + valid_n);
  emit(data.test, train_n + valid_n, total);
  return data;
}

std::string GeneratedData::manifest_json() const {
  nlohmann::json j;
  j["seed"] = spec.seed;
  j["spec"] = {{"num_entities", spec.num_entities},
               {"num_relations", spec.num_relations},
               {"alias_len_min", spec.alias_len_min},
               {"alias_len_max", spec.alias_len_max},
               {"templates_per_relation", spec.templates_per_relation},
               {"questions_count", spec.questions_count},
               {"ratios", {spec.train_ratio, spec.valid_ratio, spec.test_ratio}},
               {"noise_rate", spec.noise_rate},
               {"overlap_fraction", spec.overlap_fraction}};
  j["facts"] = fact_lines.size();
  j["aliases"] = alias_lines.size();
  j["questions"] = {{"train", train.annotated.size()},
                    {"valid", valid.annotated.size()},
                    {"test", test.annotated.size()}};
  j["overlap_pairs"] = overlap_pairs;
  j["trap_entities"] = trap_entities;
  return j.dump(2);
}

void write_generated(const GeneratedData& data, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto write_lines = [&dir](const std::string& name, const std::vector<std::string>& lines) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + name + " under " + dir);
    for (const auto& line : lines) out << line << '\n';
  };
  write_lines("facts.tsv", data.fact_lines);
  write_lines("aliases.tsv", data.alias_lines);

  auto write_split = [&dir](const std::string& name, const GeneratedSplit& split) {
    namespace fs = std::filesystem;
    {
      std::ofstream out(fs::path(dir) / (name + ".tsv"), std::ios::binary);
      write_annotated_file(out, split.annotated);
    }
    {
      std::ofstream out(fs::path(dir) / ("tagger_" + name + ".tsv"), std::ios::binary);
      write_tagged_file(out, split.tagged);
    }
    {
      std::ofstream out(fs::path(dir) / ("classifier_" + name + ".tsv"), std::ios::binary);
      write_labeled_file(out, split.labeled);
    }
  };
  write_split("train", data.train);
  write_split("valid", data.valid);
  write_split("test", data.test);

  std::ofstream manifest(fs::path(dir) / "manifest.json", std::ios::binary);
  manifest << data.manifest_json() << "\n";
}

}  // namespace foqa

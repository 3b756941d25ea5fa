#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "foqa/datasets.hpp"

namespace foqa {

// Desk-scale stand-in for a large QA corpus: a deterministic KB plus
// templated questions with gold tags, entities and relations.
struct GeneratorSpec {
  std::uint64_t seed = 1;
  int num_entities = 200;
  int num_relations = 12;
  int alias_len_min = 1;
  int alias_len_max = 3;
  int templates_per_relation = 4;
  int questions_count = 2000;
  double train_ratio = 0.8;
  double valid_ratio = 0.1;
  double test_ratio = 0.1;
  // Fraction of questions whose entity text drops one alias token.
  double noise_rate = 0.1;
  // Fraction of entities cloned as near-duplicate "X" / "X ii" aliases.
  double overlap_fraction = 0.1;

  void validate() const;
};

struct GeneratedSplit {
  std::vector<AnnotatedQuestion> annotated;
  std::vector<TaggedQuestion> tagged;
  std::vector<LabeledQuestion> labeled;
};

struct GeneratedData {
  GeneratorSpec spec;
  std::vector<std::string> fact_lines;
  std::vector<std::string> alias_lines;
  GeneratedSplit train, valid, test;
  std::size_t overlap_pairs = 0;   // "X"/"X ii" alias pairs
  std::size_t trap_entities = 0;   // decoy entities referenced by templates
  std::string manifest_json() const;
};

// Pure function of the spec: the same spec always yields byte-identical
// files. Throws when the spec cannot supply `questions_count` distinct
// questions.
GeneratedData generate(const GeneratorSpec& spec);

// facts.tsv, aliases.tsv, {train,valid,test}.tsv (annotated),
// tagger_*.tsv, classifier_*.tsv, manifest.json
void write_generated(const GeneratedData& data, const std::string& dir);

}  // namespace foqa

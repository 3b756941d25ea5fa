#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "foqa/kb.hpp"

namespace foqa {

// Tag alphabet for entity detection. Stored as ints so they double as class
// indices: C = 0, E = 1.
inline constexpr int kTagC = 0;
inline constexpr int kTagE = 1;

struct TaggedQuestion {
  std::vector<std::string> tokens;  // normalized
  std::vector<int> tags;            // aligned, {C,E}
};

struct LabeledQuestion {
  std::vector<std::string> tokens;  // normalized
  std::string relation;
};

// `subject<TAB>relation<TAB>object<TAB>question text` (SimpleQuestions-style).
struct AnnotatedQuestion {
  std::string subject;
  std::string relation;
  std::string object;  // `@entity` or literal, as in the facts file
  std::string question;
};

// Tagger training format: `question text<TAB>tag string`, tag string
// space-separated E/C aligned with the normalized question tokens.
std::vector<TaggedQuestion> read_tagged_file(std::istream& in, const std::string& name);
std::vector<TaggedQuestion> read_tagged_file(const std::string& path);
void write_tagged_file(std::ostream& out, const std::vector<TaggedQuestion>& rows);

// Classifier training format: `question text<TAB>relation_id`.
std::vector<LabeledQuestion> read_labeled_file(std::istream& in, const std::string& name);
std::vector<LabeledQuestion> read_labeled_file(const std::string& path);
void write_labeled_file(std::ostream& out, const std::vector<LabeledQuestion>& rows);

std::vector<AnnotatedQuestion> read_annotated_file(std::istream& in, const std::string& name);
std::vector<AnnotatedQuestion> read_annotated_file(const std::string& path);
void write_annotated_file(std::ostream& out, const std::vector<AnnotatedQuestion>& rows);

// Induces E/C tags by locating the subject's alias inside the question:
// the longest contiguous run of alias tokens found in the question wins.
// Rows where nothing matches are skipped and counted.
struct TagConversion {
  std::vector<TaggedQuestion> rows;
  std::size_t skipped = 0;
};
TagConversion annotated_to_tagged(const std::vector<AnnotatedQuestion>& annotated,
                                  const KnowledgeBase& kb);

std::vector<LabeledQuestion> annotated_to_labeled(const std::vector<AnnotatedQuestion>& annotated);

}  // namespace foqa

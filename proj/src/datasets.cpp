#include "foqa/datasets.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "foqa/text.hpp"

namespace foqa {

namespace {

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open file: " + path);
  return in;
}

std::vector<std::string> fields_of(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r') {
    fields.back().pop_back();
  }
  return fields;
}

}  // namespace

std::vector<TaggedQuestion> read_tagged_file(std::istream& in, const std::string& name) {
  std::vector<TaggedQuestion> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto fields = fields_of(line);
    if (fields.size() != 2) {
      throw parse_error(name + " line " + std::to_string(line_no) +
                        ": expected question<TAB>tags");
    }
    TaggedQuestion row;
    row.tokens = tokenize(fields[0]);
    std::istringstream tags(fields[1]);
    std::string tag;
    while (tags >> tag) {
      if (tag == "E") {
        row.tags.push_back(kTagE);
      } else if (tag == "C") {
        row.tags.push_back(kTagC);
      } else {
        throw parse_error(name + " line " + std::to_string(line_no) + ": unknown tag '" + tag + "'");
      }
    }
    if (row.tokens.size() != row.tags.size()) {
      throw parse_error(name + " line " + std::to_string(line_no) + ": " +
                        std::to_string(row.tokens.size()) + " tokens vs " +
                        std::to_string(row.tags.size()) + " tags");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<TaggedQuestion> read_tagged_file(const std::string& path) {
  auto in = open_or_throw(path);
  return read_tagged_file(in, path);
}

void write_tagged_file(std::ostream& out, const std::vector<TaggedQuestion>& rows) {
  for (const auto& row : rows) {
    out << join_tokens(row.tokens) << '\t';
    for (std::size_t i = 0; i < row.tags.size(); ++i) {
      if (i) out << ' ';
      out << (row.tags[i] == kTagE ? 'E' : 'C');
    }
    out << '\n';
  }
}

std::vector<LabeledQuestion> read_labeled_file(std::istream& in, const std::string& name) {
  std::vector<LabeledQuestion> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto fields = fields_of(line);
    if (fields.size() != 2 || fields[1].empty()) {
      throw parse_error(name + " line " + std::to_string(line_no) +
                        ": expected question<TAB>relation_id");
    }
    rows.push_back(LabeledQuestion{tokenize(fields[0]), fields[1]});
  }
  return rows;
}

std::vector<LabeledQuestion> read_labeled_file(const std::string& path) {
  auto in = open_or_throw(path);
  return read_labeled_file(in, path);
}

void write_labeled_file(std::ostream& out, const std::vector<LabeledQuestion>& rows) {
  for (const auto& row : rows) out << join_tokens(row.tokens) << '\t' << row.relation << '\n';
}

std::vector<AnnotatedQuestion> read_annotated_file(std::istream& in, const std::string& name) {
  std::vector<AnnotatedQuestion> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto fields = fields_of(line);
    if (fields.size() != 4 || fields[0].empty() || fields[1].empty() || fields[3].empty()) {
      throw parse_error(name + " line " + std::to_string(line_no) +
                        ": expected subject<TAB>relation<TAB>object<TAB>question");
    }
    rows.push_back(AnnotatedQuestion{fields[0], fields[1], fields[2], fields[3]});
  }
  return rows;
}

std::vector<AnnotatedQuestion> read_annotated_file(const std::string& path) {
  auto in = open_or_throw(path);
  return read_annotated_file(in, path);
}

void write_annotated_file(std::ostream& out, const std::vector<AnnotatedQuestion>& rows) {
  for (const auto& row : rows) {
    out << row.subject << '\t' << row.relation << '\t' << row.object << '\t' << row.question
        << '\n';
  }
}

TagConversion annotated_to_tagged(const std::vector<AnnotatedQuestion>& annotated,
                                  const KnowledgeBase& kb) {
  TagConversion result;
  for (const auto& row : annotated) {
    auto entity = kb.find_entity(row.subject);
    if (!entity) {
      ++result.skipped;
      continue;
    }
    auto question = tokenize(row.question);
    auto alias = tokenize(kb.alias(*entity));
    if (question.empty() || alias.empty()) {
      ++result.skipped;
      continue;
    }
    // Longest alias sub-span that occurs contiguously in the question.
    std::size_t best_len = 0, best_pos = 0;
    for (std::size_t len = alias.size(); len >= 1 && best_len == 0; --len) {
      for (std::size_t a = 0; a + len <= alias.size() && best_len == 0; ++a) {
        for (std::size_t q = 0; q + len <= question.size(); ++q) {
          bool match = true;
          for (std::size_t j = 0; j < len; ++j) {
            if (question[q + j] != alias[a + j]) {
              match = false;
              break;
            }
          }
          if (match) {
            best_len = len;
            best_pos = q;
            break;
          }
        }
      }
    }
    if (best_len == 0) {
      ++result.skipped;
      continue;
    }
    TaggedQuestion tagged;
    tagged.tokens = std::move(question);
    tagged.tags.assign(tagged.tokens.size(), kTagC);
    for (std::size_t j = 0; j < best_len; ++j) tagged.tags[best_pos + j] = kTagE;
    result.rows.push_back(std::move(tagged));
  }
  return result;
}

std::vector<LabeledQuestion> annotated_to_labeled(const std::vector<AnnotatedQuestion>& annotated) {
  std::vector<LabeledQuestion> rows;
  rows.reserve(annotated.size());
  for (const auto& row : annotated) rows.push_back({tokenize(row.question), row.relation});
  return rows;
}

}  // namespace foqa

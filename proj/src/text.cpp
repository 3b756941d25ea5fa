#include "foqa/text.hpp"

#include <cctype>

namespace foqa {

namespace {

bool is_space_byte(unsigned char c) { return std::isspace(c) != 0; }
bool is_punct_byte(unsigned char c) { return c < 0x80 && std::ispunct(c) != 0; }

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space_byte(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t begin = i;
    while (i < text.size() && !is_space_byte(static_cast<unsigned char>(text[i]))) ++i;
    if (i == begin) break;
    std::size_t end = i;
    while (begin < end && is_punct_byte(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && is_punct_byte(static_cast<unsigned char>(text[end - 1]))) --end;
    if (begin == end) continue;
    std::string tok(text.substr(begin, end - begin));
    for (char& c : tok) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::string normalize_text(std::string_view text) { return join_tokens(tokenize(text)); }

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace foqa

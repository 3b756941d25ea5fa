#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace foqa {

// Lowercases ASCII letters, strips leading/trailing punctuation per token,
// collapses whitespace. Tokens that are punctuation-only disappear.
// Bytes outside ASCII pass through untouched.
std::vector<std::string> tokenize(std::string_view text);

// Tokenized form joined with single spaces.
std::string normalize_text(std::string_view text);

std::string join_tokens(const std::vector<std::string>& tokens);

// FNV-1a, used wherever a stable cross-run hash is needed (OOV rows,
// label-space fingerprints). Never std::hash: its value is unspecified.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 14695981039346656037ull);

}  // namespace foqa

// Small text helpers used across modules: whitespace tokenization,
// normalization for substring checks, and sentence-segment splitting.
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace atoss::text {

std::string lower(std::string_view s);

// Lowercase, collapse whitespace runs to single spaces, trim both ends.
// Dataset tokenization inserts spaces around punctuation; comparing in this
// normalized space avoids false mismatches.
std::string normalize_ws(std::string_view s);

std::vector<std::string> tokens(std::string_view s);

// True when `needle` occurs in `hay` after normalize_ws on both sides.
bool contains_normalized(std::string_view hay, std::string_view needle);

// Split at sentence-final punctuation ('.', '!', '?') followed by a space or
// end of string. The punctuation stays with its segment; empty segments are
// dropped.
std::vector<std::string> segments(std::string_view s);

bool is_stopword(std::string_view token);

// Whitespace tokens, lowercased, minus stopwords and punctuation-only tokens.
std::vector<std::string> content_tokens(std::string_view s);

}  // namespace atoss::text

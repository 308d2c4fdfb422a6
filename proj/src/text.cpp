#include "atoss/text.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace atoss::text {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string normalize_ws(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_ws = true;  // leading whitespace is dropped
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!in_ws) out.push_back(' ');
      in_ws = true;
    } else {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      in_ws = false;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::vector<std::string> tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) {
        out.push_back(cur);
        cur.clear();
      }
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

bool contains_normalized(std::string_view hay, std::string_view needle) {
  return normalize_ws(hay).find(normalize_ws(needle)) != std::string::npos;
}

std::vector<std::string> segments(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    cur.push_back(c);
    bool final_punct = (c == '.' || c == '!' || c == '?');
    bool at_boundary = final_punct && (i + 1 == s.size() || s[i + 1] == ' ');
    if (at_boundary) {
      while (!cur.empty() && cur.front() == ' ') cur.erase(cur.begin());
      while (!cur.empty() && cur.back() == ' ') cur.pop_back();
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    }
  }
  while (!cur.empty() && cur.front() == ' ') cur.erase(cur.begin());
  while (!cur.empty() && cur.back() == ' ') cur.pop_back();
  if (!cur.empty()) out.push_back(cur);
  return out;
}

bool is_stopword(std::string_view token) {
  static const std::unordered_set<std::string> kStop = {
      "a",   "an",  "and", "are", "as",  "at",   "be",  "but",  "by",  "for",
      "if",  "in",  "is",  "it",  "its", "of",   "on",  "or",   "s",   "so",
      "t",   "the", "to",  "was", "were", "with", "this", "that", "i",  "m",
      "ve",  "re",  "my",  "we",  "our", "you",  "they", "he",  "she", "had",
      "has", "have"};
  return kStop.count(std::string(token)) > 0;
}

std::vector<std::string> content_tokens(std::string_view s) {
  std::vector<std::string> out;
  for (auto& tok : tokens(lower(s))) {
    bool has_alnum = std::any_of(tok.begin(), tok.end(), [](unsigned char c) {
      return std::isalnum(c);
    });
    if (!has_alnum) continue;
    if (is_stopword(tok)) continue;
    out.push_back(tok);
  }
  return out;
}

}  // namespace atoss::text

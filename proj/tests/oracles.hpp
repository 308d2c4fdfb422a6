// Test-only independent oracles. These deliberately avoid the library's
// implementation paths: brute-force matching, full-matrix edit distance,
// direct triplet scoring. Frozen expected values in the test files were
// computed with these.
#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "atoss/core.hpp"

namespace oracle {

using atoss::core::AnnotatedExample;
using atoss::core::Polarity;
using atoss::core::Quadruplet;

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Brute-force exact matching: deduplicate by linear scans, count matches by
// pairwise comparison with used-flags.
inline Prf brute_force_f1(const std::vector<Quadruplet>& predicted,
                          const std::vector<Quadruplet>& gold) {
  std::vector<Quadruplet> p, g;
  for (const auto& q : predicted)
    if (std::find(p.begin(), p.end(), q) == p.end()) p.push_back(q);
  for (const auto& q : gold)
    if (std::find(g.begin(), g.end(), q) == g.end()) g.push_back(q);

  std::vector<bool> used(g.size(), false);
  int matched = 0;
  for (const auto& q : p) {
    for (size_t j = 0; j < g.size(); ++j) {
      if (!used[j] && g[j] == q) {
        used[j] = true;
        ++matched;
        break;
      }
    }
  }
  Prf r;
  r.precision = p.empty() ? 0.0 : double(matched) / double(p.size());
  r.recall = g.empty() ? 0.0 : double(matched) / double(g.size());
  r.f1 = (r.precision + r.recall) == 0.0
             ? 0.0
             : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

// Corpus micro counts by summing per-example brute-force counts.
struct MicroCounts {
  long long matched = 0, predicted = 0, gold = 0;
};

inline MicroCounts brute_force_micro(
    const std::map<std::string, std::vector<Quadruplet>>& predictions,
    const std::vector<AnnotatedExample>& golds) {
  MicroCounts c;
  for (const auto& ex : golds) {
    std::vector<Quadruplet> p, g;
    for (const auto& q : predictions.at(ex.id))
      if (std::find(p.begin(), p.end(), q) == p.end()) p.push_back(q);
    for (const auto& q : ex.quads)
      if (std::find(g.begin(), g.end(), q) == g.end()) g.push_back(q);
    std::vector<bool> used(g.size(), false);
    for (const auto& q : p) {
      for (size_t j = 0; j < g.size(); ++j) {
        if (!used[j] && g[j] == q) {
          used[j] = true;
          ++c.matched;
          break;
        }
      }
    }
    c.predicted += (long long)p.size();
    c.gold += (long long)g.size();
  }
  return c;
}

// Full-matrix Levenshtein over whitespace tokens (the library uses a
// two-row rolling version).
inline double edit_similarity(const std::string& a, const std::string& b) {
  auto tokenize = [](const std::string& s) {
    std::vector<std::string> t;
    std::string cur;
    for (char c : s) {
      if (c == ' ' || c == '\t' || c == '\n') {
        if (!cur.empty()) t.push_back(cur), cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) t.push_back(cur);
    return t;
  };
  auto ta = tokenize(a), tb = tokenize(b);
  size_t n = ta.size(), m = tb.size();
  if (n == 0 && m == 0) return 1.0;
  std::vector<std::vector<size_t>> dp(n + 1, std::vector<size_t>(m + 1, 0));
  for (size_t i = 0; i <= n; ++i) dp[i][0] = i;
  for (size_t j = 0; j <= m; ++j) dp[0][j] = j;
  for (size_t i = 1; i <= n; ++i)
    for (size_t j = 1; j <= m; ++j)
      dp[i][j] = std::min({dp[i - 1][j] + 1, dp[i][j - 1] + 1,
                           dp[i - 1][j - 1] + (ta[i - 1] == tb[j - 1] ? 0 : 1)});
  return 1.0 - double(dp[n][m]) / double(std::max(n, m));
}

// Random small quad sets for metric fuzzing. A tiny term pool keeps
// collision (= matching) rates high.
inline Quadruplet random_quad(std::mt19937_64& rng) {
  static const char* kAspects[] = {"null", "pizza", "service", "decor", "wine"};
  static const char* kCategories[] = {"food quality", "service general",
                                      "ambience general"};
  static const char* kOpinions[] = {"null", "great", "bad", "bland", "warm"};
  Quadruplet q;
  q.aspect_term = kAspects[rng() % 5];
  q.aspect_category = kCategories[rng() % 3];
  q.polarity = static_cast<Polarity>(rng() % 3);
  q.opinion_term = kOpinions[rng() % 5];
  return q;
}

}  // namespace oracle

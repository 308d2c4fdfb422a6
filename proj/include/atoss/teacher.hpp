// Teacher-side candidate machinery: prompt rendering, candidate generation
// through a completion client, aspect-oriented criteria scoring, and top-K
// filtering.
#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <utility>
#include <vector>

#include "atoss/core.hpp"
#include "atoss/llm.hpp"

namespace atoss::teacher {

enum class Origin { zero_shot, few_shot, beam };

std::string to_string(Origin o);
Origin origin_from_string(std::string_view s);

struct SplitCandidate {
  std::string source_id;
  std::string text;
  std::vector<std::string> segments;  // derived from text
  Origin origin = Origin::zero_shot;
  double criteria_score = 0.0;
};

// Builds a candidate with segments derived from the text.
SplitCandidate make_candidate(std::string source_id, std::string text,
                              Origin origin);

struct FilterConfig {
  int k = 2;
  int n_candidates = 10;

  void validate() const;  // 1 <= k <= n_candidates
};

enum class PromptMode { zero_shot, few_shot };

// (example, gold split) demonstration pair for few-shot prompting.
using Demo = std::pair<core::AnnotatedExample, std::string>;

// The three worked demonstrations shipped with the few-shot prompt.
const std::vector<Demo>& default_demos();

// Renders gold quads the way the prompt's examples do:
// [['at', 'ac', 'sp', 'ot'], ...].
std::string render_quads(const std::vector<core::Quadruplet>& quads);

// Zero-shot: task description + target block. Few-shot: task description +
// enumerated demonstrations + target block; requires non-empty demos.
std::string render_prompt(PromptMode mode, const core::AnnotatedExample& example,
                          const std::vector<Demo>& demos = {});

// Exactly config.n_candidates candidates, duplicates preserved, scores
// filled in via score_candidate.
std::vector<SplitCandidate> generate_candidates(
    llm::CompletionClient& client, const core::AnnotatedExample& example,
    PromptMode mode, const FilterConfig& config, double temperature = 1.0,
    const std::vector<Demo>& demos = {});

// Mean of four subscores in [0,1]:
//  (a) fraction of distinct non-NULL gold aspect terms found in exactly one
//      segment,
//  (b) fraction of distinct non-NULL gold opinion terms found in some
//      segment,
//  (c) fraction of the original sentence's content tokens retained,
//  (d) 1 when segment count <= quad count, else quad/segment ratio.
// All-NULL aspect (resp. opinion) sets score 1 on (a) (resp. (b)).
double score_candidate(const SplitCandidate& candidate,
                       const core::AnnotatedExample& example);

// Deduplicates by exact text, sorts by score desc (ties: fewer segments,
// then lexicographic text), returns at most k. Throws NoCandidates on empty
// input.
std::vector<SplitCandidate> filter_top_k(std::vector<SplitCandidate> candidates,
                                         const core::AnnotatedExample& example,
                                         const FilterConfig& config);

void to_json(nlohmann::json& j, const SplitCandidate& c);
void from_json(const nlohmann::json& j, SplitCandidate& c);

}  // namespace atoss::teacher

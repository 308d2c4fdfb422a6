// Plug-and-play inference and the metric suite: corpus micro P/R/F1 with
// per-complexity breakdown, aspect-level F1, oracle-voting curves, and
// cross-task triplet projection.
#pragma once

#include <nlohmann/json.hpp>

#include <map>
#include <string>
#include <vector>

#include "atoss/complexity.hpp"
#include "atoss/core.hpp"
#include "atoss/preference.hpp"
#include "atoss/seq_model.hpp"
#include "atoss/teacher.hpp"

namespace atoss::eval {

using Predictions = std::map<std::string, std::vector<core::Quadruplet>>;

struct SubsetScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int64_t matched = 0;
  int64_t predicted = 0;
  int64_t gold = 0;
  int64_t n_examples = 0;
};

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::map<complexity::ComplexityLabel, SubsetScores> per_complexity;
  double aspect_f1 = 0.0;
  int64_t n_examples = 0;
  int64_t matched = 0;
  int64_t predicted = 0;
  int64_t gold = 0;
};

nlohmann::json report_to_json(const EvalReport& report);

struct PlugAndPlayOptions {
  // When set, each split segment goes to the backend separately and the
  // predictions are unioned; default feeds the whole split string at once.
  bool per_segment_union = false;
  int beam_width = 1;
};

// Gate via complexity.classify (simple sentences pass through verbatim),
// split with the model, feed the result to the backend, deduplicate. A null
// splitter is the identity splitter. `used_text`, when given, receives the
// text actually fed to the backend.
std::vector<core::Quadruplet> plug_and_play_predict(
    const model::SeqModel* splitter, pref::AbsaBackend& backend,
    const core::AnnotatedExample& example, const PlugAndPlayOptions& opts = {},
    std::string* used_text = nullptr);

// Micro-averaged over quad instances across the corpus; per-complexity
// subsets by the gold example's label. Throws IdMismatch when the id sets
// differ.
EvalReport evaluate(const Predictions& predictions,
                    const std::vector<core::AnnotatedExample>& golds);

// Projects every quad onto its aspect term (NULL included), deduplicates per
// example, micro-F1 over aspect-term sets.
double aspect_level_f1(const Predictions& predictions,
                       const std::vector<core::AnnotatedExample>& golds);

struct OracleCurve {
  std::vector<std::pair<int, double>> points;  // (num_candidates, best f1)
  std::string pool_name;
};

// Point m: best backend sentence-F1 over {original} plus the first m
// candidate texts. m=0 is the no-split baseline; keeping the original in the
// pool makes the curve non-decreasing.
OracleCurve oracle_vote(const core::AnnotatedExample& example,
                        const std::vector<teacher::SplitCandidate>& candidates,
                        pref::AbsaBackend& backend, int max_m);

// Mean of per-example oracle curves over a corpus.
OracleCurve corpus_oracle_curve(
    const std::vector<core::AnnotatedExample>& examples,
    const std::map<std::string, std::vector<teacher::SplitCandidate>>&
        candidates,
    pref::AbsaBackend& backend, int max_m);

// TASD keeps (at, ac, sp); ASTE keeps (at, ot, sp); deduplicates after
// projection. The dropped field is cleared in the returned quads.
std::vector<core::Quadruplet> project_to_triplet(
    const std::vector<core::Quadruplet>& quads, core::Task target_task);

}  // namespace atoss::eval

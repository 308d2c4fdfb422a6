// Preference-pair construction from ABSA-model feedback and DPO alignment
// against a frozen reference splitter.
#pragma once

#include <nlohmann/json.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "atoss/core.hpp"
#include "atoss/seq_model.hpp"
#include "atoss/teacher.hpp"

namespace atoss::pref {

class AbsaBackend {
 public:
  virtual ~AbsaBackend() = default;
  // Deterministic for a fixed configuration; predicted terms are substrings
  // of the input text or NULL.
  virtual std::vector<core::Quadruplet> predict(const std::string& text,
                                                core::Task task) = 0;
  virtual std::string name() const = 0;
};

// Memoizes predictions per (text, task); the wrapped backend is consulted at
// most once per key even under concurrent callers.
class MemoBackend : public AbsaBackend {
 public:
  explicit MemoBackend(AbsaBackend& inner) : inner_(inner) {}
  std::vector<core::Quadruplet> predict(const std::string& text,
                                        core::Task task) override;
  std::string name() const override { return inner_.name(); }

 private:
  AbsaBackend& inner_;
  std::mutex mu_;
  std::map<std::pair<std::string, int>, std::vector<core::Quadruplet>> cache_;
};

struct F1Result {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Exact-match set semantics after dedup: precision |P∩G|/|P| (0 when P
// empty), recall |P∩G|/|G| (0 when G empty), harmonic-mean F1 (0 when
// p+r == 0).
F1Result sentence_f1(const std::vector<core::Quadruplet>& predicted,
                     const std::vector<core::Quadruplet>& gold);

// 1 - (token-level edit distance / max token count); symmetric, 1.0 iff the
// token sequences are equal.
double similarity(const std::string& a, const std::string& b);

struct PreferencePair {
  std::string id;
  std::string source;
  std::string preferred;
  std::string dispreferred;
  double f1_original = 0.0;
  double f1_candidate = 0.0;
};

void to_json(nlohmann::json& j, const PreferencePair& p);
void from_json(const nlohmann::json& j, PreferencePair& p);

// Preferred side per the alignment rules: Simple inputs keep candidates whose
// segment count equals the quad count; Compound inputs compare backend
// sentence-F1 on the original vs each candidate.
std::vector<std::string> select_preferred(
    const core::AnnotatedExample& example,
    const std::vector<teacher::SplitCandidate>& candidates,
    AbsaBackend& backend);

// Dispreferred side drawn from the splitter's own beams. The original
// sentence is never selected as dispreferred. Similarity ties break
// lexicographically on candidate text.
std::vector<std::string> select_dispreferred(
    const core::AnnotatedExample& example,
    const std::vector<teacher::SplitCandidate>& beams, AbsaBackend& backend);

// Cartesian preferred x dispreferred per example, dropping equal-text pairs.
std::vector<PreferencePair> build_pairs(
    const std::vector<core::AnnotatedExample>& examples,
    const std::map<std::string, std::vector<teacher::SplitCandidate>>& few_shot,
    const std::map<std::string, std::vector<teacher::SplitCandidate>>& beams,
    AbsaBackend& backend);

struct DpoConfig {
  double beta = 0.1;
  int batch = 8;
  int epochs = 1;
  double learning_rate = 1e-4;
  std::string loss_kind = "sigmoid";

  void validate() const;  // beta > 0 (0 allowed only for diagnostics)
};

// -log sigmoid(beta * [(log pi*(p+|s) - log ref(p+|s))
//                      - (log pi*(p-|s) - log ref(p-|s))])
double dpo_loss(const model::SeqModel& policy, const model::SeqModel& reference,
                const PreferencePair& pair, const DpoConfig& config);

struct DpoLog {
  std::vector<double> step_mean_loss;
  double final_mean_loss = 0.0;
};

// Clones the policy as the frozen reference, then runs config.epochs of
// batched gradient descent on the DPO objective. Throws EmptyPairs.
DpoLog train_dpo(model::TrainableSeqModel& policy,
                 const std::vector<PreferencePair>& pairs,
                 const DpoConfig& config);

}  // namespace atoss::pref

// The trainable splitter: negative log-likelihood SFT over (s, s') pairs,
// beam-search candidate generation, and gated single-best split inference.
#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "atoss/complexity.hpp"
#include "atoss/core.hpp"
#include "atoss/seq_model.hpp"
#include "atoss/teacher.hpp"

namespace atoss::splitter {

// -log p(target | source); equals -model.log_prob exactly.
double sft_loss(const model::SeqModel& model, const std::string& source,
                const std::string& target);

// One distillation training record: original sentence, teacher split, gold
// quads.
struct SftRecord {
  std::string id;
  std::string source;
  std::string target;
  std::vector<core::Quadruplet> quads;
};

void to_json(nlohmann::json& j, const SftRecord& r);
void from_json(const nlohmann::json& j, SftRecord& r);

struct EpochLog {
  int epoch = 0;
  double train_nll = 0.0;
  double val_nll = 0.0;
  bool improved = false;
};

struct TrainLog {
  std::vector<EpochLog> epochs;
  int best_epoch = 0;
  double best_val = 0.0;
};

// Minimizes mean NLL with plain gradient descent. Keeps the parameters of
// the epoch with the lowest validation NLL (train NLL when val is empty) and
// restores them before returning. Stops early after
// config.early_stop_patience epochs without improvement.
// Throws EmptyCorpus / DivergedLoss.
TrainLog train_sft(model::TrainableSeqModel& model,
                   const std::vector<SftRecord>& corpus,
                   const model::SftConfig& config,
                   const std::vector<SftRecord>& val);

// Beam candidates with origin=beam, at most `width`, pairwise distinct,
// scores non-increasing.
std::vector<teacher::SplitCandidate> generate_splits(
    const model::SeqModel& model, const std::string& source, int width = 10,
    const std::string& source_id = "");

// Simple-gated inputs pass through verbatim; everything else gets the
// beam-best split.
std::string split(const model::SeqModel& model, const std::string& text,
                  std::optional<complexity::ComplexityLabel> gate);

}  // namespace atoss::splitter

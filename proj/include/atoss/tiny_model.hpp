// Character-level trainable seq2seq backend, a few thousand parameters.
//
// The decoder walks a monotonic copy cursor through the source: after each
// emitted character the cursor advances when the character matches the source
// at (or one past) the cursor. Each step's next-character distribution is a
// one-hidden-layer network over embeddings of the upcoming source window, the
// recently emitted characters, and cursor progress scalars. Copying and
// local edits (the splitter's insert-a-period patterns) are therefore
// learnable from very few examples, and log_prob factorizes exactly into
// per-token softmax terms (terminal EOS included).
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "atoss/seq_model.hpp"

namespace atoss::model {

struct TinyConfig {
  int embed_dim = 10;
  int hidden_dim = 40;
  int max_len = 240;  // decode cap, characters
  uint64_t seed = 17;

  bool operator==(const TinyConfig&) const = default;
};

class TinySeq2Seq final : public TrainableSeqModel {
 public:
  explicit TinySeq2Seq(TinyConfig config = {});

  // SeqModel
  double log_prob(const std::string& source,
                  const std::string& target) const override;
  std::vector<ScoredText> beam_generate(const std::string& source,
                                        int width) const override;
  double train_step(const std::vector<Pair>& batch,
                    double learning_rate) override;
  std::string backend_name() const override { return "tiny-copy-seq2seq"; }

  // TrainableSeqModel
  size_t param_count() const override { return params_.size(); }
  double get_param(size_t i) const override { return params_[i]; }
  void set_param(size_t i, double v) override { params_[i] = v; }
  void zero_grad() override;
  void accumulate_log_prob_grad(const std::string& source,
                                const std::string& target,
                                double coeff) override;
  double get_grad(size_t i) const override { return grads_[i]; }
  void apply_grad(double learning_rate) override;
  std::unique_ptr<TrainableSeqModel> clone() const override;

  // Per-token log-likelihoods of target given source, terminal EOS last.
  // Test oracles recompute log_prob from this.
  std::vector<double> token_log_probs(const std::string& source,
                                      const std::string& target) const;

  const TinyConfig& config() const { return config_; }
  std::vector<double> snapshot() const { return params_; }
  void restore(const std::vector<double>& params);

  static constexpr int kVocab = 98;  // printable ASCII + UNK + BOS + EOS

 private:
  struct DecodeState;
  struct StepTape;

  std::vector<int> encode(const std::string& s) const;
  static std::array<int, 7> embed_ids(const std::vector<int>& source,
                                      const DecodeState& state);
  void features(const std::vector<int>& source, const DecodeState& state,
                std::vector<double>& phi) const;
  // Returns log-softmax distribution over the vocabulary; fills tape when
  // recording for backward.
  void step_logits(const std::vector<int>& source, const DecodeState& state,
                   std::vector<double>& logp, StepTape* tape) const;
  static void advance(DecodeState& state, int emitted,
                      const std::vector<int>& source);
  double grad_log_prob(const std::vector<int>& source,
                       const std::vector<int>& target, double coeff,
                       std::vector<double>& grad) const;

  TinyConfig config_;
  std::vector<double> params_;
  std::vector<double> grads_;

  // Parameter block offsets into params_.
  size_t off_embed_, off_w1_, off_b1_, off_w2_, off_b2_;
  int feat_dim_;
};

// Checkpoint directory layout: model.json holding
// {backend_name, config, epoch, val_loss, params} with parameters stored as
// hex-encoded IEEE-754 bit patterns for byte-exact reproducibility.
struct CheckpointMeta {
  std::string backend_name;
  TinyConfig config;
  int epoch = 0;
  double val_loss = 0.0;
};

void save_checkpoint(const std::string& dir, const TinySeq2Seq& model,
                     const CheckpointMeta& meta);
TinySeq2Seq load_checkpoint(const std::string& dir,
                            CheckpointMeta* meta = nullptr);

}  // namespace atoss::model

// Sequence-to-sequence model contract used by the splitter: scoring,
// beam-search generation, and one-step gradient training. The production
// backend is a pretrained encoder-decoder reached through this interface;
// the repository ships a tiny character-level trainable backend so every
// training-path test runs in seconds.
#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace atoss::model {

struct ScoredText {
  std::string text;
  double score;  // total log-probability
};

using Pair = std::pair<std::string, std::string>;  // (source, target)

class SeqModel {
 public:
  virtual ~SeqModel() = default;

  // Sum of per-token log-likelihoods of target given source; always <= 0.
  virtual double log_prob(const std::string& source,
                          const std::string& target) const = 0;

  // Up to `width` distinct strings with scores in non-increasing order.
  virtual std::vector<ScoredText> beam_generate(const std::string& source,
                                                int width) const = 0;

  // One gradient-descent step on the batch; returns the mean NLL.
  virtual double train_step(const std::vector<Pair>& batch,
                            double learning_rate) = 0;

  virtual std::string backend_name() const = 0;
};

// Extension for backends that expose their parameters, needed by the DPO
// trainer and by gradient checks.
class TrainableSeqModel : public SeqModel {
 public:
  virtual size_t param_count() const = 0;
  virtual double get_param(size_t i) const = 0;
  virtual void set_param(size_t i, double v) = 0;

  virtual void zero_grad() = 0;
  // grad += coeff * d log_prob(source, target) / d theta
  virtual void accumulate_log_prob_grad(const std::string& source,
                                        const std::string& target,
                                        double coeff) = 0;
  virtual double get_grad(size_t i) const = 0;
  virtual void apply_grad(double learning_rate) = 0;  // theta -= lr * grad

  virtual std::unique_ptr<TrainableSeqModel> clone() const = 0;
};

struct SftConfig {
  int train_batch = 64;
  int val_batch = 8;
  int epochs = 50;
  double learning_rate = 6e-5;
  int early_stop_patience = 20;

  void validate() const;
};

}  // namespace atoss::model

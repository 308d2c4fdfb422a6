// Hand-rolled SeqModel stubs with analytically known behavior.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "atoss/seq_model.hpp"

namespace stub {

// Every character of the target carries probability 1/vocab, independent of
// everything: log_prob = -T * log(vocab).
class UniformModel : public atoss::model::SeqModel {
 public:
  explicit UniformModel(int vocab) : vocab_(vocab) {}
  double log_prob(const std::string&, const std::string& target) const override {
    return -static_cast<double>(target.size()) * std::log(vocab_);
  }
  std::vector<atoss::model::ScoredText> beam_generate(const std::string&,
                                                      int) const override {
    return {};
  }
  double train_step(const std::vector<atoss::model::Pair>&, double) override {
    throw std::logic_error("uniform stub is not trainable");
  }
  std::string backend_name() const override { return "uniform-stub"; }

 private:
  double vocab_;
};

// Assigns probability 1 to one memorized target, and probability ~0 to
// everything else.
class MemorizingModel : public atoss::model::SeqModel {
 public:
  MemorizingModel(std::string source, std::string target)
      : source_(std::move(source)), target_(std::move(target)) {}
  double log_prob(const std::string& source,
                  const std::string& target) const override {
    return (source == source_ && target == target_) ? 0.0 : -1e9;
  }
  std::vector<atoss::model::ScoredText> beam_generate(const std::string& source,
                                                      int width) const override {
    if (width < 1) return {};
    if (source == source_) return {{target_, 0.0}};
    return {{source, -1e9}};
  }
  double train_step(const std::vector<atoss::model::Pair>&, double) override {
    throw std::logic_error("memorizing stub is not trainable");
  }
  std::string backend_name() const override { return "memorizing-stub"; }

 private:
  std::string source_;
  std::string target_;
};

}  // namespace stub

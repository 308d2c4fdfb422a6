// AbsaBackend adapters: an HTTP adapter for externally hosted fine-tuned
// models and a prompting adapter for remote LLMs. The models themselves are
// external; only their inference surface lives here.
#pragma once

#include <memory>
#include <string>

#include "atoss/llm.hpp"
#include "atoss/preference.hpp"

namespace atoss::backends {

// POST {"text": ..., "task": ...} -> {"quads": [[at, ac, sp, ot], ...]}.
struct HttpBackendConfig {
  std::string base_url;
  std::string path = "/predict";
  llm::RetryPolicy retry;
  int timeout_sec = 60;
};

class HttpAbsaBackend : public pref::AbsaBackend {
 public:
  explicit HttpAbsaBackend(HttpBackendConfig config);
  std::vector<core::Quadruplet> predict(const std::string& text,
                                        core::Task task) override;
  std::string name() const override { return "http"; }

 private:
  HttpBackendConfig config_;
};

// Prompts a completion client for quadruplets and parses the bracketed reply.
// Predictions whose terms are not substrings of the input (or NULL) are
// dropped, as are tuples with unknown polarity, so the backend invariants
// hold regardless of what the LLM returns. Deterministic given a fixed
// client (temperature 0 plus replay cache).
class LlmAbsaBackend : public pref::AbsaBackend {
 public:
  LlmAbsaBackend(std::shared_ptr<llm::CompletionClient> client,
                 std::string label = "llm");
  std::vector<core::Quadruplet> predict(const std::string& text,
                                        core::Task task) override;
  std::string name() const override { return label_; }

 private:
  std::shared_ptr<llm::CompletionClient> client_;
  std::string label_;
};

// "lexicon", "http" or "llm" plus the matching configuration fields.
std::unique_ptr<pref::AbsaBackend> make_backend(const nlohmann::json& cfg);

}  // namespace atoss::backends

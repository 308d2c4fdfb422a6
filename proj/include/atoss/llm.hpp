// Completion-client abstraction for the teacher LLM and LLM-backed ABSA
// backends: an HTTP transport with bounded retries, an on-disk replay cache
// for cost control and test determinism, and a scripted fake.
#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "atoss/error.hpp"

namespace atoss::llm {

class CompletionClient {
 public:
  virtual ~CompletionClient() = default;
  // Returns exactly n completion strings for the prompt. Throws
  // TeacherUnavailable when the underlying transport gives up.
  virtual std::vector<std::string> generate(const std::string& prompt, int n,
                                            double temperature) = 0;
  virtual std::string name() const = 0;
};

// Fake client driven by a user-supplied script. The script may return any
// number of strings; the client cycles/truncates them to exactly n.
class ScriptedClient : public CompletionClient {
 public:
  using Script = std::function<std::vector<std::string>(
      const std::string& prompt, int n, double temperature)>;

  explicit ScriptedClient(Script script) : script_(std::move(script)) {}

  std::vector<std::string> generate(const std::string& prompt, int n,
                                    double temperature) override;
  std::string name() const override { return "scripted"; }

 private:
  Script script_;
};

struct RetryPolicy {
  int max_retries = 3;
  int backoff_ms = 200;  // doubled per attempt
};

struct HttpConfig {
  std::string base_url;  // scheme://host[:port]
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string api_key_env = "ATOSS_API_KEY";
  RetryPolicy retry;
  int timeout_sec = 60;
};

// OpenAI-style chat-completions transport. Secrets come only from the
// environment variable named in the config.
class HttpClient : public CompletionClient {
 public:
  explicit HttpClient(HttpConfig config);
  std::vector<std::string> generate(const std::string& prompt, int n,
                                    double temperature) override;
  std::string name() const override { return "http:" + config_.model; }

 private:
  HttpConfig config_;
};

// Wraps another client with a content-addressed on-disk cache keyed by the
// SHA-256 of (prompt, n, temperature). Hits replay byte-identical
// completions; misses call the inner client and persist
// {prompt_digest, prompt, completions, timestamp}. A null inner client makes
// the cache replay-only; a miss then throws TeacherUnavailable.
class ReplayCacheClient : public CompletionClient {
 public:
  ReplayCacheClient(std::shared_ptr<CompletionClient> inner,
                    std::string cache_dir);

  std::vector<std::string> generate(const std::string& prompt, int n,
                                    double temperature) override;
  std::string name() const override;

  std::string key_for(const std::string& prompt, int n,
                      double temperature) const;
  bool has(const std::string& prompt, int n, double temperature) const;

 private:
  std::shared_ptr<CompletionClient> inner_;
  std::string cache_dir_;
  std::mutex write_mu_;
};

}  // namespace atoss::llm

#include "atoss/llm.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "atoss/digest.hpp"
#include "atoss/records.hpp"

namespace atoss::llm {

using nlohmann::json;

std::vector<std::string> ScriptedClient::generate(const std::string& prompt,
                                                  int n, double temperature) {
  std::vector<std::string> raw = script_(prompt, n, temperature);
  if (raw.empty())
    throw TeacherUnavailable("scripted client produced no completions");
  std::vector<std::string> out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(raw[i % raw.size()]);
  return out;
}

HttpClient::HttpClient(HttpConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty())
    throw ConfigInvalid("http teacher requires a base_url");
}

std::vector<std::string> HttpClient::generate(const std::string& prompt, int n,
                                              double temperature) {
  json body = {
      {"model", config_.model},
      {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
      {"n", n},
      {"temperature", temperature},
  };
  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str());
      key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  std::vector<std::string> completions;
  int attempts = config_.retry.max_retries + 1;
  int backoff = config_.retry.backoff_ms;
  std::string last_error = "no attempt made";

  // Endpoints may return fewer than n choices per call; keep asking for the
  // remainder until n are collected or retries are exhausted.
  while (static_cast<int>(completions.size()) < n && attempts > 0) {
    --attempts;
    body["n"] = n - static_cast<int>(completions.size());
    httplib::Client cli(config_.base_url);
    cli.set_read_timeout(config_.timeout_sec, 0);
    cli.set_connection_timeout(config_.timeout_sec, 0);
    auto res = cli.Post(config_.path, headers, body.dump(), "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
    } else if (res->status < 200 || res->status >= 300) {
      last_error = "http status " + std::to_string(res->status);
    } else {
      try {
        json reply = json::parse(res->body);
        for (const auto& choice : reply.at("choices")) {
          if (choice.contains("message"))
            completions.push_back(
                choice["message"].at("content").get<std::string>());
          else
            completions.push_back(choice.at("text").get<std::string>());
        }
        continue;  // got a parseable reply; no backoff before next chunk
      } catch (const json::exception& e) {
        last_error = std::string("malformed completion payload: ") + e.what();
      }
    }
    if (attempts > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
  }

  if (static_cast<int>(completions.size()) < n)
    throw TeacherUnavailable("teacher endpoint failed after retries: " +
                             last_error);
  completions.resize(static_cast<size_t>(n));
  return completions;
}

ReplayCacheClient::ReplayCacheClient(std::shared_ptr<CompletionClient> inner,
                                     std::string cache_dir)
    : inner_(std::move(inner)), cache_dir_(std::move(cache_dir)) {
  std::filesystem::create_directories(cache_dir_);
}

std::string ReplayCacheClient::name() const {
  return "replay(" + (inner_ ? inner_->name() : std::string("none")) + ")";
}

std::string ReplayCacheClient::key_for(const std::string& prompt, int n,
                                       double temperature) const {
  std::ostringstream material;
  material << n << '\x1f' << temperature << '\x1f' << prompt;
  return util::sha256_hex(material.str());
}

bool ReplayCacheClient::has(const std::string& prompt, int n,
                            double temperature) const {
  return std::filesystem::exists(
      std::filesystem::path(cache_dir_) /
      (key_for(prompt, n, temperature) + ".json"));
}

std::vector<std::string> ReplayCacheClient::generate(const std::string& prompt,
                                                     int n,
                                                     double temperature) {
  std::string key = key_for(prompt, n, temperature);
  std::filesystem::path entry =
      std::filesystem::path(cache_dir_) / (key + ".json");
  if (std::filesystem::exists(entry)) {
    json record = json::parse(util::read_file(entry.string()));
    return record.at("completions").get<std::vector<std::string>>();
  }
  if (!inner_)
    throw TeacherUnavailable("replay cache miss with no upstream client: " +
                             key);
  std::vector<std::string> completions = inner_->generate(prompt, n, temperature);
  json record = {
      {"prompt_digest", key},
      {"prompt", prompt},
      {"completions", completions},
      {"timestamp",
       std::chrono::duration_cast<std::chrono::seconds>(
           std::chrono::system_clock::now().time_since_epoch())
           .count()},
  };
  {
    std::lock_guard<std::mutex> lock(write_mu_);
    util::atomic_write(entry.string(),
                       [&](std::ostream& out) { out << record.dump(2); });
  }
  return completions;
}

}  // namespace atoss::llm

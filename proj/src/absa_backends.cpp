#include "atoss/absa_backends.hpp"

#include <chrono>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "atoss/core_json.hpp"
#include "atoss/synthetic.hpp"
#include "atoss/text.hpp"

namespace atoss::backends {

using core::Quadruplet;
using nlohmann::json;

HttpAbsaBackend::HttpAbsaBackend(HttpBackendConfig config)
    : config_(std::move(config)) {
  if (config_.base_url.empty())
    throw ConfigInvalid("http backend requires a base_url");
}

std::vector<Quadruplet> HttpAbsaBackend::predict(const std::string& text,
                                                 core::Task task) {
  json body = {{"text", text}, {"task", core::to_string(task)}};
  int attempts = config_.retry.max_retries + 1;
  int backoff = config_.retry.backoff_ms;
  std::string last_error = "no attempt made";
  while (attempts-- > 0) {
    httplib::Client cli(config_.base_url);
    cli.set_read_timeout(config_.timeout_sec, 0);
    auto res = cli.Post(config_.path, body.dump(), "application/json");
    if (res && res->status >= 200 && res->status < 300) {
      try {
        json reply = json::parse(res->body);
        return reply.at("quads").get<std::vector<Quadruplet>>();
      } catch (const std::exception& e) {
        last_error = std::string("malformed backend reply: ") + e.what();
      }
    } else {
      last_error = res ? "http status " + std::to_string(res->status)
                       : "transport error: " + httplib::to_string(res.error());
    }
    if (attempts > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
  }
  throw BackendUnavailable("absa backend failed after retries: " + last_error);
}

LlmAbsaBackend::LlmAbsaBackend(std::shared_ptr<llm::CompletionClient> client,
                               std::string label)
    : client_(std::move(client)), label_(std::move(label)) {
  if (!client_) throw ConfigInvalid("llm backend requires a client");
}

std::vector<Quadruplet> LlmAbsaBackend::predict(const std::string& text,
                                                core::Task task) {
  std::ostringstream prompt;
  prompt << "Extract every aspect-based sentiment tuple from the review "
            "sentence below.\n";
  if (task == core::Task::TASD)
    prompt << "Answer with a list like [['aspect term', 'aspect category', "
              "'sentiment'], ...].\n";
  else if (task == core::Task::ASTE)
    prompt << "Answer with a list like [['aspect term', 'opinion term', "
              "'sentiment'], ...].\n";
  else
    prompt << "Answer with a list like [['aspect term', 'aspect category', "
              "'sentiment', 'opinion term'], ...].\n";
  prompt << "Use 'null' for implicit aspect or opinion terms. Sentiment is "
            "one of positive, neutral, negative. Answer with the list only.\n"
            "\nSentence: "
         << text;

  std::vector<std::string> replies;
  try {
    replies = client_->generate(prompt.str(), 1, 0.0);
  } catch (const TeacherUnavailable& e) {
    throw BackendUnavailable(e.what());
  }
  const std::string& reply = replies.at(0);
  size_t begin = reply.find('[');
  size_t end = reply.rfind(']');
  if (begin == std::string::npos || end == std::string::npos || end < begin)
    return {};

  std::vector<std::vector<std::string>> lists;
  try {
    lists = core::parse_annotation_lists(reply.substr(begin, end - begin + 1));
  } catch (const MalformedLine&) {
    return {};
  }

  core::ElementOrder order = core::ElementOrder::default_for(task);
  std::vector<Quadruplet> out;
  for (const auto& items : lists) {
    if (items.size() != order.fields.size()) continue;
    Quadruplet q;
    bool ok = true;
    for (size_t i = 0; i < items.size(); ++i) {
      switch (order.fields[i]) {
        case 'a':
          q.aspect_term = core::is_null_term(items[i])
                              ? std::string(core::kNullSentinel)
                              : items[i];
          break;
        case 'c': q.aspect_category = items[i]; break;
        case 'o':
          q.opinion_term = core::is_null_term(items[i])
                               ? std::string(core::kNullSentinel)
                               : items[i];
          break;
        case 'p':
          try {
            q.polarity = core::polarity_from_string(items[i]);
          } catch (const UnknownPolarity&) {
            ok = false;
          }
          break;
      }
    }
    for (const std::string* term : {&q.aspect_term, &q.opinion_term}) {
      if (term->empty() || core::is_null_term(*term)) continue;
      if (!text::contains_normalized(text, *term)) ok = false;
    }
    if (ok) out.push_back(std::move(q));
  }
  return out;
}

std::unique_ptr<pref::AbsaBackend> make_backend(const json& cfg) {
  std::string kind = cfg.value("kind", "lexicon");
  if (kind == "lexicon") return std::make_unique<synthetic::LexiconBackend>();
  if (kind == "http") {
    HttpBackendConfig http;
    http.base_url = cfg.value("endpoint", "");
    http.path = cfg.value("path", "/predict");
    http.retry.max_retries = cfg.value("max_retries", 3);
    http.retry.backoff_ms = cfg.value("backoff_ms", 200);
    return std::make_unique<HttpAbsaBackend>(http);
  }
  if (kind == "llm") {
    llm::HttpConfig http;
    http.base_url = cfg.value("endpoint", "");
    http.path = cfg.value("path", "/v1/chat/completions");
    http.model = cfg.value("model", "");
    http.api_key_env = cfg.value("api_key_env", "ATOSS_API_KEY");
    std::shared_ptr<llm::CompletionClient> client =
        std::make_shared<llm::HttpClient>(http);
    std::string cache_dir = cfg.value("cache_dir", "");
    if (!cache_dir.empty())
      client = std::make_shared<llm::ReplayCacheClient>(client, cache_dir);
    return std::make_unique<LlmAbsaBackend>(client,
                                            "llm:" + cfg.value("model", ""));
  }
  throw ConfigInvalid("unknown backend kind: " + kind);
}

}  // namespace atoss::backends

#include "atoss/teacher.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_set>

#include "atoss/text.hpp"

namespace atoss::teacher {

using core::AnnotatedExample;
using core::Quadruplet;

std::string to_string(Origin o) {
  switch (o) {
    case Origin::zero_shot: return "zero_shot";
    case Origin::few_shot: return "few_shot";
    case Origin::beam: return "beam";
  }
  return "zero_shot";
}

Origin origin_from_string(std::string_view s) {
  if (s == "zero_shot" || s == "zero") return Origin::zero_shot;
  if (s == "few_shot" || s == "few") return Origin::few_shot;
  if (s == "beam") return Origin::beam;
  throw ConfigInvalid("unknown candidate origin: " + std::string(s));
}

SplitCandidate make_candidate(std::string source_id, std::string text,
                              Origin origin) {
  SplitCandidate c;
  c.source_id = std::move(source_id);
  c.text = std::move(text);
  c.segments = text::segments(c.text);
  if (c.segments.empty()) c.segments.push_back(c.text);
  c.origin = origin;
  return c;
}

void FilterConfig::validate() const {
  if (k < 1 || n_candidates < 1 || k > n_candidates)
    throw ConfigInvalid("filter config requires 1 <= k <= n_candidates");
}

namespace {

constexpr const char* kTaskDescription =
    "You are a sentence splitting expert. You will be provided with a review "
    "sentence and a few [aspect, category, sentiment, opinion] quadruplets "
    "from that review sentence. Here is the definition of each element in the "
    "quadruplet:\n"
    "- The 'aspect' refers to a specific feature, attribute, or aspect of a "
    "product or service that a user may express an opinion about. The aspect "
    "term might be 'null' for an implicit aspect.\n"
    "- The 'opinion' refers to the sentiment or attitude expressed by a user "
    "towards a particular aspect or feature of a product or service. The "
    "opinion term might be 'null' for an implicit opinion.\n"
    "- The 'category' refers to the category that the aspect belongs to (e.g. "
    "food quality, restaurant general, etc.).\n"
    "- The 'sentiment' refers to the sentiment class of the aspect (e.g. "
    "positive, negative, neutral).\n"
    "\n"
    "You need to split the sentence into shorter sentences such that each "
    "short sentence contains one aspect term. When splitting, sentences "
    "connected by conjunctions must be divided into individual sentences "
    "along with their conjunctions. This process must specify the subject in "
    "every sentence. This process must retain the existing spellings exactly "
    "as in the original sentence. This process must also retain the existing "
    "spacings exactly as in the original sentence. If the sentence is too "
    "short to split or does not need to be split, use the original sentence "
    "as is. No numbering, line breaks, or explanations are needed.";

AnnotatedExample demo_example(const std::string& text,
                              std::vector<Quadruplet> quads) {
  AnnotatedExample ex;
  ex.text = text;
  ex.quads = std::move(quads);
  ex.task = core::Task::ASQP;
  return ex;
}

Quadruplet quad(const std::string& at, const std::string& ac,
                const std::string& sp, const std::string& ot) {
  Quadruplet q;
  q.aspect_term = at;
  q.aspect_category = ac;
  q.polarity = core::polarity_from_string(sp);
  q.opinion_term = ot;
  return q;
}

}  // namespace

const std::vector<Demo>& default_demos() {
  static const std::vector<Demo> kDemos = {
      {demo_example("i will be going back and heartily recommend it !",
                    {quad("null", "restaurant general", "positive",
                          "recommend")}),
       "i will be going back and heartily recommend it !"},
      {demo_example(
           "i ' ve never had bad service and the fish is fresh and delicious .",
           {quad("service", "service general", "positive", "never had bad"),
            quad("fish", "food quality", "positive", "fresh"),
            quad("fish", "food quality", "positive", "delicious")}),
       "i ' ve  never had bad service . and the fish is fresh and delicious ."},
      {demo_example(
           "very immature bartender , didnt know how to make specific drinks , "
           "service was so slowwwww , the food was not fresh or warm , "
           "waitresses were busy flirting with men at the bar and werent very "
           "attentive to all the customers .",
           {quad("bartender", "service general", "negative", "immature"),
            quad("service", "service general", "negative", "slowwwww"),
            quad("food", "food quality", "negative", "not fresh or warm"),
            quad("waitresses", "service general", "negative",
                 "werent very attentive")}),
       "very immature bartender, didnt know how to make specific drinks. "
       "service was so slowwwww. the food was not fresh or warm. waitresses "
       "were busy flirting with men at the bar and werent very attentive to "
       "all the customers ."},
  };
  return kDemos;
}

std::string render_quads(const std::vector<Quadruplet>& quads) {
  std::string out = "[";
  for (size_t i = 0; i < quads.size(); ++i) {
    if (i) out += ", ";
    const Quadruplet& q = quads[i];
    out += "['" + q.aspect_term + "', '" + q.aspect_category + "', '" +
           core::to_string(q.polarity) + "', '" + q.opinion_term + "']";
  }
  out += "]";
  return out;
}

std::string render_prompt(PromptMode mode, const AnnotatedExample& example,
                          const std::vector<Demo>& demos) {
  std::ostringstream out;
  out << kTaskDescription;
  if (mode == PromptMode::few_shot) {
    if (demos.empty())
      throw MissingDemos("few-shot prompt requires demonstrations");
    int i = 0;
    for (const auto& [demo, split] : demos) {
      out << "\n\n[Example " << ++i << "]\n"
          << "Original sentence: " << demo.text << "\n\n"
          << "Quadruplets: " << render_quads(demo.quads) << "\n\n"
          << "Split sentence: " << split;
    }
  }
  out << "\n\nOriginal sentence: " << example.text << "\n\n"
      << "Quadruplets: " << render_quads(example.quads) << "\n\n"
      << "Split sentence:";
  return out.str();
}

std::vector<SplitCandidate> generate_candidates(
    llm::CompletionClient& client, const AnnotatedExample& example,
    PromptMode mode, const FilterConfig& config, double temperature,
    const std::vector<Demo>& demos) {
  config.validate();
  const std::vector<Demo>& use_demos =
      (mode == PromptMode::few_shot && demos.empty()) ? default_demos() : demos;
  std::string prompt = render_prompt(mode, example, use_demos);
  std::vector<std::string> completions =
      client.generate(prompt, config.n_candidates, temperature);
  if (static_cast<int>(completions.size()) != config.n_candidates)
    throw TeacherUnavailable("client returned wrong completion count");
  Origin origin = mode == PromptMode::zero_shot ? Origin::zero_shot
                                                : Origin::few_shot;
  std::vector<SplitCandidate> out;
  out.reserve(completions.size());
  for (auto& completion : completions) {
    // Replies sometimes wrap the sentence in whitespace; strip only the
    // outer run so internal spacing is preserved.
    std::string body = completion;
    while (!body.empty() && (body.front() == '\n' || body.front() == ' '))
      body.erase(body.begin());
    while (!body.empty() && (body.back() == '\n' || body.back() == ' '))
      body.pop_back();
    SplitCandidate c = make_candidate(example.id, body, origin);
    c.criteria_score = score_candidate(c, example);
    out.push_back(std::move(c));
  }
  return out;
}

double score_candidate(const SplitCandidate& candidate,
                       const AnnotatedExample& example) {
  const auto& segments = candidate.segments;

  std::set<std::string> aspect_terms;
  std::set<std::string> opinion_terms;
  for (const auto& q : example.quads) {
    if (!q.aspect_term.empty() && !core::is_null_term(q.aspect_term))
      aspect_terms.insert(q.aspect_term);
    if (!q.opinion_term.empty() && !core::is_null_term(q.opinion_term))
      opinion_terms.insert(q.opinion_term);
  }

  // (a) each aspect term localized to exactly one segment
  double sub_a = 1.0;
  if (!aspect_terms.empty()) {
    int ok = 0;
    for (const auto& term : aspect_terms) {
      int hits = 0;
      for (const auto& seg : segments)
        if (text::contains_normalized(seg, term)) ++hits;
      if (hits == 1) ++ok;
    }
    sub_a = static_cast<double>(ok) / static_cast<double>(aspect_terms.size());
  }

  // (b) opinion terms still present somewhere
  double sub_b = 1.0;
  if (!opinion_terms.empty()) {
    int ok = 0;
    for (const auto& term : opinion_terms) {
      bool found = false;
      for (const auto& seg : segments)
        if (text::contains_normalized(seg, term)) {
          found = true;
          break;
        }
      if (found) ++ok;
    }
    sub_b = static_cast<double>(ok) / static_cast<double>(opinion_terms.size());
  }

  // (c) spelling preservation over content tokens
  double sub_c = 1.0;
  auto original_tokens = text::content_tokens(example.text);
  if (!original_tokens.empty()) {
    std::unordered_set<std::string> candidate_tokens;
    for (auto& t : text::tokens(text::lower(candidate.text)))
      candidate_tokens.insert(t);
    int kept = 0;
    for (const auto& t : original_tokens)
      if (candidate_tokens.count(t)) ++kept;
    sub_c = static_cast<double>(kept) /
            static_cast<double>(original_tokens.size());
  }

  // (d) segment-count sanity
  double sub_d = 1.0;
  size_t quad_count = example.quads.size();
  if (segments.size() > quad_count && !segments.empty())
    sub_d = static_cast<double>(quad_count) /
            static_cast<double>(segments.size());

  return (sub_a + sub_b + sub_c + sub_d) / 4.0;
}

std::vector<SplitCandidate> filter_top_k(std::vector<SplitCandidate> candidates,
                                         const AnnotatedExample& example,
                                         const FilterConfig& config) {
  config.validate();
  if (candidates.empty())
    throw NoCandidates("no candidates to filter for example " + example.id);

  std::vector<SplitCandidate> unique;
  std::unordered_set<std::string> seen;
  for (auto& c : candidates) {
    if (seen.insert(c.text).second) unique.push_back(std::move(c));
  }
  std::stable_sort(unique.begin(), unique.end(),
                   [](const SplitCandidate& a, const SplitCandidate& b) {
                     if (a.criteria_score != b.criteria_score)
                       return a.criteria_score > b.criteria_score;
                     if (a.segments.size() != b.segments.size())
                       return a.segments.size() < b.segments.size();
                     return a.text < b.text;
                   });
  if (unique.size() > static_cast<size_t>(config.k))
    unique.resize(static_cast<size_t>(config.k));
  return unique;
}

void to_json(nlohmann::json& j, const SplitCandidate& c) {
  j = nlohmann::json{{"source_id", c.source_id},
                     {"text", c.text},
                     {"segments", c.segments},
                     {"origin", to_string(c.origin)},
                     {"criteria_score", c.criteria_score}};
}

void from_json(const nlohmann::json& j, SplitCandidate& c) {
  c.source_id = j.at("source_id").get<std::string>();
  c.text = j.at("text").get<std::string>();
  c.segments = j.at("segments").get<std::vector<std::string>>();
  c.origin = origin_from_string(j.at("origin").get<std::string>());
  c.criteria_score = j.at("criteria_score").get<double>();
}

}  // namespace atoss::teacher

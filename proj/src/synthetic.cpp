#include "atoss/synthetic.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "atoss/text.hpp"

namespace atoss::synthetic {

using core::AnnotatedExample;
using core::Polarity;
using core::Quadruplet;

const Lexicon& Lexicon::restaurant() {
  static const Lexicon kLexicon = {
      {
          {"pizza", "food quality"},     {"pasta", "food quality"},
          {"sushi", "food quality"},     {"salad", "food quality"},
          {"soup", "food quality"},      {"steak", "food quality"},
          {"dessert", "food quality"},   {"bread", "food quality"},
          {"service", "service general"},{"staff", "service general"},
          {"waiter", "service general"}, {"bartender", "service general"},
          {"hostess", "service general"},{"decor", "ambience general"},
          {"lighting", "ambience general"}, {"music", "ambience general"},
          {"patio", "ambience general"}, {"prices", "price general"},
          {"bill", "price general"},     {"wine", "drinks quality"},
          {"coffee", "drinks quality"},  {"cocktails", "drinks quality"},
          {"wine list", "drinks quality"},
      },
      {
          {"great", Polarity::positive},    {"fresh", Polarity::positive},
          {"friendly", Polarity::positive}, {"lovely", Polarity::positive},
          {"generous", Polarity::positive}, {"charming", Polarity::positive},
          {"tasty", Polarity::positive},    {"quick", Polarity::positive},
          {"terrible", Polarity::negative}, {"bland", Polarity::negative},
          {"rude", Polarity::negative},     {"dreary", Polarity::negative},
          {"slow", Polarity::negative},     {"stale", Polarity::negative},
          {"noisy", Polarity::negative},    {"bitter", Polarity::negative},
          {"average", Polarity::neutral},   {"ordinary", Polarity::neutral},
      }};
  return kLexicon;
}

namespace {

std::vector<std::string> lower_tokens(const std::string& s) {
  return text::tokens(text::lower(s));
}

// Earliest whole-token match of any lexicon entry; longer entries win at the
// same position.
template <typename Entry>
const Entry* find_first(const std::vector<std::string>& tokens,
                        const std::vector<std::string>& original_tokens,
                        const std::vector<Entry>& entries, size_t* match_begin,
                        size_t* match_len) {
  for (size_t i = 0; i < tokens.size(); ++i) {
    const Entry* best = nullptr;
    size_t best_len = 0;
    for (const Entry& entry : entries) {
      std::vector<std::string> parts = lower_tokens(entry.term);
      if (parts.empty() || i + parts.size() > tokens.size()) continue;
      bool match = true;
      for (size_t k = 0; k < parts.size(); ++k)
        if (tokens[i + k] != parts[k]) {
          match = false;
          break;
        }
      if (match && parts.size() > best_len) {
        best = &entry;
        best_len = parts.size();
      }
    }
    if (best) {
      *match_begin = i;
      *match_len = best_len;
      return best;
    }
  }
  (void)original_tokens;
  return nullptr;
}

std::string join_tokens(const std::vector<std::string>& tokens, size_t begin,
                        size_t len) {
  std::string out;
  for (size_t i = begin; i < begin + len; ++i) {
    if (!out.empty()) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace

std::vector<Quadruplet> LexiconBackend::predict(const std::string& input,
                                                core::Task task) {
  std::vector<std::string> segs = text::segments(input);
  if (segs.empty()) segs.push_back(input);

  std::vector<Quadruplet> out;
  for (const auto& segment : segs) {
    std::vector<std::string> original = text::tokens(segment);
    std::vector<std::string> tokens = lower_tokens(segment);

    size_t ob = 0, ol = 0;
    const OpinionEntry* opinion =
        find_first(tokens, original, lexicon_.opinions, &ob, &ol);
    if (!opinion) continue;

    size_t ab = 0, al = 0;
    const AspectEntry* aspect =
        find_first(tokens, original, lexicon_.aspects, &ab, &al);

    Quadruplet q;
    if (aspect) {
      q.aspect_term = join_tokens(original, ab, al);
      q.aspect_category = aspect->category;
    } else {
      q.aspect_term = std::string(core::kNullSentinel);
      q.aspect_category = "restaurant general";
    }
    q.polarity = opinion->polarity;
    q.opinion_term = join_tokens(original, ob, ol);
    if (task == core::Task::TASD) q.opinion_term.clear();
    if (task == core::Task::ASTE) q.aspect_category.clear();
    out.push_back(std::move(q));
  }
  return out;
}

namespace {

Quadruplet make_quad(const AspectEntry& a, const OpinionEntry& o) {
  Quadruplet q;
  q.aspect_term = a.term;
  q.aspect_category = a.category;
  q.polarity = o.polarity;
  q.opinion_term = o.term;
  return q;
}

Quadruplet make_null_quad(const OpinionEntry& o) {
  Quadruplet q;
  q.aspect_term = std::string(core::kNullSentinel);
  q.aspect_category = "restaurant general";
  q.polarity = o.polarity;
  q.opinion_term = o.term;
  return q;
}

}  // namespace

std::vector<AnnotatedExample> make_corpus(const CorpusOptions& opts) {
  const Lexicon& lex = Lexicon::restaurant();
  // Single-token aspects only; the backend's multi-token matching is
  // exercised separately in tests.
  std::vector<AspectEntry> aspects;
  for (const auto& a : lex.aspects)
    if (a.term.find(' ') == std::string::npos) aspects.push_back(a);
  const auto& opinions = lex.opinions;

  std::mt19937_64 rng(opts.seed);
  auto pick = [&rng](size_t n) {
    return static_cast<size_t>(rng() % static_cast<uint64_t>(n));
  };
  auto pick_aspects = [&](size_t count) {
    std::vector<size_t> chosen;
    while (chosen.size() < count) {
      size_t i = pick(aspects.size());
      if (std::find(chosen.begin(), chosen.end(), i) == chosen.end())
        chosen.push_back(i);
    }
    return chosen;
  };
  auto pick_opinions = [&](size_t count) {
    std::vector<size_t> chosen;
    while (chosen.size() < count) {
      size_t i = pick(opinions.size());
      if (std::find(chosen.begin(), chosen.end(), i) == chosen.end())
        chosen.push_back(i);
    }
    return chosen;
  };

  std::vector<AnnotatedExample> corpus;

  for (int i = 0; i < opts.n_simple; ++i) {
    AnnotatedExample ex;
    ex.task = core::Task::ASQP;
    const OpinionEntry& o = opinions[pick(opinions.size())];
    if (i % 8 == 7) {
      ex.text = "it was " + o.term + " .";
      ex.quads.push_back(make_null_quad(o));
    } else {
      const AspectEntry& a = aspects[pick(aspects.size())];
      ex.text = "the " + a.term + " was " + o.term + " .";
      ex.quads.push_back(make_quad(a, o));
    }
    corpus.push_back(std::move(ex));
  }

  for (int i = 0; i < opts.n_compound; ++i) {
    AnnotatedExample ex;
    ex.task = core::Task::ASQP;
    int kind = i % 10;
    if (kind < 4) {
      auto as = pick_aspects(2);
      auto os = pick_opinions(2);
      ex.text = "the " + aspects[as[0]].term + " was " + opinions[os[0]].term +
                " and the " + aspects[as[1]].term + " was " +
                opinions[os[1]].term + " .";
      ex.quads.push_back(make_quad(aspects[as[0]], opinions[os[0]]));
      ex.quads.push_back(make_quad(aspects[as[1]], opinions[os[1]]));
    } else if (kind < 7) {
      auto as = pick_aspects(2);
      auto os = pick_opinions(2);
      ex.text = "the " + aspects[as[0]].term + " was " + opinions[os[0]].term +
                " but the " + aspects[as[1]].term + " was " +
                opinions[os[1]].term + " .";
      ex.quads.push_back(make_quad(aspects[as[0]], opinions[os[0]]));
      ex.quads.push_back(make_quad(aspects[as[1]], opinions[os[1]]));
    } else {
      auto as = pick_aspects(3);
      auto os = pick_opinions(3);
      ex.text = "the " + aspects[as[0]].term + " was " + opinions[os[0]].term +
                " , the " + aspects[as[1]].term + " was " +
                opinions[os[1]].term + " and the " + aspects[as[2]].term +
                " was " + opinions[os[2]].term + " .";
      for (int k = 0; k < 3; ++k)
        ex.quads.push_back(make_quad(aspects[as[k]], opinions[os[k]]));
    }
    corpus.push_back(std::move(ex));
  }

  std::shuffle(corpus.begin(), corpus.end(), rng);
  for (size_t i = 0; i < corpus.size(); ++i)
    corpus[i].id = "syn-" + std::to_string(i + 1);
  return corpus;
}

std::string gold_split(const std::string& input) {
  std::vector<std::string> tokens = text::tokens(input);
  std::vector<std::string> out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    bool joiner = (tokens[i] == "and" || tokens[i] == "but") &&
                  i + 1 < tokens.size() && tokens[i + 1] == "the";
    if (joiner && !out.empty() && out.back() != ".") {
      out.push_back(".");
      out.push_back(tokens[i]);
      continue;
    }
    if (tokens[i] == "," && i + 1 < tokens.size() && tokens[i + 1] == "the") {
      out.push_back(".");
      continue;
    }
    out.push_back(tokens[i]);
  }
  std::string joined;
  for (const auto& t : out) {
    if (!joined.empty()) joined += ' ';
    joined += t;
  }
  return joined;
}

llm::ScriptedClient::Script oracle_teacher_script() {
  return [](const std::string& prompt, int /*n*/, double /*temperature*/) {
    constexpr const char* kMarker = "Original sentence: ";
    size_t begin = prompt.rfind(kMarker);
    if (begin == std::string::npos)
      throw TeacherUnavailable("oracle teacher cannot locate target sentence");
    begin += std::string(kMarker).size();
    size_t end = prompt.find('\n', begin);
    if (end == std::string::npos) end = prompt.size();
    std::string sentence = prompt.substr(begin, end - begin);

    bool few_shot = prompt.find("[Example 1]") != std::string::npos;
    std::string gold = gold_split(sentence);

    // Split only at the first boundary.
    std::string first_only = sentence;
    {
      std::vector<std::string> tokens = text::tokens(sentence);
      std::vector<std::string> out;
      bool done = false;
      for (size_t i = 0; i < tokens.size(); ++i) {
        bool joiner = !done && (tokens[i] == "and" || tokens[i] == "but") &&
                      i + 1 < tokens.size() && tokens[i + 1] == "the";
        bool comma = !done && tokens[i] == "," && i + 1 < tokens.size() &&
                     tokens[i + 1] == "the";
        if (joiner) {
          out.push_back(".");
          done = true;
        } else if (comma) {
          out.push_back(".");
          done = true;
          continue;
        }
        out.push_back(tokens[i]);
      }
      first_only.clear();
      for (const auto& t : out) {
        if (!first_only.empty()) first_only += ' ';
        first_only += t;
      }
    }

    // Drop the last opinion-bearing token: spelling violation.
    std::string corrupted;
    {
      std::vector<std::string> tokens = text::tokens(gold);
      if (tokens.size() > 2) tokens.erase(tokens.end() - 2);
      for (const auto& t : tokens) {
        if (!corrupted.empty()) corrupted += ' ';
        corrupted += t;
      }
    }

    // Break after the first token: too many segments.
    std::string oversplit;
    {
      std::vector<std::string> tokens = text::tokens(gold);
      if (!tokens.empty()) {
        oversplit = tokens[0] + " .";
        for (size_t i = 1; i < tokens.size(); ++i) oversplit += " " + tokens[i];
      }
    }

    if (few_shot)
      return std::vector<std::string>{gold, sentence, gold, first_only, gold,
                                      sentence, gold, first_only, gold, gold};
    return std::vector<std::string>{gold,     sentence,  first_only,
                                    corrupted, oversplit, gold,
                                    sentence,  first_only, corrupted, gold};
  };
}

}  // namespace atoss::synthetic

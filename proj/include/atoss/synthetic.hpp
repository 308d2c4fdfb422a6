// Synthetic restaurant-review corpus plus a deterministic lexicon ABSA
// backend. The backend assumes one aspect-opinion pair per sentence segment,
// so it recovers only the first pair of a fused compound sentence; splitting
// the sentence restores the rest. This gives the test suite a backend whose
// compound-sentence deficit is provable rather than statistical.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "atoss/core.hpp"
#include "atoss/llm.hpp"
#include "atoss/preference.hpp"

namespace atoss::synthetic {

struct AspectEntry {
  std::string term;
  std::string category;
};

struct OpinionEntry {
  std::string term;
  core::Polarity polarity;
};

struct Lexicon {
  std::vector<AspectEntry> aspects;
  std::vector<OpinionEntry> opinions;

  static const Lexicon& restaurant();
};

// Per segment: the first known aspect term and the first known opinion term
// form one quad; a segment with an opinion but no aspect yields a NULL-aspect
// quad. Further aspects or opinions in the same segment are ignored.
class LexiconBackend : public pref::AbsaBackend {
 public:
  LexiconBackend() : lexicon_(Lexicon::restaurant()) {}
  explicit LexiconBackend(Lexicon lexicon) : owned_(std::move(lexicon)),
                                             lexicon_(owned_) {}

  std::vector<core::Quadruplet> predict(const std::string& text,
                                        core::Task task) override;
  std::string name() const override { return "lexicon"; }

 private:
  Lexicon owned_;
  const Lexicon& lexicon_;
};

struct CorpusOptions {
  int n_simple = 80;
  int n_compound = 160;
  uint64_t seed = 17;
};

// Deterministic corpus: simple one-quad sentences and compound sentences
// whose clauses fuse multiple aspect-opinion pairs into one segment.
std::vector<core::AnnotatedExample> make_corpus(const CorpusOptions& opts = {});

// Rule-based gold split for generated sentences: sentence boundaries are
// introduced before clause joiners ("and the", "but the", ", the").
std::string gold_split(const std::string& text);

// Scripted teacher for the synthetic corpus: parses the target sentence out
// of the prompt and answers with the gold split plus noisy variants. Few-shot
// prompts (detected by their worked examples) get a cleaner mix than
// zero-shot ones.
llm::ScriptedClient::Script oracle_teacher_script();

}  // namespace atoss::synthetic

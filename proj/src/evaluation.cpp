#include "atoss/evaluation.hpp"

#include <algorithm>
#include <set>

#include "atoss/parallel.hpp"
#include "atoss/splitter.hpp"
#include "atoss/text.hpp"

namespace atoss::eval {

using complexity::ComplexityLabel;
using core::AnnotatedExample;
using core::Quadruplet;

namespace {

double harmonic_f1(double p, double r) {
  return (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

void finalize(SubsetScores& s) {
  s.precision = s.predicted == 0 ? 0.0
                                 : static_cast<double>(s.matched) /
                                       static_cast<double>(s.predicted);
  s.recall = s.gold == 0 ? 0.0
                         : static_cast<double>(s.matched) /
                               static_cast<double>(s.gold);
  s.f1 = harmonic_f1(s.precision, s.recall);
}

// Shared matching core: deduplicated exact-match counts for one example.
void match_counts(const std::vector<Quadruplet>& predicted,
                  const std::vector<Quadruplet>& gold, int64_t& matched,
                  int64_t& n_pred, int64_t& n_gold) {
  std::set<Quadruplet> pset(predicted.begin(), predicted.end());
  std::set<Quadruplet> gset(gold.begin(), gold.end());
  int64_t m = 0;
  for (const auto& q : pset)
    if (gset.count(q)) ++m;
  matched = m;
  n_pred = static_cast<int64_t>(pset.size());
  n_gold = static_cast<int64_t>(gset.size());
}

void check_ids(const Predictions& predictions,
               const std::vector<AnnotatedExample>& golds) {
  if (predictions.size() != golds.size())
    throw IdMismatch("prediction and gold id sets differ in size");
  for (const auto& ex : golds)
    if (!predictions.count(ex.id))
      throw IdMismatch("missing prediction for id " + ex.id);
}

}  // namespace

nlohmann::json report_to_json(const EvalReport& report) {
  auto subset = [](const SubsetScores& s) {
    return nlohmann::json{{"precision", s.precision}, {"recall", s.recall},
                          {"f1", s.f1},               {"matched", s.matched},
                          {"predicted", s.predicted}, {"gold", s.gold},
                          {"n_examples", s.n_examples}};
  };
  nlohmann::json j{{"precision", report.precision},
                   {"recall", report.recall},
                   {"f1", report.f1},
                   {"aspect_f1", report.aspect_f1},
                   {"n_examples", report.n_examples},
                   {"matched", report.matched},
                   {"predicted", report.predicted},
                   {"gold", report.gold}};
  for (const auto& [label, scores] : report.per_complexity)
    j[complexity::to_string(label)] = subset(scores);
  return j;
}

std::vector<Quadruplet> plug_and_play_predict(const model::SeqModel* splitter,
                                              pref::AbsaBackend& backend,
                                              const AnnotatedExample& example,
                                              const PlugAndPlayOptions& opts,
                                              std::string* used_text) {
  ComplexityLabel gate = complexity::classify(example);
  std::string input_text = example.text;
  if (splitter != nullptr)
    input_text = splitter::split(*splitter, example.text, gate);
  if (used_text) *used_text = input_text;

  std::vector<Quadruplet> predicted;
  if (opts.per_segment_union && splitter != nullptr &&
      gate == ComplexityLabel::Compound) {
    for (const auto& segment : text::segments(input_text)) {
      for (auto& q : backend.predict(segment, example.task))
        predicted.push_back(std::move(q));
    }
  } else {
    predicted = backend.predict(input_text, example.task);
  }

  // Duplicate predictions count once.
  std::set<Quadruplet> dedup(predicted.begin(), predicted.end());
  return {dedup.begin(), dedup.end()};
}

EvalReport evaluate(const Predictions& predictions,
                    const std::vector<AnnotatedExample>& golds) {
  check_ids(predictions, golds);

  EvalReport report;
  report.n_examples = static_cast<int64_t>(golds.size());
  report.per_complexity[ComplexityLabel::Simple] = {};
  report.per_complexity[ComplexityLabel::Compound] = {};

  struct PerExample {
    int64_t matched = 0, predicted = 0, gold = 0;
    ComplexityLabel label = ComplexityLabel::Simple;
  };
  std::vector<PerExample> rows(golds.size());
  par::parallel_for(golds.size(), [&](size_t i) {
    const auto& ex = golds[i];
    PerExample& row = rows[i];
    match_counts(predictions.at(ex.id), ex.quads, row.matched, row.predicted,
                 row.gold);
    row.label = complexity::classify(ex);
  });

  for (const auto& row : rows) {
    report.matched += row.matched;
    report.predicted += row.predicted;
    report.gold += row.gold;
    SubsetScores& subset = report.per_complexity[row.label];
    subset.matched += row.matched;
    subset.predicted += row.predicted;
    subset.gold += row.gold;
    ++subset.n_examples;
  }

  report.precision = report.predicted == 0
                         ? 0.0
                         : static_cast<double>(report.matched) /
                               static_cast<double>(report.predicted);
  report.recall = report.gold == 0 ? 0.0
                                   : static_cast<double>(report.matched) /
                                         static_cast<double>(report.gold);
  report.f1 = harmonic_f1(report.precision, report.recall);
  for (auto& [label, subset] : report.per_complexity) finalize(subset);
  report.aspect_f1 = aspect_level_f1(predictions, golds);
  return report;
}

double aspect_level_f1(const Predictions& predictions,
                       const std::vector<AnnotatedExample>& golds) {
  check_ids(predictions, golds);
  int64_t matched = 0, n_pred = 0, n_gold = 0;
  for (const auto& ex : golds) {
    std::set<std::string> pset, gset;
    for (const auto& q : predictions.at(ex.id)) pset.insert(q.aspect_term);
    for (const auto& q : ex.quads) gset.insert(q.aspect_term);
    for (const auto& term : pset)
      if (gset.count(term)) ++matched;
    n_pred += static_cast<int64_t>(pset.size());
    n_gold += static_cast<int64_t>(gset.size());
  }
  double p = n_pred == 0 ? 0.0
                         : static_cast<double>(matched) /
                               static_cast<double>(n_pred);
  double r = n_gold == 0 ? 0.0
                         : static_cast<double>(matched) /
                               static_cast<double>(n_gold);
  return harmonic_f1(p, r);
}

OracleCurve oracle_vote(const AnnotatedExample& example,
                        const std::vector<teacher::SplitCandidate>& candidates,
                        pref::AbsaBackend& backend, int max_m) {
  OracleCurve curve;
  double best = pref::sentence_f1(backend.predict(example.text, example.task),
                                  example.quads)
                    .f1;
  curve.points.emplace_back(0, best);
  int limit = std::min<int>(max_m, static_cast<int>(candidates.size()));
  for (int m = 1; m <= limit; ++m) {
    double f = pref::sentence_f1(
                   backend.predict(candidates[m - 1].text, example.task),
                   example.quads)
                   .f1;
    best = std::max(best, f);
    curve.points.emplace_back(m, best);
  }
  return curve;
}

OracleCurve corpus_oracle_curve(
    const std::vector<AnnotatedExample>& examples,
    const std::map<std::string, std::vector<teacher::SplitCandidate>>&
        candidates,
    pref::AbsaBackend& backend, int max_m) {
  if (examples.empty()) throw EmptyDataset("oracle curve over empty corpus");
  pref::MemoBackend memo(backend);
  std::vector<OracleCurve> curves(examples.size());
  static const std::vector<teacher::SplitCandidate> kNone;
  for (size_t i = 0; i < examples.size(); ++i) {
    auto it = candidates.find(examples[i].id);
    curves[i] = oracle_vote(examples[i],
                            it == candidates.end() ? kNone : it->second, memo,
                            max_m);
  }
  OracleCurve mean;
  for (int m = 0; m <= max_m; ++m) {
    double total = 0.0;
    for (const auto& c : curves) {
      // Curves shorter than m hold their last value: the candidate pool for
      // that example is exhausted.
      size_t idx = std::min<size_t>(static_cast<size_t>(m),
                                    c.points.size() - 1);
      total += c.points[idx].second;
    }
    mean.points.emplace_back(m, total / static_cast<double>(curves.size()));
  }
  return mean;
}

std::vector<Quadruplet> project_to_triplet(const std::vector<Quadruplet>& quads,
                                           core::Task target_task) {
  if (target_task != core::Task::TASD && target_task != core::Task::ASTE)
    throw ConfigInvalid("projection target must be TASD or ASTE");
  std::set<Quadruplet> out;
  for (Quadruplet q : quads) {
    if (target_task == core::Task::TASD)
      q.opinion_term.clear();
    else
      q.aspect_category.clear();
    out.insert(std::move(q));
  }
  return {out.begin(), out.end()};
}

}  // namespace atoss::eval

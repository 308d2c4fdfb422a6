#include "atoss/preference.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "atoss/complexity.hpp"
#include "atoss/text.hpp"

namespace atoss::pref {

using core::AnnotatedExample;
using core::Quadruplet;
using teacher::SplitCandidate;

std::vector<Quadruplet> MemoBackend::predict(const std::string& text,
                                             core::Task task) {
  auto key = std::make_pair(text, static_cast<int>(task));
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  auto result = inner_.predict(text, task);
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.emplace(key, std::move(result)).first->second;
}

F1Result sentence_f1(const std::vector<Quadruplet>& predicted,
                     const std::vector<Quadruplet>& gold) {
  std::set<Quadruplet> pset(predicted.begin(), predicted.end());
  std::set<Quadruplet> gset(gold.begin(), gold.end());
  size_t matched = 0;
  for (const auto& q : pset)
    if (gset.count(q)) ++matched;

  F1Result r;
  r.precision = pset.empty() ? 0.0
                             : static_cast<double>(matched) /
                                   static_cast<double>(pset.size());
  r.recall = gset.empty() ? 0.0
                          : static_cast<double>(matched) /
                                static_cast<double>(gset.size());
  r.f1 = (r.precision + r.recall) == 0.0
             ? 0.0
             : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

double similarity(const std::string& a, const std::string& b) {
  std::vector<std::string> ta = text::tokens(a);
  std::vector<std::string> tb = text::tokens(b);
  size_t n = ta.size(), m = tb.size();
  if (n == 0 && m == 0) return 1.0;

  // Two-row Levenshtein over tokens.
  std::vector<size_t> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = j;
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= m; ++j) {
      size_t sub = prev[j - 1] + (ta[i - 1] == tb[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  double dist = static_cast<double>(prev[m]);
  return 1.0 - dist / static_cast<double>(std::max(n, m));
}

void to_json(nlohmann::json& j, const PreferencePair& p) {
  j = nlohmann::json{{"id", p.id},
                     {"source", p.source},
                     {"preferred", p.preferred},
                     {"dispreferred", p.dispreferred},
                     {"f1_original", p.f1_original},
                     {"f1_candidate", p.f1_candidate}};
}

void from_json(const nlohmann::json& j, PreferencePair& p) {
  p.id = j.at("id").get<std::string>();
  p.source = j.at("source").get<std::string>();
  p.preferred = j.at("preferred").get<std::string>();
  p.dispreferred = j.at("dispreferred").get<std::string>();
  p.f1_original = j.value("f1_original", 0.0);
  p.f1_candidate = j.value("f1_candidate", 0.0);
}

namespace {

double backend_f1(AbsaBackend& backend, const std::string& text,
                  const AnnotatedExample& example) {
  return sentence_f1(backend.predict(text, example.task), example.quads).f1;
}

std::vector<std::string> distinct_in_order(
    const std::vector<std::string>& texts) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& t : texts)
    if (seen.insert(t).second) out.push_back(t);
  return out;
}

}  // namespace

std::vector<std::string> select_preferred(
    const AnnotatedExample& example,
    const std::vector<SplitCandidate>& candidates, AbsaBackend& backend) {
  using complexity::ComplexityLabel;
  if (candidates.empty()) return {};

  if (complexity::classify(example) == ComplexityLabel::Simple) {
    std::vector<std::string> matching;
    for (const auto& c : candidates)
      if (c.segments.size() == example.quads.size()) matching.push_back(c.text);
    return distinct_in_order(matching);
  }

  double f0 = backend_f1(backend, example.text, example);
  double best = -1.0;
  std::vector<double> scores(candidates.size());
  for (size_t i = 0; i < candidates.size(); ++i) {
    scores[i] = backend_f1(backend, candidates[i].text, example);
    best = std::max(best, scores[i]);
  }
  if (f0 > best) return {};
  if (f0 == best) return {example.text};
  std::vector<std::string> better;
  for (size_t i = 0; i < candidates.size(); ++i)
    if (scores[i] > f0) better.push_back(candidates[i].text);
  return distinct_in_order(better);
}

std::vector<std::string> select_dispreferred(
    const AnnotatedExample& example, const std::vector<SplitCandidate>& beams,
    AbsaBackend& backend) {
  using complexity::ComplexityLabel;

  // The original sentence never serves as dispreferred.
  std::vector<const SplitCandidate*> pool;
  for (const auto& b : beams)
    if (b.text != example.text) pool.push_back(&b);
  if (pool.empty()) return {};

  auto argmax_similarity = [&](auto&& eligible) -> std::vector<std::string> {
    double best = -1.0;
    std::string best_text;
    for (const SplitCandidate* c : eligible) {
      double s = similarity(c->text, example.text);
      if (s > best || (s == best && c->text < best_text)) {
        best = s;
        best_text = c->text;
      }
    }
    if (best < 0.0) return {};
    return {best_text};
  };

  if (complexity::classify(example) == ComplexityLabel::Simple)
    return argmax_similarity(pool);

  double f0 = backend_f1(backend, example.text, example);
  double best_f1 = -1.0;
  std::map<const SplitCandidate*, double> scores;
  for (const SplitCandidate* c : pool) {
    scores[c] = backend_f1(backend, c->text, example);
    best_f1 = std::max(best_f1, scores[c]);
  }

  if (f0 < best_f1) return {};
  if (f0 == best_f1) {
    // Equal scores: lowest similarity to the original.
    double worst = 2.0;
    std::string worst_text;
    for (const SplitCandidate* c : pool) {
      double s = similarity(c->text, example.text);
      if (s < worst || (s == worst && c->text < worst_text)) {
        worst = s;
        worst_text = c->text;
      }
    }
    return {worst_text};
  }
  // Original wins: most-similar beam among those scoring below it.
  std::vector<const SplitCandidate*> lower;
  for (const SplitCandidate* c : pool)
    if (scores[c] < f0) lower.push_back(c);
  return argmax_similarity(lower);
}

std::vector<PreferencePair> build_pairs(
    const std::vector<AnnotatedExample>& examples,
    const std::map<std::string, std::vector<SplitCandidate>>& few_shot,
    const std::map<std::string, std::vector<SplitCandidate>>& beams,
    AbsaBackend& backend) {
  MemoBackend memo(backend);
  std::vector<PreferencePair> pairs;
  for (const auto& ex : examples) {
    auto fs = few_shot.find(ex.id);
    auto bm = beams.find(ex.id);
    std::vector<SplitCandidate> none;
    const auto& fs_c = fs == few_shot.end() ? none : fs->second;
    const auto& bm_c = bm == beams.end() ? none : bm->second;

    std::vector<std::string> preferred = select_preferred(ex, fs_c, memo);
    std::vector<std::string> dispreferred =
        select_dispreferred(ex, bm_c, memo);
    if (preferred.empty() || dispreferred.empty()) continue;

    double f0 = backend_f1(memo, ex.text, ex);
    for (const auto& p : preferred) {
      for (const auto& d : dispreferred) {
        if (p == d) continue;
        PreferencePair pair;
        pair.id = ex.id;
        pair.source = ex.text;
        pair.preferred = p;
        pair.dispreferred = d;
        pair.f1_original = f0;
        pair.f1_candidate = backend_f1(memo, p, ex);
        pairs.push_back(std::move(pair));
      }
    }
  }
  return pairs;
}

void DpoConfig::validate() const {
  if (beta < 0.0) throw ConfigInvalid("dpo beta must be >= 0");
  if (batch <= 0 || epochs <= 0 || learning_rate <= 0.0)
    throw ConfigInvalid("dpo batch/epochs/learning_rate must be positive");
  if (loss_kind != "sigmoid")
    throw ConfigInvalid("unsupported dpo loss kind: " + loss_kind);
}

namespace {

// -log sigmoid(z), computed stably for large |z|.
double neg_log_sigmoid(double z) {
  if (z >= 0.0) return std::log1p(std::exp(-z));
  return -z + std::log1p(std::exp(z));
}

double pair_margin(const model::SeqModel& policy,
                   const model::SeqModel& reference,
                   const PreferencePair& pair, double beta) {
  double delta_pos = policy.log_prob(pair.source, pair.preferred) -
                     reference.log_prob(pair.source, pair.preferred);
  double delta_neg = policy.log_prob(pair.source, pair.dispreferred) -
                     reference.log_prob(pair.source, pair.dispreferred);
  return beta * (delta_pos - delta_neg);
}

}  // namespace

double dpo_loss(const model::SeqModel& policy, const model::SeqModel& reference,
                const PreferencePair& pair, const DpoConfig& config) {
  return neg_log_sigmoid(pair_margin(policy, reference, pair, config.beta));
}

DpoLog train_dpo(model::TrainableSeqModel& policy,
                 const std::vector<PreferencePair>& pairs,
                 const DpoConfig& config) {
  config.validate();
  if (pairs.empty()) throw EmptyPairs("train_dpo requires preference pairs");

  std::unique_ptr<model::TrainableSeqModel> reference = policy.clone();

  DpoLog log;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (size_t begin = 0; begin < pairs.size();
         begin += static_cast<size_t>(config.batch)) {
      size_t end =
          std::min(pairs.size(), begin + static_cast<size_t>(config.batch));
      double batch_n = static_cast<double>(end - begin);

      policy.zero_grad();
      double loss_total = 0.0;
      for (size_t i = begin; i < end; ++i) {
        const PreferencePair& pair = pairs[i];
        double z = pair_margin(policy, *reference, pair, config.beta);
        loss_total += neg_log_sigmoid(z);
        // dL/dz = -sigmoid(-z); accumulate beta-scaled log-prob gradients.
        double coeff = -1.0 / (1.0 + std::exp(z));  // == -sigmoid(-z)
        if (config.beta != 0.0) {
          policy.accumulate_log_prob_grad(pair.source, pair.preferred,
                                          coeff * config.beta / batch_n);
          policy.accumulate_log_prob_grad(pair.source, pair.dispreferred,
                                          -coeff * config.beta / batch_n);
        }
        if (!std::isfinite(loss_total))
          throw DivergedLoss("non-finite DPO loss");
      }
      policy.apply_grad(config.learning_rate);
      log.step_mean_loss.push_back(loss_total / batch_n);
    }
  }

  double final_total = 0.0;
  for (const auto& pair : pairs)
    final_total += dpo_loss(policy, *reference, pair, config);
  log.final_mean_loss = final_total / static_cast<double>(pairs.size());
  return log;
}

}  // namespace atoss::pref

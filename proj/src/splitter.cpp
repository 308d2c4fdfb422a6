#include "atoss/splitter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "atoss/core_json.hpp"

namespace atoss::splitter {

double sft_loss(const model::SeqModel& model, const std::string& source,
                const std::string& target) {
  if (target.empty()) throw EmptyCorpus("sft_loss requires a non-empty target");
  return -model.log_prob(source, target);
}

void to_json(nlohmann::json& j, const SftRecord& r) {
  j = nlohmann::json{
      {"id", r.id}, {"source", r.source}, {"target", r.target},
      {"quads", r.quads}};
}

void from_json(const nlohmann::json& j, SftRecord& r) {
  r.id = j.at("id").get<std::string>();
  r.source = j.at("source").get<std::string>();
  r.target = j.at("target").get<std::string>();
  r.quads = j.at("quads").get<std::vector<core::Quadruplet>>();
}

namespace {

double mean_nll(const model::SeqModel& model,
                const std::vector<SftRecord>& records) {
  double total = 0.0;
  for (const auto& r : records) total += sft_loss(model, r.source, r.target);
  return total / static_cast<double>(records.size());
}

}  // namespace

TrainLog train_sft(model::TrainableSeqModel& model,
                   const std::vector<SftRecord>& corpus,
                   const model::SftConfig& config,
                   const std::vector<SftRecord>& val) {
  config.validate();
  if (corpus.empty()) throw EmptyCorpus("train_sft requires a non-empty corpus");

  // The tiny backend exposes parameter snapshots through the Trainable
  // interface; keep the best-validation parameters and restore at the end.
  std::vector<double> best_params(model.param_count());
  auto snapshot = [&](std::vector<double>& dst) {
    for (size_t i = 0; i < model.param_count(); ++i) dst[i] = model.get_param(i);
  };
  auto restore = [&](const std::vector<double>& src) {
    for (size_t i = 0; i < model.param_count(); ++i) model.set_param(i, src[i]);
  };

  TrainLog log;
  double best_val = std::numeric_limits<double>::infinity();
  int since_improved = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    double train_total = 0.0;
    size_t seen = 0;
    for (size_t begin = 0; begin < corpus.size();
         begin += static_cast<size_t>(config.train_batch)) {
      size_t end = std::min(corpus.size(),
                            begin + static_cast<size_t>(config.train_batch));
      std::vector<model::Pair> batch;
      batch.reserve(end - begin);
      for (size_t i = begin; i < end; ++i)
        batch.emplace_back(corpus[i].source, corpus[i].target);
      double nll = model.train_step(batch, config.learning_rate);
      if (!std::isfinite(nll))
        throw DivergedLoss("non-finite training loss at epoch " +
                           std::to_string(epoch));
      train_total += nll * static_cast<double>(batch.size());
      seen += batch.size();
    }
    double train_nll = train_total / static_cast<double>(seen);
    double val_nll = val.empty() ? train_nll : mean_nll(model, val);
    if (!std::isfinite(val_nll))
      throw DivergedLoss("non-finite validation loss at epoch " +
                         std::to_string(epoch));

    bool improved = val_nll < best_val;
    if (improved) {
      best_val = val_nll;
      log.best_epoch = epoch;
      snapshot(best_params);
      since_improved = 0;
    } else {
      ++since_improved;
    }
    log.epochs.push_back({epoch, train_nll, val_nll, improved});
    if (since_improved >= config.early_stop_patience) break;
  }

  restore(best_params);
  log.best_val = best_val;
  return log;
}

std::vector<teacher::SplitCandidate> generate_splits(
    const model::SeqModel& model, const std::string& source, int width,
    const std::string& source_id) {
  std::vector<teacher::SplitCandidate> out;
  for (const auto& scored : model.beam_generate(source, width)) {
    auto c = teacher::make_candidate(source_id, scored.text,
                                     teacher::Origin::beam);
    c.criteria_score = 0.0;
    out.push_back(std::move(c));
  }
  return out;
}

std::string split(const model::SeqModel& model, const std::string& text,
                  std::optional<complexity::ComplexityLabel> gate) {
  if (gate && *gate == complexity::ComplexityLabel::Simple) return text;
  auto beams = model.beam_generate(text, 1);
  if (beams.empty()) return text;
  return beams.front().text;
}

}  // namespace atoss::splitter

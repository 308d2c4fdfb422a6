#include "atoss/tiny_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <random>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "atoss/error.hpp"
#include "atoss/kernels.hpp"
#include "atoss/parallel.hpp"
#include "atoss/records.hpp"

namespace atoss::model {

using nlohmann::json;

namespace {
constexpr int kUnk = 95;
constexpr int kBos = 96;
constexpr int kEos = 97;
constexpr int kSrcWindow = 4;
constexpr int kHist = 3;
constexpr int kScalars = 3;
}  // namespace

void SftConfig::validate() const {
  if (train_batch <= 0 || val_batch <= 0 || epochs <= 0 ||
      learning_rate <= 0.0 || early_stop_patience <= 0)
    throw ConfigInvalid("sft config fields must all be positive");
}

struct TinySeq2Seq::DecodeState {
  size_t cursor = 0;
  bool last_match = false;
  std::array<int, kHist> hist{kBos, kBos, kBos};
};

struct TinySeq2Seq::StepTape {
  std::vector<double> phi;
  std::vector<double> hidden;
  std::vector<double> probs;
  int emitted = kEos;
  std::array<int, kSrcWindow + kHist> embed_ids{};
};

TinySeq2Seq::TinySeq2Seq(TinyConfig config) : config_(config) {
  if (config_.embed_dim < 2 || config_.hidden_dim < 2 || config_.max_len < 8)
    throw ConfigInvalid("tiny model dims too small");
  const int d = config_.embed_dim;
  const int h = config_.hidden_dim;
  feat_dim_ = (kSrcWindow + kHist) * d + kScalars;

  off_embed_ = 0;
  off_w1_ = off_embed_ + static_cast<size_t>(kVocab) * d;
  off_b1_ = off_w1_ + static_cast<size_t>(h) * feat_dim_;
  off_w2_ = off_b1_ + static_cast<size_t>(h);
  off_b2_ = off_w2_ + static_cast<size_t>(kVocab) * h;
  params_.assign(off_b2_ + kVocab, 0.0);
  grads_.assign(params_.size(), 0.0);

  std::mt19937_64 rng(config_.seed);
  std::normal_distribution<double> embed_init(0.0, 0.1);
  std::normal_distribution<double> w1_init(0.0, 1.0 / std::sqrt(feat_dim_));
  std::normal_distribution<double> w2_init(0.0, 1.0 / std::sqrt(h));
  for (size_t i = off_embed_; i < off_w1_; ++i) params_[i] = embed_init(rng);
  for (size_t i = off_w1_; i < off_b1_; ++i) params_[i] = w1_init(rng);
  for (size_t i = off_w2_; i < off_b2_; ++i) params_[i] = w2_init(rng);
}

std::vector<int> TinySeq2Seq::encode(const std::string& s) const {
  std::vector<int> out;
  out.reserve(s.size());
  for (unsigned char c : s)
    out.push_back(c >= 0x20 && c <= 0x7E ? c - 0x20 : kUnk);
  return out;
}

std::array<int, 7> TinySeq2Seq::embed_ids(const std::vector<int>& source,
                                          const DecodeState& state) {
  std::array<int, kSrcWindow + kHist> ids{};
  for (int i = 0; i < kSrcWindow; ++i) {
    size_t pos = state.cursor + static_cast<size_t>(i);
    ids[i] = pos < source.size() ? source[pos] : kEos;
  }
  for (int i = 0; i < kHist; ++i) ids[kSrcWindow + i] = state.hist[i];
  return ids;
}

void TinySeq2Seq::features(const std::vector<int>& source,
                           const DecodeState& state,
                           std::vector<double>& phi) const {
  const int d = config_.embed_dim;
  phi.assign(feat_dim_, 0.0);
  const double* embed = params_.data() + off_embed_;
  auto ids = embed_ids(source, state);
  int slot = 0;
  for (int id : ids) {
    std::memcpy(phi.data() + slot * d, embed + id * d,
                sizeof(double) * static_cast<size_t>(d));
    ++slot;
  }
  double n = std::max<double>(1.0, static_cast<double>(source.size()));
  phi[slot * d + 0] = state.last_match ? 1.0 : 0.0;
  phi[slot * d + 1] = static_cast<double>(state.cursor) / n;
  phi[slot * d + 2] =
      (static_cast<double>(source.size()) - static_cast<double>(state.cursor)) /
      n;
}

void TinySeq2Seq::step_logits(const std::vector<int>& source,
                              const DecodeState& state,
                              std::vector<double>& logp,
                              StepTape* tape) const {
  const int h = config_.hidden_dim;
  std::vector<double> phi;
  features(source, state, phi);

  std::vector<double> hidden(static_cast<size_t>(h));
  kern::affine(params_.data() + off_w1_, params_.data() + off_b1_, phi.data(),
               hidden.data(), static_cast<size_t>(h),
               static_cast<size_t>(feat_dim_));
  for (double& v : hidden) v = std::tanh(v);

  logp.assign(kVocab, 0.0);
  kern::affine(params_.data() + off_w2_, params_.data() + off_b2_,
               hidden.data(), logp.data(), kVocab, static_cast<size_t>(h));
  kern::log_softmax(logp.data(), kVocab);

  if (tape) {
    tape->phi = std::move(phi);
    tape->hidden = std::move(hidden);
    tape->probs.assign(kVocab, 0.0);
    for (int v = 0; v < kVocab; ++v) tape->probs[v] = std::exp(logp[v]);
  }
}

void TinySeq2Seq::advance(DecodeState& state, int emitted,
                          const std::vector<int>& source) {
  if (state.cursor < source.size() && emitted == source[state.cursor]) {
    state.cursor += 1;
    state.last_match = true;
  } else if (state.cursor + 1 < source.size() &&
             emitted == source[state.cursor + 1]) {
    state.cursor += 2;
    state.last_match = true;
  } else {
    state.last_match = false;
  }
  for (int i = kHist - 1; i > 0; --i) state.hist[i] = state.hist[i - 1];
  state.hist[0] = emitted;
}

std::vector<double> TinySeq2Seq::token_log_probs(
    const std::string& source, const std::string& target) const {
  std::vector<int> src = encode(source);
  std::vector<int> tgt = encode(target);
  std::vector<double> out;
  out.reserve(tgt.size() + 1);
  DecodeState state;
  std::vector<double> logp;
  for (int y : tgt) {
    step_logits(src, state, logp, nullptr);
    out.push_back(logp[y]);
    advance(state, y, src);
  }
  step_logits(src, state, logp, nullptr);
  out.push_back(logp[kEos]);
  return out;
}

double TinySeq2Seq::log_prob(const std::string& source,
                             const std::string& target) const {
  double total = 0.0;
  for (double lp : token_log_probs(source, target)) total += lp;
  return total;
}

double TinySeq2Seq::grad_log_prob(const std::vector<int>& source,
                                  const std::vector<int>& target, double coeff,
                                  std::vector<double>& grad) const {
  const int d = config_.embed_dim;
  const int h = config_.hidden_dim;

  std::vector<StepTape> tapes(target.size() + 1);
  double total = 0.0;
  {
    DecodeState state;
    std::vector<double> logp;
    for (size_t t = 0; t <= target.size(); ++t) {
      int y = t < target.size() ? target[t] : kEos;
      step_logits(source, state, logp, &tapes[t]);
      tapes[t].emitted = y;
      tapes[t].embed_ids = embed_ids(source, state);
      total += logp[y];
      if (t < target.size()) advance(state, y, source);
    }
  }

  std::vector<double> dlogits(kVocab);
  std::vector<double> dhidden(static_cast<size_t>(h));
  std::vector<double> dphi(static_cast<size_t>(feat_dim_));
  for (const StepTape& tape : tapes) {
    // d log p(y) / d logits = onehot(y) - softmax
    for (int v = 0; v < kVocab; ++v) dlogits[v] = -tape.probs[v];
    dlogits[tape.emitted] += 1.0;

    kern::accum_outer(grad.data() + off_w2_, grad.data() + off_b2_,
                      dlogits.data(), tape.hidden.data(), coeff, kVocab,
                      static_cast<size_t>(h));
    kern::affine_backward_input(params_.data() + off_w2_, dlogits.data(),
                                dhidden.data(), kVocab,
                                static_cast<size_t>(h));
    for (int i = 0; i < h; ++i)
      dhidden[i] *= 1.0 - tape.hidden[i] * tape.hidden[i];

    kern::accum_outer(grad.data() + off_w1_, grad.data() + off_b1_,
                      dhidden.data(), tape.phi.data(), coeff,
                      static_cast<size_t>(h), static_cast<size_t>(feat_dim_));
    kern::affine_backward_input(params_.data() + off_w1_, dhidden.data(),
                                dphi.data(), static_cast<size_t>(h),
                                static_cast<size_t>(feat_dim_));

    int slot = 0;
    for (int id : tape.embed_ids) {
      double* ge = grad.data() + off_embed_ + static_cast<size_t>(id) * d;
      const double* dph = dphi.data() + slot * d;
      for (int k = 0; k < d; ++k) ge[k] += coeff * dph[k];
      ++slot;
    }
  }
  return total;
}

void TinySeq2Seq::zero_grad() { std::fill(grads_.begin(), grads_.end(), 0.0); }

void TinySeq2Seq::accumulate_log_prob_grad(const std::string& source,
                                           const std::string& target,
                                           double coeff) {
  grad_log_prob(encode(source), encode(target), coeff, grads_);
}

void TinySeq2Seq::apply_grad(double learning_rate) {
  for (size_t i = 0; i < params_.size(); ++i)
    params_[i] -= learning_rate * grads_[i];
}

double TinySeq2Seq::train_step(const std::vector<Pair>& batch,
                               double learning_rate) {
  if (batch.empty()) throw EmptyCorpus("train_step on empty batch");
  const size_t B = batch.size();
  std::vector<std::vector<double>> per_example(B);
  std::vector<double> nll(B, 0.0);
  par::parallel_for(B, [&](size_t i) {
    per_example[i].assign(params_.size(), 0.0);
    double lp = grad_log_prob(encode(batch[i].first), encode(batch[i].second),
                              -1.0 / static_cast<double>(B), per_example[i]);
    nll[i] = -lp;
  });
  zero_grad();
  // Serial reduction in example order keeps results independent of thread
  // count.
  for (size_t i = 0; i < B; ++i)
    for (size_t p = 0; p < grads_.size(); ++p) grads_[p] += per_example[i][p];
  apply_grad(learning_rate);
  double mean = 0.0;
  for (double v : nll) mean += v;
  return mean / static_cast<double>(B);
}

std::vector<ScoredText> TinySeq2Seq::beam_generate(const std::string& source,
                                                   int width) const {
  if (width < 1) return {};
  std::vector<int> src = encode(source);
  size_t cap = std::min<size_t>(static_cast<size_t>(config_.max_len),
                                src.size() * 4 + 16);

  struct Hyp {
    DecodeState state;
    std::string text;
    double score = 0.0;
  };
  std::vector<Hyp> live(1);
  std::vector<ScoredText> finished;

  std::vector<double> logp;
  for (size_t step = 0; step < cap && !live.empty(); ++step) {
    std::vector<Hyp> next;
    next.reserve(live.size() * 8);
    for (const Hyp& hyp : live) {
      step_logits(src, hyp.state, logp, nullptr);
      finished.push_back({hyp.text, hyp.score + logp[kEos]});
      for (int v = 0; v < kVocab; ++v) {
        if (v == kEos || v == kBos) continue;
        Hyp ext = hyp;
        ext.score += logp[v];
        char c = v == kUnk ? '?' : static_cast<char>(v + 0x20);
        ext.text.push_back(c);
        advance(ext.state, v, src);
        next.push_back(std::move(ext));
      }
    }
    std::sort(next.begin(), next.end(), [](const Hyp& a, const Hyp& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.text < b.text;
    });
    if (next.size() > static_cast<size_t>(width))
      next.resize(static_cast<size_t>(width));
    // Stop expanding once every live hypothesis scores below the best
    // finished one; extensions only lose probability mass.
    if (!finished.empty()) {
      double best_finished = -1e300;
      for (const auto& f : finished)
        best_finished = std::max(best_finished, f.score);
      bool any_viable = false;
      for (const auto& hyp : next)
        if (hyp.score > best_finished) any_viable = true;
      if (!any_viable && finished.size() >= static_cast<size_t>(width)) break;
    }
    live = std::move(next);
  }
  // Hypotheses that hit the cap finish with their EOS term appended.
  for (const Hyp& hyp : live) {
    step_logits(src, hyp.state, logp, nullptr);
    finished.push_back({hyp.text, hyp.score + logp[kEos]});
  }

  std::sort(finished.begin(), finished.end(),
            [](const ScoredText& a, const ScoredText& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.text < b.text;
            });
  std::vector<ScoredText> out;
  std::unordered_set<std::string> seen;
  for (auto& f : finished) {
    if (!seen.insert(f.text).second) continue;
    out.push_back(std::move(f));
    if (out.size() == static_cast<size_t>(width)) break;
  }
  return out;
}

std::unique_ptr<TrainableSeqModel> TinySeq2Seq::clone() const {
  return std::make_unique<TinySeq2Seq>(*this);
}

void TinySeq2Seq::restore(const std::vector<double>& params) {
  if (params.size() != params_.size())
    throw ConfigInvalid("parameter snapshot size mismatch");
  params_ = params;
}

namespace {

std::string double_to_hex(double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(bits));
  return buf;
}

double hex_to_double(const std::string& s) {
  uint64_t bits = std::strtoull(s.c_str(), nullptr, 16);
  double v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

}  // namespace

void save_checkpoint(const std::string& dir, const TinySeq2Seq& model,
                     const CheckpointMeta& meta) {
  std::filesystem::create_directories(dir);
  json cfg = {{"embed_dim", model.config().embed_dim},
              {"hidden_dim", model.config().hidden_dim},
              {"max_len", model.config().max_len},
              {"seed", model.config().seed}};
  json params = json::array();
  for (double v : model.snapshot()) params.push_back(double_to_hex(v));
  json doc = {{"backend_name", meta.backend_name.empty()
                                   ? model.backend_name()
                                   : meta.backend_name},
              {"config", cfg},
              {"epoch", meta.epoch},
              {"val_loss", meta.val_loss},
              {"params", params}};
  util::atomic_write((std::filesystem::path(dir) / "model.json").string(),
                     [&](std::ostream& out) { out << doc.dump() << '\n'; });
}

TinySeq2Seq load_checkpoint(const std::string& dir, CheckpointMeta* meta) {
  std::string path = (std::filesystem::path(dir) / "model.json").string();
  json doc = json::parse(util::read_file(path));
  TinyConfig cfg;
  cfg.embed_dim = doc.at("config").at("embed_dim").get<int>();
  cfg.hidden_dim = doc.at("config").at("hidden_dim").get<int>();
  cfg.max_len = doc.at("config").at("max_len").get<int>();
  cfg.seed = doc.at("config").at("seed").get<uint64_t>();
  TinySeq2Seq model(cfg);
  std::vector<double> params;
  for (const auto& hex : doc.at("params"))
    params.push_back(hex_to_double(hex.get<std::string>()));
  model.restore(params);
  if (meta) {
    meta->backend_name = doc.at("backend_name").get<std::string>();
    meta->config = cfg;
    meta->epoch = doc.at("epoch").get<int>();
    meta->val_loss = doc.at("val_loss").get<double>();
  }
  return model;
}

}  // namespace atoss::model

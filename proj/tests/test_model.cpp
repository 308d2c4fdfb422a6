#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "atoss/parallel.hpp"
#include "atoss/tiny_model.hpp"

using namespace atoss;
using model::TinyConfig;
using model::TinySeq2Seq;

namespace {

TinyConfig small_config(uint64_t seed = 17) {
  TinyConfig cfg;
  cfg.embed_dim = 8;
  cfg.hidden_dim = 24;
  cfg.max_len = 96;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("log_prob equals the sum of per-token log probabilities") {
  TinySeq2Seq m(small_config());
  std::string source = "the pizza was great and the beer was warm .";
  std::string target = "the pizza was great . and the beer was warm .";
  auto per_token = m.token_log_probs(source, target);
  CHECK(per_token.size() == target.size() + 1);  // terminal EOS
  double total = 0.0;
  for (double lp : per_token) {
    CHECK(lp <= 0.0);
    total += lp;
  }
  CHECK(m.log_prob(source, target) == doctest::Approx(total).epsilon(1e-15));
  CHECK(m.log_prob(source, target) <= 0.0);
}

TEST_CASE("log_prob is deterministic and seed-dependent") {
  TinySeq2Seq a(small_config(1)), b(small_config(1)), c(small_config(2));
  CHECK(a.log_prob("abc", "abd") == b.log_prob("abc", "abd"));
  CHECK(a.log_prob("abc", "abd") != c.log_prob("abc", "abd"));
}

TEST_CASE("analytic gradient matches central finite differences") {
  TinySeq2Seq m(small_config(29));
  std::string source = "the soup was bland .";
  std::string target = "the soup was bland . ok";

  m.zero_grad();
  m.accumulate_log_prob_grad(source, target, 1.0);

  std::mt19937_64 rng(4242);
  const double eps = 1e-6;
  int checked = 0;
  while (checked < 20) {
    size_t i = rng() % m.param_count();
    double saved = m.get_param(i);
    m.set_param(i, saved + eps);
    double plus = m.log_prob(source, target);
    m.set_param(i, saved - eps);
    double minus = m.log_prob(source, target);
    m.set_param(i, saved);

    double numeric = (plus - minus) / (2.0 * eps);
    double analytic = m.get_grad(i);
    if (std::abs(numeric) < 1e-10 && std::abs(analytic) < 1e-10) {
      ++checked;  // both zero: untouched parameter
      continue;
    }
    double rel = std::abs(numeric - analytic) /
                 std::max({std::abs(numeric), std::abs(analytic), 1e-12});
    CHECK(rel < 1e-4);
    ++checked;
  }
}

TEST_CASE("train_step lowers the loss on a tiny batch") {
  TinySeq2Seq m(small_config(5));
  std::vector<model::Pair> batch = {{"ab", "ab"}, {"cd", "cd"}};
  double first = m.train_step(batch, 0.5);
  double loss = first;
  for (int i = 0; i < 60; ++i) loss = m.train_step(batch, 0.5);
  CHECK(loss < 0.5 * first);
  CHECK(std::isfinite(loss));
}

TEST_CASE("train_step is deterministic regardless of thread count") {
  std::vector<model::Pair> batch;
  for (int i = 0; i < 6; ++i)
    batch.emplace_back("source " + std::to_string(i),
                       "target " + std::to_string(i));

  par::set_threads(1);
  TinySeq2Seq m1(small_config(7));
  for (int i = 0; i < 5; ++i) m1.train_step(batch, 0.1);

  par::set_threads(4);
  TinySeq2Seq m4(small_config(7));
  for (int i = 0; i < 5; ++i) m4.train_step(batch, 0.1);
  par::set_threads(0);

  REQUIRE(m1.param_count() == m4.param_count());
  for (size_t i = 0; i < m1.param_count(); ++i)
    CHECK(m1.get_param(i) == m4.get_param(i));
}

TEST_CASE("beam_generate yields distinct candidates with sorted scores") {
  TinySeq2Seq m(small_config(3));
  auto beams = m.beam_generate("the pizza was great .", 10);
  CHECK(beams.size() <= 10);
  CHECK(!beams.empty());
  for (size_t i = 0; i + 1 < beams.size(); ++i) {
    CHECK(beams[i].score >= beams[i + 1].score);
    for (size_t j = i + 1; j < beams.size(); ++j)
      CHECK(beams[i].text != beams[j].text);
  }
  // Scores are consistent with log_prob.
  for (const auto& b : beams)
    CHECK(b.score ==
          doctest::Approx(m.log_prob("the pizza was great .", b.text))
              .epsilon(1e-9));
}

TEST_CASE("width=1 beam equals greedy decoding") {
  TinySeq2Seq m(small_config(13));
  auto one = m.beam_generate("abc .", 1);
  REQUIRE(one.size() == 1);
  auto ten = m.beam_generate("abc .", 10);
  // The greedy result is not necessarily the global best under beam
  // search, but it must appear among the wider beam's texts only if scores
  // coincide; the width-1 contract is simply "one candidate, best-effort".
  CHECK(one[0].score <= ten[0].score + 1e-12);
}

TEST_CASE("checkpoint round-trip preserves parameters bit-exactly") {
  TinySeq2Seq m(small_config(21));
  std::vector<model::Pair> batch = {{"ab c", "ab c"}};
  m.train_step(batch, 0.3);

  std::string dir = (std::filesystem::temp_directory_path() /
                     "atoss_ckpt_test")
                        .string();
  model::CheckpointMeta meta;
  meta.epoch = 3;
  meta.val_loss = 1.25;
  model::save_checkpoint(dir, m, meta);

  model::CheckpointMeta loaded_meta;
  TinySeq2Seq loaded = model::load_checkpoint(dir, &loaded_meta);
  CHECK(loaded_meta.epoch == 3);
  CHECK(loaded_meta.val_loss == 1.25);
  REQUIRE(loaded.param_count() == m.param_count());
  for (size_t i = 0; i < m.param_count(); ++i)
    CHECK(loaded.get_param(i) == m.get_param(i));
  std::filesystem::remove_all(dir);
}

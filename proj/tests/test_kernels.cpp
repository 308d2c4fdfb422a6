#include <doctest.h>

#include <random>

#include "atoss/kernels.hpp"
#include "atoss/parallel.hpp"
#include "atoss/text.hpp"

using namespace atoss;

// The OpenMP kernels parallelize over independent output rows, so they must
// agree with the serial reference bit for bit, not just approximately.
TEST_CASE("omp kernels match serial reference exactly") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    size_t rows = 1 + rng() % 64;
    size_t cols = 1 + rng() % 64;
    std::vector<double> w(rows * cols), b(rows), x(cols), dy(rows);
    for (auto& v : w) v = dist(rng);
    for (auto& v : b) v = dist(rng);
    for (auto& v : x) v = dist(rng);
    for (auto& v : dy) v = dist(rng);

    std::vector<double> y1(rows), y2(rows);
    kern::affine_serial(w.data(), b.data(), x.data(), y1.data(), rows, cols);
    kern::affine_omp(w.data(), b.data(), x.data(), y2.data(), rows, cols);
    CHECK(y1 == y2);

    std::vector<double> gw1(rows * cols, 0.5), gb1(rows, 0.25);
    std::vector<double> gw2 = gw1, gb2 = gb1;
    kern::accum_outer_serial(gw1.data(), gb1.data(), dy.data(), x.data(), 0.7,
                             rows, cols);
    kern::accum_outer_omp(gw2.data(), gb2.data(), dy.data(), x.data(), 0.7,
                          rows, cols);
    CHECK(gw1 == gw2);
    CHECK(gb1 == gb2);

    std::vector<double> dx1(cols), dx2(cols);
    kern::affine_backward_input_serial(w.data(), dy.data(), dx1.data(), rows,
                                       cols);
    kern::affine_backward_input_omp(w.data(), dy.data(), dx2.data(), rows,
                                    cols);
    CHECK(dx1 == dx2);
  }
}

TEST_CASE("log_softmax normalizes") {
  std::vector<double> x = {1.0, 2.0, 3.0, -5.0};
  kern::log_softmax(x.data(), x.size());
  double sum = 0.0;
  for (double v : x) {
    CHECK(v <= 0.0);
    sum += std::exp(v);
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("thread count does not change results") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> dist(0.0, 1.0);
  size_t rows = 37, cols = 53;
  std::vector<double> w(rows * cols), b(rows), x(cols);
  for (auto& v : w) v = dist(rng);
  for (auto& v : b) v = dist(rng);
  for (auto& v : x) v = dist(rng);

  par::set_threads(1);
  std::vector<double> y1(rows);
  kern::affine(w.data(), b.data(), x.data(), y1.data(), rows, cols);
  par::set_threads(4);
  std::vector<double> y4(rows);
  kern::affine(w.data(), b.data(), x.data(), y4.data(), rows, cols);
  par::set_threads(0);
  CHECK(y1 == y4);
}

TEST_CASE("parallel_for covers every index exactly once") {
  std::vector<int> hits(1000, 0);
  par::parallel_for(hits.size(), [&](size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("segment splitting") {
  auto segs = text::segments(
      "i ' ve  never had bad service . and the fish is fresh and delicious .");
  REQUIRE(segs.size() == 2);
  CHECK(segs[0] == "i ' ve  never had bad service .");
  CHECK(segs[1] == "and the fish is fresh and delicious .");

  CHECK(text::segments("no boundary here").size() == 1);
  CHECK(text::segments("a ! b ? c .").size() == 3);
  // Punctuation not followed by space is not a boundary.
  CHECK(text::segments("3.5 stars .").size() == 1);
  CHECK(text::segments("").empty());
}

TEST_CASE("whitespace normalization") {
  CHECK(text::normalize_ws("  The   Pizza\twas  GREAT  ") ==
        "the pizza was great");
  CHECK(text::contains_normalized("the Pizza  was great", "pizza was"));
  CHECK_FALSE(text::contains_normalized("the pizza", "beer"));
}

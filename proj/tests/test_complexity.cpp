#include <doctest.h>

#include <random>

#include "atoss/complexity.hpp"

using namespace atoss;
using complexity::ComplexityLabel;
using core::AnnotatedExample;
using core::Polarity;
using core::Quadruplet;

namespace {

AnnotatedExample make(const std::string& text, int quads) {
  AnnotatedExample ex;
  ex.text = text;
  for (int i = 0; i < quads; ++i) {
    Quadruplet q;
    q.aspect_term = "null";
    q.aspect_category = "c";
    q.polarity = Polarity::positive;
    q.opinion_term = "null";
    ex.quads.push_back(q);
  }
  return ex;
}

}  // namespace

TEST_CASE("single-quad conjunction-free sentence is simple") {
  CHECK(complexity::classify(make("the pizza was great .", 1)) ==
        ComplexityLabel::Simple);
}

TEST_CASE("multi-quad examples are always compound") {
  CHECK(complexity::classify(make("the pizza was great .", 2)) ==
        ComplexityLabel::Compound);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    int quads = 2 + int(rng() % 4);
    CHECK(complexity::classify(make("anything at all", quads)) ==
          ComplexityLabel::Compound);
  }
}

TEST_CASE("single-quad sentence with a conjunction is compound") {
  CHECK(complexity::classify(
            make("i will be going back and heartily recommend it !", 1)) ==
        ComplexityLabel::Compound);
  CHECK(complexity::classify(make("cheap or cheerful", 1)) ==
        ComplexityLabel::Compound);
  CHECK(complexity::classify(make("nice but slow", 1)) ==
        ComplexityLabel::Compound);
  CHECK(complexity::classify(make("good , bad", 1)) ==
        ComplexityLabel::Compound);
}

TEST_CASE("conjunction matching is on whole tokens only") {
  CHECK(complexity::classify(make("the band was great .", 1)) ==
        ComplexityLabel::Simple);
  CHECK(complexity::classify(make("sandy beach corridor", 1)) ==
        ComplexityLabel::Simple);
  // Uppercase conjunction still counts.
  CHECK(complexity::classify(make("nice AND cheap", 1)) ==
        ComplexityLabel::Compound);
}

TEST_CASE("classification depends only on text and quad count") {
  auto a = make("the pizza was great .", 1);
  auto b = a;
  b.quads[0].opinion_term = "different";
  CHECK(complexity::classify(a) == complexity::classify(b));
}

TEST_CASE("ratio_report on tiny datasets") {
  CHECK_THROWS_AS(complexity::ratio_report({}), EmptyDataset);

  auto report = complexity::ratio_report({make("the pizza was great .", 1)});
  CHECK(report.simple_pct == doctest::Approx(100.0));
  CHECK(report.compound_pct == doctest::Approx(0.0));

  std::vector<AnnotatedExample> mixed = {
      make("the pizza was great .", 1),
      make("the pizza was great and the beer was warm .", 2),
      make("slow service .", 1),
      make("x , y", 1),
  };
  auto r = complexity::ratio_report(mixed);
  CHECK(r.simple_count == 2);
  CHECK(r.compound_count == 2);
  CHECK(r.simple_pct + r.compound_pct == doctest::Approx(100.0));
}

TEST_CASE("ratios are non-negative and sum to 100 on random data") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<AnnotatedExample> examples;
    int n = 1 + int(rng() % 20);
    for (int i = 0; i < n; ++i) {
      std::string text = rng() % 2 ? "plain sentence ." : "a and b , c";
      examples.push_back(make(text, 1 + int(rng() % 3)));
    }
    auto r = complexity::ratio_report(examples);
    CHECK(r.simple_pct >= 0.0);
    CHECK(r.compound_pct >= 0.0);
    CHECK(r.simple_pct + r.compound_pct == doctest::Approx(100.0));
  }
}

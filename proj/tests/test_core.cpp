#include <doctest.h>

#include <random>

#include "atoss/core.hpp"
#include "atoss/core_json.hpp"
#include "atoss/records.hpp"

using namespace atoss;
using core::AnnotatedExample;
using core::Polarity;
using core::Quadruplet;
using core::Task;

namespace {

const char* kTable7Line =
    "i ' ve never had bad service and the fish is fresh and delicious ."
    "####[['service','service general','positive','never had bad'],"
    "['fish','food quality','positive','fresh'],"
    "['fish','food quality','positive','delicious']]";

Quadruplet quad(const std::string& at, const std::string& ac, Polarity sp,
                const std::string& ot) {
  Quadruplet q;
  q.aspect_term = at;
  q.aspect_category = ac;
  q.polarity = sp;
  q.opinion_term = ot;
  return q;
}

}  // namespace

TEST_CASE("parse_line handles the worked three-quad example") {
  auto ex = core::parse_line(kTable7Line, Task::ASQP);
  REQUIRE(ex.quads.size() == 3);
  CHECK(ex.text ==
        "i ' ve never had bad service and the fish is fresh and delicious .");
  CHECK(ex.quads[0].aspect_term == "service");
  CHECK(ex.quads[0].aspect_category == "service general");
  CHECK(ex.quads[0].opinion_term == "never had bad");
  for (const auto& q : ex.quads) CHECK(q.polarity == Polarity::positive);
  CHECK(ex.quads[1].aspect_term == "fish");
  CHECK(ex.quads[2].opinion_term == "delicious");
}

TEST_CASE("parse_line minimal NULL-aspect case") {
  auto ex = core::parse_line(
      "good .####[['null','restaurant general','positive','good']]",
      Task::ASQP);
  REQUIRE(ex.quads.size() == 1);
  CHECK(ex.quads[0].aspect_term == "null");
  CHECK(core::is_null_term(ex.quads[0].aspect_term));
}

TEST_CASE("parse_line error paths") {
  CHECK_THROWS_AS(core::parse_line("no separator here", Task::ASQP),
                  MalformedLine);
  CHECK_THROWS_AS(
      core::parse_line("x .####[['a','b','positive']]", Task::ASQP),
      ArityMismatch);
  CHECK_THROWS_AS(
      core::parse_line(
          "the pizza was great .####[['pizza','food quality','positive','bad']]",
          Task::ASQP),
      TermNotInSentence);
  CHECK_THROWS_AS(
      core::parse_line(
          "the pizza was great .####[['pizza','food quality','meh','great']]",
          Task::ASQP),
      UnknownPolarity);
  CHECK_THROWS_AS(core::parse_line("x .####[['a','b'", Task::ASQP),
                  MalformedLine);
  CHECK_THROWS_AS(core::parse_line("x .####[]", Task::ASQP), MalformedLine);
}

TEST_CASE("substring check is whitespace-normalized and case-insensitive") {
  // Tokenized sentence: term without dataset spacing still matches.
  auto ex = core::parse_line(
      "the Pizza  was great .####[['pizza','food quality','positive','great']]",
      Task::ASQP);
  CHECK(ex.quads[0].aspect_term == "pizza");
}

TEST_CASE("NULL sentinel is case-insensitive, canonical lowercase") {
  auto ex = core::parse_line(
      "good .####[['NULL','restaurant general','positive','good']]",
      Task::ASQP);
  CHECK(ex.quads[0].aspect_term == "null");
}

TEST_CASE("triplet tasks parse with 3 elements") {
  auto tasd = core::parse_line(
      "the pizza was great .####[['pizza','food quality','positive']]",
      Task::TASD);
  CHECK(tasd.quads[0].opinion_term.empty());
  CHECK(tasd.quads[0].aspect_category == "food quality");

  auto aste = core::parse_line(
      "the pizza was great .####[['pizza','great','positive']]", Task::ASTE);
  CHECK(aste.quads[0].aspect_category.empty());
  CHECK(aste.quads[0].opinion_term == "great");

  // Short polarity forms seen in triplet releases.
  auto aste2 = core::parse_line(
      "the pizza was great .####[['pizza','great','POS']]", Task::ASTE);
  CHECK(aste2.quads[0].polarity == Polarity::positive);
}

TEST_CASE("element order override") {
  core::ParseOptions opts;
  opts.order = core::ElementOrder::parse("ot,ac,sp,at");
  auto ex = core::parse_line(
      "the pizza was great .####[['great','food quality','positive','pizza']]",
      Task::ASQP, opts);
  CHECK(ex.quads[0].aspect_term == "pizza");
  CHECK(ex.quads[0].opinion_term == "great");
}

TEST_CASE("serialize round-trips the worked example byte-identically") {
  auto ex = core::parse_line(kTable7Line, Task::ASQP);
  CHECK(core::serialize_example(ex) == kTable7Line);
  auto again = core::parse_line(core::serialize_example(ex), Task::ASQP);
  CHECK(again == ex);
}

TEST_CASE("serialize canonical form for built examples") {
  AnnotatedExample ex;
  ex.task = Task::ACOS;
  ex.text = "good stuff .";
  ex.quads.push_back(
      quad("null", "restaurant general", Polarity::positive, "null"));
  std::string line = core::serialize_example(ex);
  CHECK(line ==
        "good stuff .####[['null','restaurant general','positive','null']]");
  // 'null' occupies position 4.
  auto lists = core::parse_annotation_lists(line.substr(line.find("####") + 4));
  CHECK(lists[0][3] == "null");
}

TEST_CASE("round-trip property over random valid examples") {
  std::mt19937_64 rng(20240811);
  const std::vector<std::string> words = {"pizza", "service", "great", "bad",
                                          "warm",  "beer",    "meal",  "the",
                                          "was",   "don't",   "a\"b"};
  const std::vector<std::string> cats = {"food quality", "service general",
                                         "ambience general"};
  for (int iter = 0; iter < 1000; ++iter) {
    AnnotatedExample ex;
    ex.task = rng() % 2 == 0 ? Task::ASQP : Task::ACOS;
    int n_tokens = 3 + int(rng() % 8);
    std::vector<std::string> tokens;
    for (int i = 0; i < n_tokens; ++i)
      tokens.push_back(words[rng() % words.size()]);
    for (size_t i = 0; i < tokens.size(); ++i)
      ex.text += (i ? " " : "") + tokens[i];

    int n_quads = 1 + int(rng() % 3);
    for (int i = 0; i < n_quads; ++i) {
      bool null_at = rng() % 4 == 0;
      bool null_ot = rng() % 4 == 0;
      Quadruplet q;
      q.aspect_term = null_at ? "null" : tokens[rng() % tokens.size()];
      q.opinion_term = null_ot ? "null" : tokens[rng() % tokens.size()];
      q.aspect_category = cats[rng() % cats.size()];
      q.polarity = static_cast<Polarity>(rng() % 3);
      ex.quads.push_back(q);
    }
    std::string line = core::serialize_example(ex);
    AnnotatedExample parsed = core::parse_line(line, ex.task);
    CHECK(parsed == ex);
    CHECK(core::serialize_example(parsed) == line);
  }
}

TEST_CASE("dataset_stats counts polarities and categories") {
  std::vector<AnnotatedExample> examples;
  CHECK(core::dataset_stats(examples).sentence_count == 0);
  CHECK(core::dataset_stats(examples).total_quads() == 0);

  AnnotatedExample a;
  a.text = "the pizza was great .";
  a.quads.push_back(quad("pizza", "food quality", Polarity::positive, "great"));
  a.quads.push_back(quad("pizza", "food quality", Polarity::negative, "great"));
  AnnotatedExample b;
  b.text = "ok .";
  b.quads.push_back(
      quad("null", "restaurant general", Polarity::neutral, "ok"));
  examples = {a, b};

  auto stats = core::dataset_stats(examples);
  CHECK(stats.sentence_count == 2);
  CHECK(stats.quad_counts_by_polarity.at(Polarity::positive) == 1);
  CHECK(stats.quad_counts_by_polarity.at(Polarity::neutral) == 1);
  CHECK(stats.quad_counts_by_polarity.at(Polarity::negative) == 1);
  CHECK(stats.total_quads() == 3);
  CHECK(stats.category_set_size == 2);
}

TEST_CASE("polarity counts sum to total annotation tuples") {
  std::mt19937_64 rng(7);
  std::vector<AnnotatedExample> examples;
  int64_t total = 0;
  for (int i = 0; i < 50; ++i) {
    AnnotatedExample ex;
    ex.text = "word .";
    int n = 1 + int(rng() % 4);
    total += n;
    for (int k = 0; k < n; ++k)
      ex.quads.push_back(quad("null", "c", static_cast<Polarity>(rng() % 3),
                              "null"));
    examples.push_back(ex);
  }
  CHECK(core::dataset_stats(examples).total_quads() == total);
}

TEST_CASE("json records round-trip") {
  auto ex = core::parse_line(kTable7Line, Task::ASQP);
  ex.id = "42";
  nlohmann::json j = ex;
  auto back = j.get<AnnotatedExample>();
  CHECK(back == ex);
  CHECK(back.id == "42");
}

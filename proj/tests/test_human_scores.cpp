#include <doctest.h>

#include <cmath>

#include "mtscore/error.hpp"
#include "mtscore/human_scores.hpp"
#include "support/oracles.hpp"

using namespace mtscore;

TEST_CASE("ter examples") {
  CHECK(ter("the cat sat", "the cat sat") == 0.0);
  CHECK(ter("a b c d e", "a b X d e") == doctest::Approx(0.2));
  CHECK(ter("a b c d e", "a b X d e", false) == doctest::Approx(0.2));
  CHECK(ter("b a", "a b", true) == 0.5);
  CHECK(ter("b a", "a b", false) == 1.0);
  CHECK_THROWS_AS(ter("a b", ""), ContractError);
  CHECK(ter("a b", " ,", false) == 2.0);  // "," is a word
  CHECK(ter("", "a b") == 1.0);
}

TEST_CASE("ter counts shifts and edits") {
  const std::vector<std::string> hyp{"c", "d", "a", "b"};
  const std::vector<std::string> ref{"a", "b", "c", "d"};
  const auto r = ter_tokens(hyp, ref);
  CHECK(r.shifts == 1);
  CHECK(r.edits == 0);
  CHECK(r.rate() == 0.25);
  TerOptions no;
  no.shifts = false;
  CHECK(ter_tokens(hyp, ref, no).edits == 4);
}

TEST_CASE("apply_shift") {
  const std::vector<std::string> x{"a", "b", "c", "d", "e"};
  CHECK(apply_shift(x, 1, 2, 3) == std::vector<std::string>{"a", "d", "e", "b", "c"});
  CHECK(apply_shift(x, 3, 1, 0) == std::vector<std::string>{"d", "a", "b", "c", "e"});
  CHECK_THROWS_AS(apply_shift(x, 4, 2, 0), ContractError);
}

TEST_CASE("shiftless ter equals brute-force Levenshtein") {
  Rng rng(21);
  for (int i = 0; i < 500; ++i) {
    const auto h = testing::random_tokens(rng, 8, 4);
    const auto r = testing::random_tokens(rng, 8, 4, 1);
    TerOptions no;
    no.shifts = false;
    const auto res = ter_tokens(h, r, no);
    CHECK(res.edits == testing::levenshtein_oracle(h, r));
    CHECK(res.shifts == 0);
    CHECK(edit_distance(h, r) == testing::levenshtein_oracle(h, r));
  }
}

TEST_CASE("shifts never increase ter; ter(x, x) = 0") {
  Rng rng(22);
  for (int i = 0; i < 300; ++i) {
    const auto h = testing::random_tokens(rng, 10, 5);
    const auto r = testing::random_tokens(rng, 10, 5, 1);
    TerOptions no;
    no.shifts = false;
    const double with = ter_tokens(h, r).rate();
    const double without = ter_tokens(h, r, no).rate();
    CHECK(with >= 0.0);
    CHECK(with <= without);
    CHECK(ter_tokens(r, r).rate() == 0.0);
  }
}

TEST_CASE("hter dataset drops the post-edit") {
  const std::vector<PostEditTuple> pe{{"quelle", "b a", "ref text", "a b"},
                                      {"quelle", "x y z", "ref text", "x y z"}};
  const auto out = hter_dataset(pe);
  REQUIRE(out.size() == 2);
  CHECK(out[0].score == 0.5);
  CHECK(out[0].hypothesis == "b a");
  CHECK(out[0].reference == "ref text");
  CHECK(out[1].score == 0.0);
  CHECK(hter_dataset(pe, false)[0].score == 1.0);
  // HTER is not clipped.
  const std::vector<PostEditTuple> longer{{"s", "a b c d e f", "r", "x"}};
  CHECK(hter_dataset(longer)[0].score == 6.0);
}

TEST_CASE("mqm examples") {
  CHECK(mqm_score({0, 0, 0, 5}) == 100.0);
  CHECK(mqm_score({1, 0, 0, 1}) == doctest::Approx(99.99).epsilon(1e-14));
  CHECK(mqm_score({3, 1, 2, 4}) == doctest::Approx(99.93).epsilon(1e-14));
  CHECK(std::abs(mqm_score({3, 1, 2, 4}) - (100.0 - 28.0 / 400.0)) <= 1e-12);
  CHECK_THROWS_AS(mqm_score({1, 0, 0, 0}), ContractError);
  CHECK(normalize_mqm(100.0) == 1.0);
  CHECK(normalize_mqm(-50.0) == 0.0);
  CHECK(normalize_mqm(99.93) == doctest::Approx(0.9993).epsilon(1e-14));
}

TEST_CASE("mqm is antitone in each count; normalization is idempotent on [0,1]") {
  Rng rng(23);
  for (int i = 0; i < 200; ++i) {
    MqmAnnotation a{rng.below(5), rng.below(5), rng.below(5), 1 + rng.below(30)};
    const double base = mqm_score(a);
    auto inc = a;
    ++inc.minor;
    CHECK(mqm_score(inc) < base);
    inc = a;
    ++inc.major;
    CHECK(mqm_score(inc) < base);
    inc = a;
    ++inc.critical;
    CHECK(mqm_score(inc) < base);
    const double x = rng.uniform();
    CHECK(normalize_mqm(normalize_mqm(x * 100.0) * 100.0) == doctest::Approx(x));
    CHECK(normalize_mqm(rng.uniform(-1000.0, 100.0)) >= 0.0);
  }
}

namespace {

DASegment row(const std::string& sys, double da, const std::string& seg = "1") {
  return {"de-en", seg, sys, "src", "hyp-" + sys, "ref", da};
}

}  // namespace

TEST_CASE("darr examples") {
  {
    const auto p = darr_convert({{row("A", 80), row("B", 50)}});
    REQUIRE(p.size() == 1);
    CHECK(p[0].system_better == "A");
    CHECK(p[0].quad.better == "hyp-A");
    CHECK(p[0].quad.worse == "hyp-B");
    CHECK(p[0].quad.source == "src");
    CHECK(p[0].quad.reference == "ref");
  }
  CHECK(darr_convert({{row("A", 70), row("B", 50)}}).empty());
  CHECK(darr_convert({{row("A", 75), row("B", 50)}}).empty());
  CHECK(darr_convert({{row("A", 75.5), row("B", 50)}}).size() == 1);
  {
    const auto p = darr_convert({{row("A", 100), row("B", 60), row("C", 10)}});
    CHECK(p.size() == 3);
  }
  {
    const auto p = darr_convert({{row("B", 20), row("A", 90)}});
    REQUIRE(p.size() == 1);
    CHECK(p[0].system_better == "A");
  }
}

TEST_CASE("darr errors") {
  CHECK_THROWS_AS(darr_convert({{row("A", 80), row("A", 10)}}), DataError);
  auto other = row("B", 10);
  other.reference = "different";
  CHECK_THROWS_AS(darr_convert({{row("A", 80), other}}), DataError);
  // The same system may appear in different segments or language pairs.
  auto fr = row("A", 10);
  fr.lang_pair = "fr-en";
  CHECK_NOTHROW(darr_convert({{row("A", 80), row("A", 10, "2"), fr}}));
}

TEST_CASE("darr matches brute-force enumeration and is symmetric") {
  Rng rng(24);
  for (int trial = 0; trial < 50; ++trial) {
    const auto table = testing::random_da_table(rng, 10, 6);
    for (double th : {25.0, 0.0, 10.0, -1.0}) {
      CHECK(testing::darr_keys(darr_convert(table, th)) == testing::darr_oracle(table, th));
    }
    CHECK(darr_convert(table, INFINITY).empty());
    CHECK(darr_convert(table, -1.0).size() == 15 * 10);

    // Exchanging the scores of two systems flips the labels.
    auto swapped = table;
    for (std::size_t s = 0; s < 10; ++s) std::swap(swapped[s * 6].da, swapped[s * 6 + 1].da);
    const auto a = darr_convert(table);
    const auto b = darr_convert(swapped);
    auto has = [](const std::vector<DarrPair>& ps, const std::string& seg, const std::string& hi,
                  const std::string& lo) {
      return std::any_of(ps.begin(), ps.end(), [&](const DarrPair& p) {
        return p.segment_id == seg && p.system_better == hi && p.system_worse == lo;
      });
    };
    for (std::size_t s = 1; s <= 10; ++s) {
      const auto seg = std::to_string(s);
      CHECK(has(a, seg, "sys0", "sys1") == has(b, seg, "sys1", "sys0"));
      CHECK(has(a, seg, "sys1", "sys0") == has(b, seg, "sys0", "sys1"));
    }
  }
}

TEST_CASE("darr output order") {
  std::vector<DASegment> rows{row("B", 0, "10"), row("A", 90, "10"), row("C", 50, "10"),
                              row("A", 90, "9"), row("B", 0, "9")};
  auto fr = row("A", 90, "1");
  fr.lang_pair = "cs-en";
  auto fr2 = row("B", 0, "1");
  fr2.lang_pair = "cs-en";
  rows.push_back(fr);
  rows.push_back(fr2);
  const auto p = darr_convert(rows);
  REQUIRE(p.size() == 5);
  CHECK(p[0].lang_pair == "cs-en");
  CHECK(p[1].segment_id == "9");
  CHECK(p[2].segment_id == "10");
  CHECK(p[2].system_better == "A");
  CHECK(p[2].system_worse == "B");
  CHECK(p[3].system_better == "A");
  CHECK(p[3].system_worse == "C");
  CHECK(p[4].system_better == "C");
  CHECK(p[4].system_worse == "B");
}

TEST_CASE("segment ids order numerically, then lexicographically") {
  CHECK(segment_id_less("2", "10"));
  CHECK_FALSE(segment_id_less("10", "2"));
  CHECK(segment_id_less("10", "1a"));
  CHECK(segment_id_less("2", "1a"));
  CHECK(segment_id_less("1a", "1b"));
  CHECK_FALSE(segment_id_less("7", "7"));
}

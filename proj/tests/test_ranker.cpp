#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mtscore/error.hpp"
#include "mtscore/ranker.hpp"
#include "support/synthetic.hpp"

using namespace mtscore;
using ad::Matrix;
using ad::Tensor;

namespace {

RankerConfig tiny(std::size_t epochs = 1) {
  RankerConfig c;
  c.encoder.vocab_size = 256;
  c.encoder.dim = 8;
  c.encoder.layers = 2;
  c.encoder.heads = 2;
  c.encoder.ff_dim = 16;
  c.epochs = epochs;
  c.batch_size = 8;
  return c;
}

Tensor vec(std::initializer_list<double> v) { return Tensor::constant(Matrix::row(v)); }

}  // namespace

TEST_CASE("harmonic distance") {
  for (double x : {0.0, 0.3, 1.0, 7.5}) CHECK(harmonic_distance(x, x) == doctest::Approx(x));
  CHECK(harmonic_distance(0.0, 5.0) == 0.0);
  CHECK(harmonic_distance(5.0, 0.0) == 0.0);
  CHECK(harmonic_distance(0.0, 0.0) == 0.0);
  CHECK(harmonic_distance(3.0, 6.0) == 4.0);
}

TEST_CASE("similarity") {
  CHECK(similarity(0.0) == 1.0);
  CHECK(similarity(1.0) == 0.5);
  CHECK(similarity(4.0) == 0.2);
  CHECK_THROWS_AS(similarity(-0.1), ContractError);
  CHECK_THROWS_AS(similarity(std::nan("")), ContractError);
  CHECK_THROWS_AS(similarity(INFINITY), ContractError);
  Rng rng(1);
  double prev = similarity(0.0);
  double f = 0.0;
  for (int i = 0; i < 200; ++i) {
    f += rng.uniform(1e-6, 1.0);
    const double s = similarity(f);
    CHECK(s < prev);
    CHECK(s > 0.0);
    prev = s;
  }
}

TEST_CASE("anchor margins") {
  // d(a, h+) = 0, d(a, h-) = 2 on both anchors: both margins hold.
  const Tensor a = vec({0, 0});
  const Tensor pos = vec({0, 0});
  const Tensor neg = vec({2, 0});
  const double l = ad::add(anchor_margin_loss(a, pos, neg, 1.0), anchor_margin_loss(a, pos, neg, 1.0)).item();
  CHECK(l == 0.0);
  // Swapped roles violate each margin by 2 + 1.
  CHECK(anchor_margin_loss(a, neg, pos, 1.0).item() == 3.0);
  CHECK(anchor_margin_loss(a, pos, pos, 1.0).item() == 1.0);
}

TEST_CASE("triplet loss of identical hypotheses is twice the margin") {
  auto cfg = tiny();
  cfg.margin = 0.75;
  RankerModel m(cfg);
  const RankQuadruple q{"ein hund", "a dog barks", "a dog barks", "the dog barks"};
  CHECK(m.triplet_loss(q, Mode::kEval, nullptr).item() == doctest::Approx(1.5).epsilon(1e-12));
  cfg.reference_only = true;
  RankerModel ref_only(cfg);
  CHECK(ref_only.triplet_loss(q, Mode::kEval, nullptr).item() ==
        doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("triplet loss is the sum of the two hinge terms") {
  RankerModel m(tiny());
  const auto quads = testing::reference_separable(7, 20);
  for (const auto& q : quads) {
    const auto& pe = m.embedder();
    auto e = [&](const std::string& t) { return pe.embed(t, Segment::kHypothesis, Mode::kEval, nullptr).vector; };
    const Tensor s = e(q.source), hp = e(q.better), hm = e(q.worse), r = e(q.reference);
    auto d = [](const Tensor& u, const Tensor& v) { return ad::euclid(u, v).item(); };
    const double expected = std::max(0.0, d(s, hp) - d(s, hm) + 1.0) +
                            std::max(0.0, d(r, hp) - d(r, hm) + 1.0);
    const double loss = m.triplet_loss(q, Mode::kEval, nullptr).item();
    CHECK(loss >= 0.0);
    CHECK(std::abs(loss - expected) <= 1e-12);

    // If the loss is zero, swapping h+ and h- costs at least 2 margins.
    const RankQuadruple swapped{q.source, q.worse, q.better, q.reference};
    if (loss == 0.0) CHECK(m.triplet_loss(swapped, Mode::kEval, nullptr).item() >= 2.0);
  }
}

TEST_CASE("inference distance composes the anchor distances") {
  RankerModel m(tiny());
  const auto quads = testing::source_separable(2, 10);
  for (const auto& q : quads) {
    const ScoringTriple t{q.source, q.better, q.reference};
    const auto& pe = m.embedder();
    auto e = [&](const std::string& x) { return pe.embed(x, Segment::kHypothesis, Mode::kEval, nullptr).vector; };
    const double ds = ad::euclid(e(q.source), e(q.better)).item();
    const double dr = ad::euclid(e(q.reference), e(q.better)).item();
    const double f = m.inference_distance(t);
    CHECK(f == 2 * dr * ds / (dr + ds));
    CHECK(m.score_one(t) == 1.0 / (1.0 + f));
    CHECK(m.score_reference_only(t) == 1.0 / (1.0 + dr));
  }
  const ScoringTriple same{"the cat", "the cat", "the cat"};
  CHECK(m.inference_distance(same) == 0.0);
  CHECK(m.score_one(same) == 1.0);
}

TEST_CASE("scores rank in reverse order of distance") {
  RankerModel m(tiny());
  std::vector<ScoringTriple> triples;
  for (const auto& q : testing::reference_separable(3, 30)) {
    triples.push_back({q.source, q.better, q.reference});
    triples.push_back({q.source, q.worse, q.reference});
  }
  const auto scores = m.score(triples);
  std::vector<double> dist;
  for (const auto& t : triples) dist.push_back(m.inference_distance(t));
  std::vector<std::size_t> by_score(triples.size()), by_dist(triples.size());
  std::iota(by_score.begin(), by_score.end(), 0);
  std::iota(by_dist.begin(), by_dist.end(), 0);
  std::stable_sort(by_score.begin(), by_score.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });
  std::stable_sort(by_dist.begin(), by_dist.end(), [&](auto a, auto b) { return dist[a] < dist[b]; });
  CHECK(by_score == by_dist);
  CHECK(m.score(triples, 3) == scores);
}

TEST_CASE("reference-only models score against the reference alone") {
  auto cfg = tiny();
  cfg.reference_only = true;
  RankerModel m(cfg);
  const ScoringTriple t{"quelle", "a hypothesis", "the reference"};
  CHECK(m.score_one(t) == m.score_reference_only(t));
  const ScoringTriple other_source{"ganz anders", "a hypothesis", "the reference"};
  CHECK(m.score_one(t) == m.score_one(other_source));
}

TEST_CASE("no parameters beyond encoder and pooling; one group at one rate") {
  RankerModel m(tiny());
  const auto params = m.parameters();
  CHECK(params.size() == m.embedder().parameters().size());
  const auto groups = m.param_groups();
  REQUIRE(groups.size() == 1);
  CHECK(groups[0].learning_rate == 1e-5);
  CHECK_FALSE(groups[0].frozen);
  CHECK(groups[0].params.size() == params.size());
  CHECK(tiny().margin == 1.0);
  auto bad = tiny();
  bad.margin = 0.0;
  CHECK_THROWS_AS(RankerModel{bad}, ContractError);
}

TEST_CASE("no frozen epoch: every parameter group moves in the first epoch") {
  auto cfg = tiny(1);
  cfg.learning_rate = 1e-3;
  RankerModel m(cfg);
  std::vector<Matrix> before;
  for (const auto& p : m.parameters()) before.push_back(p.tensor.value());
  m.train(testing::reference_separable(1, 16));
  const auto after = m.parameters();
  std::size_t moved = 0;
  for (std::size_t i = 0; i < before.size(); ++i) moved += !(after[i].tensor.value() == before[i]);
  CHECK(!(after.back().tensor.value() == before.back()));                    // mu
  CHECK(!(after[after.size() - 2].tensor.value() == before[before.size() - 2]));  // alpha
  CHECK(!(after.front().tensor.value() == before.front()));                   // embedding
  CHECK(moved == before.size());
}

TEST_CASE("training") {
  RankerModel m(tiny());
  CHECK_THROWS_AS(m.train({}), ContractError);
  const auto data = testing::reference_separable(4, 24);
  RankerModel a(tiny(2)), b(tiny(2));
  const auto la = a.train(data);
  const auto lb = b.train(data);
  CHECK(la.epoch_loss.size() == 2);
  CHECK(la.epoch_loss == lb.epoch_loss);
  for (double l : la.epoch_loss) CHECK(l >= 0.0);
  std::vector<ScoringTriple> t{{data[0].source, data[0].better, data[0].reference}};
  CHECK(a.score(t) == b.score(t));
}

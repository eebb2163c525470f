#include "mtscore/ranker.hpp"

#include <cmath>

#include "mtscore/error.hpp"
#include "mtscore/parallel.hpp"

namespace mtscore {

double harmonic_distance(double d_ref, double d_src) {
  const double denom = d_ref + d_src;
  if (denom == 0.0) return 0.0;
  return 2.0 * d_ref * d_src / denom;
}

double similarity(double f) {
  if (!(f >= 0.0) || !std::isfinite(f)) {
    throw ContractError("similarity: distance must be finite and non-negative");
  }
  return 1.0 / (1.0 + f);
}

ad::Tensor anchor_margin_loss(const ad::Tensor& anchor, const ad::Tensor& better,
                              const ad::Tensor& worse, double margin) {
  const ad::Tensor gap = ad::sub(ad::euclid(anchor, better), ad::euclid(anchor, worse));
  return ad::relu(ad::add_scalar(gap, margin));
}

RankerModel::RankerModel(const RankerConfig& config)
    : config_(config), embedder_(config.encoder, config.layer_dropout, config.seed) {
  if (!(config.margin > 0.0)) throw ContractError("ranker: margin must be positive");
}

ad::Tensor RankerModel::triplet_loss(const RankQuadruple& quad, Mode mode, Rng* rng) const {
  const auto better = embedder_.embed(quad.better, Segment::kHypothesis, mode, rng);
  const auto worse = embedder_.embed(quad.worse, Segment::kHypothesis, mode, rng);
  const auto ref = embedder_.embed(quad.reference, Segment::kReference, mode, rng);
  const ad::Tensor ref_term =
      anchor_margin_loss(ref.vector, better.vector, worse.vector, config_.margin);
  if (config_.reference_only) return ref_term;
  const auto src = embedder_.embed(quad.source, Segment::kSource, mode, rng);
  const ad::Tensor src_term =
      anchor_margin_loss(src.vector, better.vector, worse.vector, config_.margin);
  return ad::add(src_term, ref_term);
}

RankerModel::Distances RankerModel::distances(const ScoringTriple& t) const {
  ad::NoGradGuard guard;
  const auto h = embedder_.embed(t.hypothesis, Segment::kHypothesis, Mode::kEval, nullptr);
  const auto s = embedder_.embed(t.source, Segment::kSource, Mode::kEval, nullptr);
  const auto r = embedder_.embed(t.reference, Segment::kReference, Mode::kEval, nullptr);
  return {ad::euclid(s.vector, h.vector).item(), ad::euclid(r.vector, h.vector).item()};
}

double RankerModel::inference_distance(const ScoringTriple& t) const {
  const Distances d = distances(t);
  return harmonic_distance(d.to_reference, d.to_source);
}

double RankerModel::score_reference_only(const ScoringTriple& t) const {
  ad::NoGradGuard guard;
  const auto h = embedder_.embed(t.hypothesis, Segment::kHypothesis, Mode::kEval, nullptr);
  const auto r = embedder_.embed(t.reference, Segment::kReference, Mode::kEval, nullptr);
  return similarity(ad::euclid(r.vector, h.vector).item());
}

double RankerModel::score_one(const ScoringTriple& t) const {
  if (config_.reference_only) return score_reference_only(t);
  return similarity(inference_distance(t));
}

std::vector<double> RankerModel::score(std::span<const ScoringTriple> triples,
                                       std::size_t threads) const {
  std::vector<double> out(triples.size());
  parallel_for(triples.size(), threads, [&](std::size_t i) { out[i] = score_one(triples[i]); });
  return out;
}

std::vector<ParamGroup> RankerModel::param_groups() const {
  ParamGroup all{"encoder", {}, config_.learning_rate, false};
  for (const auto& p : embedder_.parameters()) all.params.push_back(p.tensor);
  return {std::move(all)};
}

TrainingLog RankerModel::train(std::span<const RankQuadruple> data) {
  if (data.empty()) throw ContractError("RankerModel::train: empty dataset");
  Rng shuffle_rng(config_.seed, "shuffle");
  Rng dropout_rng(config_.seed, "dropout");
  std::vector<ParamGroup> groups = param_groups();
  const auto schedule = EpochSchedule{config_.epochs, config_.batch_size};
  return run_training(data.size(), schedule, shuffle_rng, groups, adam_, nullptr,
                      [&](std::size_t i) {
                        return triplet_loss(data[i], Mode::kTrain, &dropout_rng);
                      });
}

}  // namespace mtscore

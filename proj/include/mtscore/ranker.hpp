#ifndef MTSCORE_RANKER_HPP_
#define MTSCORE_RANKER_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mtscore/autodiff.hpp"
#include "mtscore/data.hpp"
#include "mtscore/optim.hpp"
#include "mtscore/pooling.hpp"
#include "mtscore/training.hpp"

namespace mtscore {

struct RankerConfig {
  EncoderConfig encoder;
  double layer_dropout = 0.1;
  double margin = 1.0;
  // Drops the source anchor from both the loss and inference.
  bool reference_only = false;
  std::size_t epochs = 4;
  std::size_t batch_size = 16;
  double learning_rate = 1e-5;
  std::uint64_t seed = kDefaultSeed;
};

// Harmonic mean of the two anchor distances; 0 when both are 0.
double harmonic_distance(double d_ref, double d_src);
// 1 / (1 + f). Throws ContractError for negative or non-finite f.
double similarity(double f);

// max(0, d(a, pos) - d(a, neg) + margin) for one anchor.
ad::Tensor anchor_margin_loss(const ad::Tensor& anchor, const ad::Tensor& better,
                              const ad::Tensor& worse, double margin);

class RankerModel {
 public:
  explicit RankerModel(const RankerConfig& config);

  // Source-anchored plus reference-anchored triplet margin loss (reference
  // term only when reference_only is set).
  ad::Tensor triplet_loss(const RankQuadruple& quad, Mode mode, Rng* rng) const;

  // Eval-mode harmonic-mean distance of the hypothesis to both anchors.
  double inference_distance(const ScoringTriple& t) const;
  // similarity(inference_distance) or, for reference-only models,
  // similarity(d(r, h)).
  double score_one(const ScoringTriple& t) const;
  // similarity(d(r, h)) regardless of the model's flag.
  double score_reference_only(const ScoringTriple& t) const;
  std::vector<double> score(std::span<const ScoringTriple> triples, std::size_t threads = 1) const;

  TrainingLog train(std::span<const RankQuadruple> data);

  // One group holding every parameter at the single learning rate.
  std::vector<ParamGroup> param_groups() const;
  std::vector<NamedParam> parameters() const { return embedder_.parameters(); }

  const RankerConfig& config() const { return config_; }
  const PooledEncoder& embedder() const { return embedder_; }
  Adam& optimizer() { return adam_; }
  const Adam& optimizer() const { return adam_; }

 private:
  struct Distances {
    double to_source;
    double to_reference;
  };
  Distances distances(const ScoringTriple& t) const;

  RankerConfig config_;
  PooledEncoder embedder_;
  Adam adam_;
};

}  // namespace mtscore

#endif  // MTSCORE_RANKER_HPP_

#ifndef MTSCORE_ESTIMATOR_HPP_
#define MTSCORE_ESTIMATOR_HPP_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mtscore/autodiff.hpp"
#include "mtscore/data.hpp"
#include "mtscore/optim.hpp"
#include "mtscore/pooling.hpp"
#include "mtscore/training.hpp"

namespace mtscore {

struct EstimatorConfig {
  EncoderConfig encoder;
  double layer_dropout = 0.1;
  // Zero selects the default widths 9d and 4.5d (rounded).
  std::size_t hidden1 = 0;
  std::size_t hidden2 = 0;
  double dropout = 0.1;
  // Adds the raw source embedding as a seventh feature block. Ablation only.
  bool include_source = false;
  std::size_t epochs = 4;
  std::size_t frozen_epochs = 1;
  std::size_t batch_size = 16;
  double lr_head = 3e-5;
  double lr_encoder = 1e-5;
  std::uint64_t seed = kDefaultSeed;

  std::pair<std::size_t, std::size_t> hidden_widths() const;
  std::size_t feature_width() const { return (include_source ? 7 : 6) * encoder.dim; }
};

// [h; r; h*s; h*r; |h-s|; |h-r|], or with the source block
// [h; s; r; h*s; h*r; |h-s|; |h-r|] when include_source is set.
ad::Tensor combine_features(const SentenceEmbedding& h, const SentenceEmbedding& s,
                            const SentenceEmbedding& r, bool include_source = false);

class EstimatorModel {
 public:
  explicit EstimatorModel(const EstimatorConfig& config);

  // Scalar prediction as a 1×1 tensor.
  ad::Tensor forward(const EvalTuple& tuple, Mode mode, Rng* rng) const;
  double predict_one(const EvalTuple& tuple) const;
  // Eval-mode predictions, order-preserving.
  std::vector<double> predict(std::span<const EvalTuple> tuples, std::size_t threads = 1) const;

  // Squared error of one tuple; the mean over a batch is the MSE objective.
  ad::Tensor squared_error(const EvalTuple& tuple, Mode mode, Rng* rng) const;

  // Runs the frozen-then-unfrozen schedule. Throws ContractError on empty data.
  TrainingLog train(std::span<const EvalTuple> data);

  // {encoder group (encoder, alpha, mu), head group (feed-forward)}.
  std::vector<ParamGroup> param_groups() const;
  std::vector<NamedParam> parameters() const;

  const EstimatorConfig& config() const { return config_; }
  const PooledEncoder& embedder() const { return embedder_; }
  Adam& optimizer() { return adam_; }
  const Adam& optimizer() const { return adam_; }

 private:
  EstimatorConfig config_;
  PooledEncoder embedder_;
  ad::Tensor w1_, b1_, w2_, b2_, w3_, b3_;
  Adam adam_;
};

}  // namespace mtscore

#endif  // MTSCORE_ESTIMATOR_HPP_

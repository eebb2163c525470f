#include "mtscore/estimator.hpp"

#include <cmath>

#include "mtscore/error.hpp"
#include "mtscore/parallel.hpp"

namespace mtscore {

std::pair<std::size_t, std::size_t> EstimatorConfig::hidden_widths() const {
  const double d = static_cast<double>(encoder.dim);
  const std::size_t h1 = hidden1 != 0 ? hidden1 : static_cast<std::size_t>(std::lround(9.0 * d));
  const std::size_t h2 = hidden2 != 0 ? hidden2 : static_cast<std::size_t>(std::lround(4.5 * d));
  return {h1, h2};
}

ad::Tensor combine_features(const SentenceEmbedding& h, const SentenceEmbedding& s,
                            const SentenceEmbedding& r, bool include_source) {
  const auto& hv = h.vector;
  const auto& sv = s.vector;
  const auto& rv = r.vector;
  if (hv.size() != sv.size() || hv.size() != rv.size() || hv.rows() != 1 ||
      sv.rows() != 1 || rv.rows() != 1) {
    throw DimensionError("combine_features: embeddings must be 1xd of equal width");
  }
  const ad::Tensor h_s = ad::mul(hv, sv);
  const ad::Tensor h_r = ad::mul(hv, rv);
  const ad::Tensor d_s = ad::abs(ad::sub(hv, sv));
  const ad::Tensor d_r = ad::abs(ad::sub(hv, rv));
  if (include_source) return ad::concat({hv, sv, rv, h_s, h_r, d_s, d_r});
  return ad::concat({hv, rv, h_s, h_r, d_s, d_r});
}

namespace {

ad::Tensor init_weight(Rng& rng, std::size_t in, std::size_t out) {
  ad::Matrix m(in, out);
  const double sd = 1.0 / std::sqrt(static_cast<double>(in));
  for (auto& v : m.data()) v = rng.normal(0.0, sd);
  return ad::Tensor::parameter(std::move(m));
}

ad::Tensor zeros(std::size_t n) { return ad::Tensor::parameter(ad::Matrix(1, n)); }

}  // namespace

EstimatorModel::EstimatorModel(const EstimatorConfig& config)
    : config_(config), embedder_(config.encoder, config.layer_dropout, config.seed) {
  if (config.dropout < 0.0 || config.dropout >= 1.0) {
    throw ContractError("estimator: dropout must be in [0, 1)");
  }
  const auto [h1, h2] = config.hidden_widths();
  Rng rng(config.seed, "init.head");
  w1_ = init_weight(rng, config.feature_width(), h1);
  b1_ = zeros(h1);
  w2_ = init_weight(rng, h1, h2);
  b2_ = zeros(h2);
  w3_ = init_weight(rng, h2, 1);
  b3_ = zeros(1);
}

ad::Tensor EstimatorModel::forward(const EvalTuple& tuple, Mode mode, Rng* rng) const {
  const auto h = embedder_.embed(tuple.hypothesis, Segment::kHypothesis, mode, rng);
  const auto s = embedder_.embed(tuple.source, Segment::kSource, mode, rng);
  const auto r = embedder_.embed(tuple.reference, Segment::kReference, mode, rng);
  ad::Tensor x = combine_features(h, s, r, config_.include_source);
  const bool drop = mode == Mode::kTrain && rng != nullptr && config_.dropout > 0.0;
  x = ad::tanh(ad::add_bias(ad::matmul(x, w1_), b1_));
  if (drop) x = ad::dropout(x, config_.dropout, *rng);
  x = ad::tanh(ad::add_bias(ad::matmul(x, w2_), b2_));
  if (drop) x = ad::dropout(x, config_.dropout, *rng);
  return ad::add_bias(ad::matmul(x, w3_), b3_);
}

double EstimatorModel::predict_one(const EvalTuple& tuple) const {
  ad::NoGradGuard guard;
  return forward(tuple, Mode::kEval, nullptr).item();
}

std::vector<double> EstimatorModel::predict(std::span<const EvalTuple> tuples,
                                            std::size_t threads) const {
  std::vector<double> out(tuples.size());
  parallel_for(tuples.size(), threads, [&](std::size_t i) { out[i] = predict_one(tuples[i]); });
  return out;
}

ad::Tensor EstimatorModel::squared_error(const EvalTuple& tuple, Mode mode, Rng* rng) const {
  const ad::Tensor residual = ad::add_scalar(forward(tuple, mode, rng), -tuple.score);
  return ad::mul(residual, residual);
}

std::vector<ParamGroup> EstimatorModel::param_groups() const {
  ParamGroup encoder{"encoder", {}, config_.lr_encoder, false};
  for (const auto& p : embedder_.parameters()) encoder.params.push_back(p.tensor);
  ParamGroup head{"head", {w1_, b1_, w2_, b2_, w3_, b3_}, config_.lr_head, false};
  return {std::move(encoder), std::move(head)};
}

std::vector<NamedParam> EstimatorModel::parameters() const {
  std::vector<NamedParam> out = embedder_.parameters();
  out.push_back({"head.w1", w1_});
  out.push_back({"head.b1", b1_});
  out.push_back({"head.w2", w2_});
  out.push_back({"head.b2", b2_});
  out.push_back({"head.w3", w3_});
  out.push_back({"head.b3", b3_});
  return out;
}

TrainingLog EstimatorModel::train(std::span<const EvalTuple> data) {
  if (data.empty()) throw ContractError("EstimatorModel::train: empty dataset");
  Rng shuffle_rng(config_.seed, "shuffle");
  Rng dropout_rng(config_.seed, "dropout");
  std::vector<ParamGroup> groups = param_groups();
  const auto schedule = EpochSchedule{config_.epochs, config_.batch_size};
  return run_training(
      data.size(), schedule, shuffle_rng, groups, adam_,
      [this](std::size_t epoch, std::vector<ParamGroup>& gs) {
        gs[0].frozen = epoch < config_.frozen_epochs;
      },
      [&](std::size_t i) { return squared_error(data[i], Mode::kTrain, &dropout_rng); });
}

}  // namespace mtscore

// Finite-difference checks over every autodiff op and both full models.
// Shared by the unit tests and the acceptance binary.
#ifndef MTSCORE_TESTS_GRADIENT_SUITE_HPP_
#define MTSCORE_TESTS_GRADIENT_SUITE_HPP_

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "mtscore/autodiff.hpp"
#include "mtscore/estimator.hpp"
#include "mtscore/gradcheck.hpp"
#include "mtscore/ranker.hpp"
#include "mtscore/rng.hpp"

namespace mtscore::testing {

struct NamedCheck {
  std::string name;
  GradCheckReport report;
};

inline ad::Matrix uniform_matrix(Rng& rng, std::size_t r, std::size_t c, double lo = -2.0,
                                 double hi = 2.0) {
  ad::Matrix m(r, c);
  for (auto& v : m.data()) v = rng.uniform(lo, hi);
  return m;
}

// Entries within `gap` of zero are redrawn so probes never straddle the
// abs/relu kink.
inline ad::Matrix away_from_zero(Rng& rng, std::size_t r, std::size_t c, double gap = 1e-3) {
  ad::Matrix m(r, c);
  for (auto& v : m.data()) {
    do {
      v = rng.uniform(-2.0, 2.0);
    } while (std::fabs(v) < gap);
  }
  return m;
}

// Weighted sum with fixed random weights, so every output entry gets a
// distinct upstream gradient.
inline ad::Tensor weighted_sum(const ad::Tensor& y, const ad::Matrix& weights) {
  return ad::reduce_mean(ad::mul(y, ad::Tensor::constant(weights)));
}

inline std::vector<NamedCheck> op_gradient_checks(std::uint64_t seed, double tol = 1e-4) {
  Rng rng(seed);
  std::vector<NamedCheck> out;
  auto run = [&](const std::string& name, std::vector<ad::Matrix> inputs,
                 const std::function<ad::Tensor(std::vector<ad::Tensor>&)>& op) {
    std::vector<ad::Tensor> params;
    for (auto& m : inputs) params.push_back(ad::Tensor::parameter(m));
    ad::Matrix w;
    {
      ad::NoGradGuard g;
      const ad::Matrix shape = op(params).value();
      w = uniform_matrix(rng, shape.rows(), shape.cols(), 0.5, 1.5);
    }
    auto f = [&] { return weighted_sum(op(params), w); };
    out.push_back({name, grad_check(f, params, 1e-5, tol)});
  };
  auto M = [&](std::size_t r, std::size_t c) { return uniform_matrix(rng, r, c); };

  run("matmul", {M(3, 4), M(4, 2)}, [](auto& p) { return ad::matmul(p[0], p[1]); });
  run("add", {M(2, 5), M(2, 5)}, [](auto& p) { return ad::add(p[0], p[1]); });
  run("sub", {M(2, 5), M(2, 5)}, [](auto& p) { return ad::sub(p[0], p[1]); });
  run("mul", {M(2, 5), M(2, 5)}, [](auto& p) { return ad::mul(p[0], p[1]); });
  run("abs", {away_from_zero(rng, 2, 5)}, [](auto& p) { return ad::abs(p[0]); });
  run("tanh", {M(1, 6)}, [](auto& p) { return ad::tanh(p[0]); });
  run("relu", {away_from_zero(rng, 2, 5)}, [](auto& p) { return ad::relu(p[0]); });
  run("transpose", {M(3, 2)}, [](auto& p) { return ad::transpose(p[0]); });
  run("scale", {M(2, 3)}, [](auto& p) { return ad::scale(p[0], -1.7); });
  run("add_scalar", {M(2, 3)}, [](auto& p) { return ad::add_scalar(p[0], 0.4); });
  run("scale_by", {M(2, 3), M(1, 1)}, [](auto& p) { return ad::scale_by(p[0], p[1]); });
  run("softmax", {M(1, 5)}, [](auto& p) { return ad::softmax(p[0]); });
  run("softmax_masked", {M(1, 5)}, [](auto& p) {
    static const bool mask[] = {true, false, true, true, false};
    return ad::softmax(p[0], std::span<const bool>(mask));
  });
  run("softmax_rows", {M(3, 4)}, [](auto& p) { return ad::softmax_rows(p[0]); });
  run("reduce_mean", {M(3, 4)}, [](auto& p) { return ad::reduce_mean(p[0]); });
  run("mean_rows", {M(3, 4)}, [](auto& p) { return ad::mean_rows(p[0]); });
  run("concat", {M(2, 2), M(2, 3)}, [](auto& p) { return ad::concat({p[0], p[1]}); });
  run("slice_cols", {M(2, 6)}, [](auto& p) { return ad::slice_cols(p[0], 1, 3); });
  run("select", {M(2, 3)}, [](auto& p) { return ad::select(p[0], 4); });
  run("add_bias", {M(3, 4), M(1, 4)}, [](auto& p) { return ad::add_bias(p[0], p[1]); });
  run("layer_norm", {M(3, 5), M(1, 5), M(1, 5)},
      [](auto& p) { return ad::layer_norm(p[0], p[1], p[2]); });
  run("euclid", {M(1, 6), M(1, 6)}, [](auto& p) { return ad::euclid(p[0], p[1]); });
  run("gather_rows", {M(5, 3)}, [](auto& p) {
    static const std::uint32_t ids[] = {4, 0, 4, 2};
    return ad::gather_rows(p[0], ids);
  });
  run("dropout", {M(2, 6)}, [](auto& p) {
    Rng mask_rng(17);  // same mask on every probe
    return ad::dropout(p[0], 0.3, mask_rng);
  });
  run("composite", {M(3, 4), M(4, 4), M(1, 4)}, [](auto& p) {
    auto h = ad::tanh(ad::add_bias(ad::matmul(p[0], p[1]), p[2]));
    auto s = ad::softmax_rows(ad::matmul(h, ad::transpose(h)));
    return ad::matmul(s, h);
  });
  return out;
}

inline EncoderConfig small_encoder(std::size_t dim) {
  EncoderConfig e;
  e.vocab_size = 64;
  e.dim = dim;
  e.layers = 2;
  e.heads = 2;
  e.ff_dim = 2 * dim;
  e.dropout = 0.1;
  return e;
}

inline std::vector<ad::Tensor> tensors_of(const std::vector<NamedParam>& named) {
  std::vector<ad::Tensor> out;
  for (const auto& p : named) out.push_back(p.tensor);
  return out;
}

// Eval mode: dropout is off, so the loss is a deterministic function of the
// parameters.
inline GradCheckReport estimator_gradient_check(std::size_t dim, double tol = 1e-3) {
  EstimatorConfig cfg;
  cfg.encoder = small_encoder(dim);
  EstimatorModel model(cfg);
  // Move the pooling weights off their symmetric start.
  Rng rng(31);
  for (auto& v : model.param_groups()[0].params.back().mutable_value().data()) v = 1.3;
  auto alpha = model.embedder().attention().alpha();
  for (auto& v : alpha.mutable_value().data()) v = rng.uniform(-1, 1);
  const EvalTuple tuple{"der hund bellt laut", "the dog barks", "a dog is barking loudly", 0.3};
  auto params = tensors_of(model.parameters());
  return grad_check([&] { return model.squared_error(tuple, Mode::kEval, nullptr); }, params,
                    1e-5, tol);
}

// The margin is large enough that both hinge terms stay active.
inline GradCheckReport ranker_gradient_check(std::size_t dim, double tol = 1e-3) {
  RankerConfig cfg;
  cfg.encoder = small_encoder(dim);
  cfg.margin = 50.0;
  RankerModel model(cfg);
  Rng rng(37);
  auto alpha = model.embedder().attention().alpha();
  for (auto& v : alpha.mutable_value().data()) v = rng.uniform(-1, 1);
  const RankQuadruple quad{"der hund bellt laut", "the dog barks loudly", "cat sleeping now",
                           "a dog is barking loudly"};
  auto params = tensors_of(model.parameters());
  return grad_check([&] { return model.triplet_loss(quad, Mode::kEval, nullptr); }, params,
                    1e-5, tol);
}

}  // namespace mtscore::testing

#endif  // MTSCORE_TESTS_GRADIENT_SUITE_HPP_

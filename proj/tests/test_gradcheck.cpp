#include <doctest.h>

#include <cmath>
#include <limits>

#include "mtscore/error.hpp"
#include "support/gradient_suite.hpp"

using namespace mtscore;
using ad::Matrix;
using ad::Tensor;

TEST_CASE("every op matches central differences") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    for (const auto& c : testing::op_gradient_checks(seed)) {
      INFO(c.name << " seed " << seed << " err " << c.report.max_rel_error);
      CHECK(c.report.passed);
      CHECK(c.report.probes > 0);
    }
  }
}

TEST_CASE("full estimator and ranker gradients") {
  const auto est = testing::estimator_gradient_check(8);
  INFO("estimator err " << est.max_rel_error << " at param " << est.worst_param);
  CHECK(est.passed);
  const auto rk = testing::ranker_gradient_check(8);
  INFO("ranker err " << rk.max_rel_error << " at param " << rk.worst_param);
  CHECK(rk.passed);
}

TEST_CASE("grad_check flags a wrong gradient") {
  // x * detached(x): the tape sees a constant factor and reports x, while
  // the function's true derivative is 2x.
  auto bad_square = [](const Tensor& x) {
    return ad::reduce_mean(ad::mul(x, Tensor::constant(x.value())));
  };
  const auto report = grad_check(bad_square, Matrix::row({1.5}));
  CHECK_FALSE(report.passed);
  CHECK(report.worst_analytic == doctest::Approx(1.5));
  CHECK(report.worst_numeric == doctest::Approx(3.0));

  const auto good = grad_check([](const Tensor& x) { return ad::reduce_mean(ad::mul(x, x)); },
                               Matrix::row({1.5}));
  CHECK(good.passed);
  CHECK(good.max_rel_error < 1e-8);
}

TEST_CASE("grad_check raises on non-finite probes") {
  auto f = [](const Tensor& x) {
    const double big = std::numeric_limits<double>::infinity();
    return ad::reduce_mean(ad::scale(x, x.value()[0] > 1.0 ? big : 1.0));
  };
  CHECK_THROWS_AS(grad_check(f, Matrix::row({1.0})), ProbeError);
  CHECK_NOTHROW(grad_check(f, Matrix::row({0.5})));
}

TEST_CASE("grad_check restores the parameters") {
  Rng rng(3);
  const Matrix start = testing::uniform_matrix(rng, 2, 3);
  auto x = Tensor::parameter(start);
  std::vector<Tensor> params{x};
  grad_check([&] { return ad::reduce_mean(ad::tanh(x)); }, params);
  CHECK(x.value() == start);
}

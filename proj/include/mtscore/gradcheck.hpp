#ifndef MTSCORE_GRADCHECK_HPP_
#define MTSCORE_GRADCHECK_HPP_

#include <cstddef>
#include <functional>
#include <span>

#include "mtscore/autodiff.hpp"

namespace mtscore {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_param = 0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t probes = 0;
  bool passed = true;
};

// Relative error uses max(|analytic|, |numeric|, floor) as the denominator so
// entries whose true gradient is zero compare on an absolute scale.
inline constexpr double kGradCheckFloor = 1e-6;

// Compares the tape gradient of a scalar function of `params` with central
// finite differences, perturbing every entry of every parameter in place.
// Throws ProbeError when f is non-finite at a probe point.
GradCheckReport grad_check(const std::function<ad::Tensor()>& f,
                           std::span<ad::Tensor> params, double step = 1e-5,
                           double tol = 1e-4);

// Single-input form: f is evaluated on a fresh parameter holding `point`.
GradCheckReport grad_check(const std::function<ad::Tensor(const ad::Tensor&)>& f,
                           const ad::Matrix& point, double step = 1e-5,
                           double tol = 1e-4);

}  // namespace mtscore

#endif  // MTSCORE_GRADCHECK_HPP_

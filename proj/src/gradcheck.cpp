#include "mtscore/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mtscore/error.hpp"

namespace mtscore {

namespace {

double eval_scalar(const std::function<ad::Tensor()>& f) {
  ad::NoGradGuard guard;
  const double v = f().item();
  if (!std::isfinite(v)) throw ProbeError("grad_check: non-finite value at probe point");
  return v;
}

}  // namespace

GradCheckReport grad_check(const std::function<ad::Tensor()>& f,
                           std::span<ad::Tensor> params, double step, double tol) {
  for (auto& p : params) p.zero_grad();
  ad::Tensor loss = f();
  if (!std::isfinite(loss.item())) throw ProbeError("grad_check: non-finite value at base point");
  ad::backward(loss);

  std::vector<ad::Matrix> analytic;
  analytic.reserve(params.size());
  for (const auto& p : params) analytic.push_back(p.grad());

  GradCheckReport report;
  for (std::size_t k = 0; k < params.size(); ++k) {
    ad::Matrix& w = params[k].mutable_value();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double saved = w[i];
      w[i] = saved + step;
      const double up = eval_scalar(f);
      w[i] = saved - step;
      const double down = eval_scalar(f);
      w[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic[k][i];
      const double denom = std::max({std::fabs(a), std::fabs(numeric), kGradCheckFloor});
      const double rel = std::fabs(a - numeric) / denom;
      ++report.probes;
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_param = k;
        report.worst_index = i;
        report.worst_analytic = a;
        report.worst_numeric = numeric;
      }
    }
  }
  report.passed = report.max_rel_error <= tol;
  return report;
}

GradCheckReport grad_check(const std::function<ad::Tensor(const ad::Tensor&)>& f,
                           const ad::Matrix& point, double step, double tol) {
  ad::Tensor x = ad::Tensor::parameter(point);
  std::vector<ad::Tensor> params{x};
  return grad_check([&] { return f(x); }, params, step, tol);
}

}  // namespace mtscore

#include "mtscore/optim.hpp"

#include <cmath>
#include <unordered_set>

#include "mtscore/error.hpp"

namespace mtscore {

void zero_grad(std::span<ParamGroup> groups) {
  for (auto& g : groups)
    for (auto& p : g.params) p.zero_grad();
}

AdamSlot& Adam::slot(const ad::Tensor& param) {
  auto [it, inserted] = slots_.try_emplace(param.node());
  if (inserted) {
    it->second.m = ad::Matrix(param.rows(), param.cols());
    it->second.v = ad::Matrix(param.rows(), param.cols());
  }
  return it->second;
}

const AdamSlot* Adam::find_slot(const ad::Tensor& param) const {
  auto it = slots_.find(param.node());
  return it == slots_.end() ? nullptr : &it->second;
}

void Adam::step(std::span<ParamGroup> groups) {
  std::unordered_set<const ad::Node*> seen;
  for (const auto& g : groups)
    for (const auto& p : g.params)
      if (!seen.insert(p.node()).second) {
        throw ContractError("Adam::step: parameter listed in more than one group");
      }

  for (auto& g : groups) {
    if (g.frozen) continue;
    for (auto& p : g.params) {
      if (!p.has_grad()) continue;
      AdamSlot& s = slot(p);
      ++s.t;
      const ad::Matrix grad = p.grad();
      ad::Matrix& w = p.mutable_value();
      const double bc1 = 1.0 - std::pow(hyper_.beta1, static_cast<double>(s.t));
      const double bc2 = 1.0 - std::pow(hyper_.beta2, static_cast<double>(s.t));
      for (std::size_t i = 0; i < w.size(); ++i) {
        s.m[i] = hyper_.beta1 * s.m[i] + (1.0 - hyper_.beta1) * grad[i];
        s.v[i] = hyper_.beta2 * s.v[i] + (1.0 - hyper_.beta2) * grad[i] * grad[i];
        const double mhat = s.m[i] / bc1;
        const double vhat = s.v[i] / bc2;
        w[i] -= g.learning_rate * mhat / (std::sqrt(vhat) + hyper_.eps);
      }
    }
  }
}

}  // namespace mtscore

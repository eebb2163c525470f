#ifndef MTSCORE_OPTIM_HPP_
#define MTSCORE_OPTIM_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mtscore/autodiff.hpp"

namespace mtscore {

// A set of parameters sharing one learning rate and one freeze flag.
struct ParamGroup {
  std::string name;
  std::vector<ad::Tensor> params;
  double learning_rate = 1e-5;
  bool frozen = false;
};

void zero_grad(std::span<ParamGroup> groups);

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamSlot {
  ad::Matrix m;
  ad::Matrix v;
  std::uint64_t t = 0;
};

class Adam {
 public:
  explicit Adam(AdamHyper hyper = {}) : hyper_(hyper) {}

  // Updates every parameter of every unfrozen group with that group's rate.
  // Frozen groups are not read or written. Moments persist across calls.
  void step(std::span<ParamGroup> groups);

  const AdamHyper& hyper() const { return hyper_; }
  // Moment slot for a parameter; created zeroed on first access.
  AdamSlot& slot(const ad::Tensor& param);
  const AdamSlot* find_slot(const ad::Tensor& param) const;

 private:
  AdamHyper hyper_;
  std::unordered_map<const ad::Node*, AdamSlot> slots_;
};

}  // namespace mtscore

#endif  // MTSCORE_OPTIM_HPP_

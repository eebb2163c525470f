#ifndef MTSCORE_TRAINING_HPP_
#define MTSCORE_TRAINING_HPP_

#include <cstddef>
#include <functional>
#include <vector>

#include "mtscore/autodiff.hpp"
#include "mtscore/optim.hpp"
#include "mtscore/rng.hpp"

namespace mtscore {

struct TrainingLog {
  std::vector<double> epoch_loss;                     // mean item loss per epoch
  std::vector<std::vector<std::size_t>> batch_order;  // item permutation per epoch
};

struct EpochSchedule {
  std::size_t epochs = 1;
  std::size_t batch_size = 16;
};

// Mini-batch loop shared by both model kinds. Each epoch draws a fresh
// permutation from `shuffle_rng`, keeps the last partial batch, and takes one
// optimizer step per batch on the mean item loss. `before_epoch` may adjust
// group flags and rates.
TrainingLog run_training(std::size_t num_items, const EpochSchedule& schedule,
                         Rng& shuffle_rng, std::vector<ParamGroup>& groups, Adam& adam,
                         const std::function<void(std::size_t, std::vector<ParamGroup>&)>& before_epoch,
                         const std::function<ad::Tensor(std::size_t)>& item_loss);

}  // namespace mtscore

#endif  // MTSCORE_TRAINING_HPP_

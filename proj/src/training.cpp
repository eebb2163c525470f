#include "mtscore/training.hpp"

#include <numeric>

#include "mtscore/error.hpp"

namespace mtscore {

TrainingLog run_training(std::size_t num_items, const EpochSchedule& schedule,
                         Rng& shuffle_rng, std::vector<ParamGroup>& groups, Adam& adam,
                         const std::function<void(std::size_t, std::vector<ParamGroup>&)>& before_epoch,
                         const std::function<ad::Tensor(std::size_t)>& item_loss) {
  if (num_items == 0) throw ContractError("train: empty dataset");
  if (schedule.batch_size == 0) throw ContractError("train: batch size must be positive");

  TrainingLog log;
  std::vector<std::size_t> order(num_items);
  for (std::size_t epoch = 0; epoch < schedule.epochs; ++epoch) {
    if (before_epoch) before_epoch(epoch, groups);
    std::iota(order.begin(), order.end(), 0);
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    log.batch_order.push_back(order);

    double total = 0.0;
    for (std::size_t start = 0; start < num_items; start += schedule.batch_size) {
      const std::size_t end = std::min(num_items, start + schedule.batch_size);
      ad::Tensor sum = item_loss(order[start]);
      for (std::size_t i = start + 1; i < end; ++i) sum = ad::add(sum, item_loss(order[i]));
      total += sum.item();
      const ad::Tensor loss = ad::scale(sum, 1.0 / static_cast<double>(end - start));
      zero_grad(groups);
      if (loss.requires_grad()) ad::backward(loss);
      adam.step(groups);
    }
    log.epoch_loss.push_back(total / static_cast<double>(num_items));
  }
  return log;
}

}  // namespace mtscore

#ifndef MTSCORE_CHECKPOINT_HPP_
#define MTSCORE_CHECKPOINT_HPP_

// Single-file model snapshot: a plain-text header (format version, model
// kind, configuration, parameter names and shapes, optimizer step counts)
// terminated by a "data" line, followed by little-endian doubles. For each
// parameter in declaration order: values, then Adam first and second moments.

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <variant>

#include "mtscore/config.hpp"
#include "mtscore/estimator.hpp"
#include "mtscore/ranker.hpp"

namespace mtscore {

inline constexpr int kCheckpointVersion = 1;

enum class ModelKind { kEstimator, kRanker };

void save_checkpoint(std::ostream& out, const EstimatorModel& model);
void save_checkpoint(std::ostream& out, const RankerModel& model);
void save_checkpoint(const std::filesystem::path& path, const EstimatorModel& model);
void save_checkpoint(const std::filesystem::path& path, const RankerModel& model);

using LoadedModel =
    std::variant<std::unique_ptr<EstimatorModel>, std::unique_ptr<RankerModel>>;

// Rebuilds the model from the stored configuration and overwrites every
// parameter and optimizer slot. Throws DataError on any mismatch or
// truncation.
LoadedModel load_checkpoint(std::istream& in, const std::string& source = "<checkpoint>");
LoadedModel load_checkpoint(const std::filesystem::path& path);

ModelKind kind_of(const LoadedModel& m);

}  // namespace mtscore

#endif  // MTSCORE_CHECKPOINT_HPP_

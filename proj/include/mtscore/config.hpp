#ifndef MTSCORE_CONFIG_HPP_
#define MTSCORE_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mtscore/estimator.hpp"
#include "mtscore/ranker.hpp"

namespace mtscore {

// Flat key = value settings for every hyperparameter of both model kinds.
// Lines starting with '#' are comments. Unknown keys are rejected.
class RunConfig {
 public:
  RunConfig() = default;
  explicit RunConfig(const EstimatorConfig& e);
  explicit RunConfig(const RankerConfig& r);

  static RunConfig parse(std::istream& in, const std::string& source = "<config>");
  static RunConfig load(const std::filesystem::path& path);

  // Throws DataError for unknown keys or malformed values.
  void set(std::string_view key, std::string_view value);
  // Canonical (key, value) list in a fixed order; round-trips through set().
  std::vector<std::pair<std::string, std::string>> entries() const;

  EstimatorConfig estimator() const { return estimator_; }
  RankerConfig ranker() const { return ranker_; }
  std::uint64_t seed() const { return estimator_.seed; }

 private:
  // Shared fields (seed, encoder, pooling, epochs, batch size) are kept equal
  // in both views.
  EstimatorConfig estimator_;
  RankerConfig ranker_;
};

}  // namespace mtscore

#endif  // MTSCORE_CONFIG_HPP_

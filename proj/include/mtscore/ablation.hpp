#ifndef MTSCORE_ABLATION_HPP_
#define MTSCORE_ABLATION_HPP_

#include <span>
#include <string>
#include <vector>

#include "mtscore/data.hpp"
#include "mtscore/estimator.hpp"
#include "mtscore/metrics.hpp"
#include "mtscore/ranker.hpp"

namespace mtscore {

struct AblationRow {
  std::string lang_pair;
  KendallResult reference_only;
  KendallResult full;
  double delta_tau = 0.0;  // full.tau - reference_only.tau
};

struct SourceAblationResult {
  std::vector<AblationRow> rows;
  TrainingLog reference_only_log;
  TrainingLog full_log;
};

struct SourceAblationOptions {
  // Train both arms as full (source + reference) models. A self-comparison
  // whose deltas must all be zero.
  bool same_architecture = false;
  // 2 or more trains the arms concurrently.
  std::size_t threads = 1;
};

// Trains a reference-only ranker and a source+reference ranker from the same
// seed and data, evaluates both on `test`, and reports tau per language pair.
SourceAblationResult run_source_ablation(std::span<const RankQuadruple> train,
                                         std::span<const DarrPair> test,
                                         const RankerConfig& base,
                                         const SourceAblationOptions& options = {});

struct EstimatorVariantResult {
  double mse_base = 0.0;         // 6d features
  double mse_with_source = 0.0;  // 7d features
  KendallResult tau_base;
  KendallResult tau_with_source;
  TrainingLog base_log;
  TrainingLog with_source_log;

  double delta_mse() const { return mse_with_source - mse_base; }
  double delta_tau() const { return tau_with_source.tau - tau_base.tau; }
};

// Trains the 6d-feature and 7d-feature estimators from the same seed and
// compares held-out MSE and pairwise tau.
EstimatorVariantResult run_estimator_source_variant(std::span<const EvalTuple> train,
                                                    std::span<const EvalTuple> test,
                                                    const EstimatorConfig& base);

// Pairwise tau of predictions against targets over every test pair with
// distinct targets; the higher target plays the better hypothesis.
KendallResult prediction_tau(std::span<const double> predictions,
                             std::span<const double> targets);

double mean_squared_error(std::span<const double> predictions, std::span<const double> targets);

}  // namespace mtscore

#endif  // MTSCORE_ABLATION_HPP_

#include "mtscore/ablation.hpp"

#include <future>
#include <map>

#include "mtscore/error.hpp"

namespace mtscore {

namespace {

struct Arm {
  TrainingLog log;
  EvalReport report;
};

Arm train_and_evaluate(const RankerConfig& config, std::span<const RankQuadruple> train,
                       std::span<const DarrPair> test) {
  RankerModel model(config);
  Arm arm;
  arm.log = model.train(train);
  arm.report = evaluate_metric(
      [&model](std::span<const ScoringTriple> t) { return model.score(t); }, test);
  return arm;
}

}  // namespace

SourceAblationResult run_source_ablation(std::span<const RankQuadruple> train,
                                         std::span<const DarrPair> test,
                                         const RankerConfig& base,
                                         const SourceAblationOptions& options) {
  if (test.empty()) throw ContractError("run_source_ablation: empty test set");
  RankerConfig ref_cfg = base;
  ref_cfg.reference_only = !options.same_architecture;
  RankerConfig full_cfg = base;
  full_cfg.reference_only = false;

  Arm ref_arm, full_arm;
  if (options.threads >= 2) {
    auto ref_future = std::async(std::launch::async,
                                 [&] { return train_and_evaluate(ref_cfg, train, test); });
    full_arm = train_and_evaluate(full_cfg, train, test);
    ref_arm = ref_future.get();
  } else {
    ref_arm = train_and_evaluate(ref_cfg, train, test);
    full_arm = train_and_evaluate(full_cfg, train, test);
  }

  SourceAblationResult result;
  result.reference_only_log = std::move(ref_arm.log);
  result.full_log = std::move(full_arm.log);
  for (const auto& row : full_arm.report.rows) {
    const ReportRow* ref_row = ref_arm.report.find(row.lang_pair, row.subset);
    if (ref_row == nullptr) continue;
    AblationRow r;
    r.lang_pair = row.lang_pair;
    r.reference_only = {ref_row->concordant, ref_row->discordant, ref_row->tau};
    r.full = {row.concordant, row.discordant, row.tau};
    r.delta_tau = row.tau - ref_row->tau;
    result.rows.push_back(std::move(r));
  }
  return result;
}

double mean_squared_error(std::span<const double> predictions, std::span<const double> targets) {
  if (predictions.size() != targets.size() || predictions.empty()) {
    throw ContractError("mean_squared_error: size mismatch or empty input");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double r = predictions[i] - targets[i];
    s += r * r;
  }
  return s / static_cast<double>(predictions.size());
}

KendallResult prediction_tau(std::span<const double> predictions,
                             std::span<const double> targets) {
  if (predictions.size() != targets.size()) {
    throw ContractError("prediction_tau: size mismatch");
  }
  std::vector<ScoredPair> pairs;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    for (std::size_t j = i + 1; j < targets.size(); ++j) {
      if (targets[i] == targets[j]) continue;
      const bool i_better = targets[i] > targets[j];
      ScoredPair p;
      p.better_score = i_better ? predictions[i] : predictions[j];
      p.worse_score = i_better ? predictions[j] : predictions[i];
      pairs.push_back(std::move(p));
    }
  }
  return kendall_tau_like(pairs);
}

EstimatorVariantResult run_estimator_source_variant(std::span<const EvalTuple> train,
                                                    std::span<const EvalTuple> test,
                                                    const EstimatorConfig& base) {
  if (test.empty()) throw ContractError("run_estimator_source_variant: empty test set");
  std::vector<double> targets;
  for (const auto& t : test) targets.push_back(t.score);

  EstimatorVariantResult out;
  EstimatorConfig base_cfg = base;
  base_cfg.include_source = false;
  EstimatorModel base_model(base_cfg);
  out.base_log = base_model.train(train);
  const auto base_pred = base_model.predict(test);
  out.mse_base = mean_squared_error(base_pred, targets);
  out.tau_base = prediction_tau(base_pred, targets);

  EstimatorConfig src_cfg = base;
  src_cfg.include_source = true;
  EstimatorModel src_model(src_cfg);
  out.with_source_log = src_model.train(train);
  const auto src_pred = src_model.predict(test);
  out.mse_with_source = mean_squared_error(src_pred, targets);
  out.tau_with_source = prediction_tau(src_pred, targets);
  return out;
}

}  // namespace mtscore

#ifndef MTSCORE_METRICS_HPP_
#define MTSCORE_METRICS_HPP_

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mtscore/data.hpp"

namespace mtscore {

struct ScoredPair {
  DarrPair pair;
  double better_score = 0.0;
  double worse_score = 0.0;
};

struct KendallResult {
  std::size_t concordant = 0;
  std::size_t discordant = 0;
  double tau = 0.0;

  friend bool operator==(const KendallResult&, const KendallResult&) = default;
};

// Concordant iff better_score > worse_score; ties and reversals are
// discordant. tau = (C - D) / (C + D). Throws ContractError on empty input.
KendallResult kendall_tau_like(std::span<const ScoredPair> pairs);

// Systems of one language pair, best first.
using SystemRanking = std::map<std::string, std::vector<std::string>>;

// Mean DA per system, descending; ties broken by system name.
SystemRanking rank_systems_by_mean_da(std::span<const DASegment> segments);
// Net wins (times better minus times worse), descending; ties by name.
SystemRanking rank_systems_by_wins(std::span<const DarrPair> pairs);

// Pairs whose two systems are both among the first n of `ranking`.
// Throws ContractError for n < 2 or a system missing from the ranking.
std::vector<ScoredPair> topn_subset(std::span<const ScoredPair> pairs,
                                    std::span<const std::string> ranking, std::size_t n);

// Sentence BLEU: geometric mean of clipped 1..max_n-gram precisions with
// add-one smoothing on orders above 1, times the brevity penalty.
double sentence_bleu(std::string_view hypothesis, std::string_view reference,
                     std::size_t max_n = 4);

// Character n-gram F-beta averaged over orders 1..max_n (whitespace removed,
// orders with no n-grams on either side skipped).
double chrf(std::string_view hypothesis, std::string_view reference, std::size_t max_n = 6,
            double beta = 2.0);

struct ReportRow {
  std::string lang_pair;
  std::string subset;  // "all" or "topN"
  std::size_t concordant = 0;
  std::size_t discordant = 0;
  double tau = 0.0;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct EvalReport {
  std::vector<ReportRow> rows;

  const ReportRow* find(std::string_view lang_pair, std::string_view subset) const;
  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Scores a batch of (source, hypothesis, reference) triples.
using BatchScorer = std::function<std::vector<double>(std::span<const ScoringTriple>)>;

BatchScorer bleu_scorer();
BatchScorer chrf_scorer();

// Scores h+ and h- of every pair with one batched call.
std::vector<ScoredPair> score_pairs(const BatchScorer& metric, std::span<const DarrPair> pairs);

// One "all" row per language pair, plus a "topN" row for every N in `topn`
// whose slice is non-empty. `ranking` is required when `topn` is non-empty.
EvalReport evaluate_scored(std::span<const ScoredPair> pairs, const SystemRanking* ranking,
                           std::span<const std::size_t> topn);

EvalReport evaluate_metric(const BatchScorer& metric, std::span<const DarrPair> pairs,
                           const SystemRanking* ranking = nullptr,
                           std::span<const std::size_t> topn = {});

}  // namespace mtscore

#endif  // MTSCORE_METRICS_HPP_

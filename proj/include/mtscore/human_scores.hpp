#ifndef MTSCORE_HUMAN_SCORES_HPP_
#define MTSCORE_HUMAN_SCORES_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mtscore/data.hpp"

namespace mtscore {

// ---------------------------------------------------------------------------
// Translation edit rate

struct TerOptions {
  bool shifts = true;
  std::size_t max_shift_size = 10;
  std::size_t max_shift_distance = 50;
  std::size_t max_iterations = 50;
};

struct TerResult {
  std::size_t edits = 0;   // insertions + deletions + substitutions
  std::size_t shifts = 0;  // block moves, cost 1 each
  std::size_t target_length = 0;

  double rate() const {
    return static_cast<double>(edits + shifts) / static_cast<double>(target_length);
  }
};

// Word-level Levenshtein distance with unit costs.
std::size_t edit_distance(std::span<const std::string> hyp, std::span<const std::string> ref);

// Moves hyp[start, start+length) so it begins at index `dest` of the
// sequence that remains after removing it.
std::vector<std::string> apply_shift(std::span<const std::string> hyp, std::size_t start,
                                     std::size_t length, std::size_t dest);

// Greedy TER: while some block shift lowers the edit distance by more than
// its own cost, apply the best one (first found on ties).
TerResult ter_tokens(std::span<const std::string> hyp, std::span<const std::string> target,
                     const TerOptions& options = {});

// Words are split with split_words. Throws ContractError for an empty target.
double ter(std::string_view hypothesis, std::string_view target, bool shifts = true);

// score = TER(hypothesis, post-edit) with shifts; the post-edit is dropped.
std::vector<EvalTuple> hter_dataset(std::span<const PostEditTuple> tuples, bool shifts = true);

// ---------------------------------------------------------------------------
// MQM

struct MqmAnnotation {
  std::size_t minor = 0;
  std::size_t major = 0;
  std::size_t critical = 0;
  std::size_t sentence_length = 1;
};

inline constexpr double kMqmMinorWeight = 1.0;
inline constexpr double kMqmMajorWeight = 5.0;
inline constexpr double kMqmCriticalWeight = 10.0;

// 100 - (minor + 5 major + 10 critical) / (length * 100).
double mqm_score(const MqmAnnotation& ann);
// max(0, raw / 100).
double normalize_mqm(double raw);

// ---------------------------------------------------------------------------
// DA to relative ranking

inline constexpr double kDarrThreshold = 25.0;

// For each (lang pair, segment), every unordered system pair whose DA
// difference is strictly above `threshold` yields one pair labelled by the
// higher score. Equal scores (only reachable with a negative threshold) put
// the lexicographically smaller system first. Output is ordered by lang pair,
// segment id (see segment_id_less), then system pair.
// Throws DataError on a duplicate (lang pair, segment, system) row or when
// rows of one segment disagree on source or reference.
std::vector<DarrPair> darr_convert(std::span<const DASegment> segments,
                                   double threshold = kDarrThreshold);

// Non-negative integer ids come first in numeric order, then all other ids
// in lexicographic order.
bool segment_id_less(std::string_view a, std::string_view b);

}  // namespace mtscore

#endif  // MTSCORE_HUMAN_SCORES_HPP_

#ifndef MTSCORE_DATA_HPP_
#define MTSCORE_DATA_HPP_

#include <string>

namespace mtscore {

// (source, hypothesis, reference) plus a quality target.
struct EvalTuple {
  std::string source;
  std::string hypothesis;
  std::string reference;
  double score = 0.0;

  friend bool operator==(const EvalTuple&, const EvalTuple&) = default;
};

// Relative-ranking record: `better` was judged above `worse`.
struct RankQuadruple {
  std::string source;
  std::string better;
  std::string worse;
  std::string reference;

  friend bool operator==(const RankQuadruple&, const RankQuadruple&) = default;
};

struct PostEditTuple {
  std::string source;
  std::string hypothesis;
  std::string reference;
  std::string post_edit;

  friend bool operator==(const PostEditTuple&, const PostEditTuple&) = default;
};

struct DASegment {
  std::string lang_pair;
  std::string segment_id;
  std::string system;
  std::string source;
  std::string hypothesis;
  std::string reference;
  double da = 0.0;

  friend bool operator==(const DASegment&, const DASegment&) = default;
};

// Input for scoring a single hypothesis.
struct ScoringTriple {
  std::string source;
  std::string hypothesis;
  std::string reference;

  friend bool operator==(const ScoringTriple&, const ScoringTriple&) = default;
};

struct DarrPair {
  std::string lang_pair;
  std::string segment_id;
  std::string system_better;
  std::string system_worse;
  RankQuadruple quad;

  friend bool operator==(const DarrPair&, const DarrPair&) = default;
};

}  // namespace mtscore

#endif  // MTSCORE_DATA_HPP_

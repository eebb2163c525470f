#include "mtscore/human_scores.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "mtscore/error.hpp"
#include "mtscore/text.hpp"

namespace mtscore {

std::size_t edit_distance(std::span<const std::string> hyp, std::span<const std::string> ref) {
  std::vector<std::size_t> prev(ref.size() + 1), cur(ref.size() + 1);
  for (std::size_t j = 0; j <= ref.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= hyp.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= ref.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (hyp[i - 1] == ref[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[ref.size()];
}

std::vector<std::string> apply_shift(std::span<const std::string> hyp, std::size_t start,
                                     std::size_t length, std::size_t dest) {
  if (start + length > hyp.size() || dest > hyp.size() - length) {
    throw ContractError("apply_shift: shift out of range");
  }
  std::vector<std::string> rest;
  rest.reserve(hyp.size());
  rest.insert(rest.end(), hyp.begin(), hyp.begin() + static_cast<std::ptrdiff_t>(start));
  rest.insert(rest.end(), hyp.begin() + static_cast<std::ptrdiff_t>(start + length), hyp.end());
  rest.insert(rest.begin() + static_cast<std::ptrdiff_t>(dest),
              hyp.begin() + static_cast<std::ptrdiff_t>(start),
              hyp.begin() + static_cast<std::ptrdiff_t>(start + length));
  return rest;
}

TerResult ter_tokens(std::span<const std::string> hyp, std::span<const std::string> target,
                     const TerOptions& options) {
  if (target.empty()) throw ContractError("ter: empty target");
  std::vector<std::string> cur(hyp.begin(), hyp.end());
  std::size_t cur_ed = edit_distance(cur, target);
  TerResult result;
  result.target_length = target.size();

  if (options.shifts) {
    for (std::size_t iter = 0; iter < options.max_iterations && cur_ed > 0; ++iter) {
      const std::size_t n = cur.size();
      std::size_t best_ed = cur_ed;
      std::vector<std::string> best;
      for (std::size_t start = 0; start < n; ++start) {
        const std::size_t max_len = std::min(options.max_shift_size, n - start);
        for (std::size_t len = 1; len <= max_len; ++len) {
          for (std::size_t dest = 0; dest <= n - len; ++dest) {
            if (dest == start) continue;
            const std::size_t dist = dest > start ? dest - start : start - dest;
            if (dist > options.max_shift_distance) continue;
            auto cand = apply_shift(cur, start, len, dest);
            const std::size_t ed = edit_distance(cand, target);
            // Accept only if the shift pays for its own unit cost.
            if (ed + 1 < best_ed) {
              best_ed = ed + 1;
              best = std::move(cand);
            }
          }
        }
      }
      if (best.empty()) break;
      cur = std::move(best);
      cur_ed = best_ed - 1;
      ++result.shifts;
    }
  }
  result.edits = cur_ed;
  return result;
}

double ter(std::string_view hypothesis, std::string_view target, bool shifts) {
  const auto h = split_words(hypothesis);
  const auto t = split_words(target);
  TerOptions opts;
  opts.shifts = shifts;
  return ter_tokens(h, t, opts).rate();
}

std::vector<EvalTuple> hter_dataset(std::span<const PostEditTuple> tuples, bool shifts) {
  std::vector<EvalTuple> out;
  out.reserve(tuples.size());
  for (const auto& t : tuples) {
    out.push_back({t.source, t.hypothesis, t.reference, ter(t.hypothesis, t.post_edit, shifts)});
  }
  return out;
}

double mqm_score(const MqmAnnotation& ann) {
  if (ann.sentence_length == 0) throw ContractError("mqm_score: sentence length must be >= 1");
  const double penalty = kMqmMinorWeight * static_cast<double>(ann.minor) +
                         kMqmMajorWeight * static_cast<double>(ann.major) +
                         kMqmCriticalWeight * static_cast<double>(ann.critical);
  return 100.0 - penalty / (static_cast<double>(ann.sentence_length) * 100.0);
}

double normalize_mqm(double raw) { return std::max(0.0, raw / 100.0); }

namespace {

bool parse_uint(std::string_view s, unsigned long long& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

bool segment_id_less(std::string_view a, std::string_view b) {
  unsigned long long x = 0, y = 0;
  const bool na = parse_uint(a, x);
  const bool nb = parse_uint(b, y);
  if (na != nb) return na;
  if (na && x != y) return x < y;
  return a < b;
}

std::vector<DarrPair> darr_convert(std::span<const DASegment> segments, double threshold) {
  struct KeyLess {
    bool operator()(const std::pair<std::string, std::string>& a,
                    const std::pair<std::string, std::string>& b) const {
      if (a.first != b.first) return a.first < b.first;
      return segment_id_less(a.second, b.second);
    }
  };
  std::map<std::pair<std::string, std::string>, std::vector<const DASegment*>, KeyLess> groups;
  for (const auto& seg : segments) {
    auto& g = groups[{seg.lang_pair, seg.segment_id}];
    for (const DASegment* other : g) {
      if (other->system == seg.system) {
        throw DataError("darr_convert: duplicate row for lang pair " + seg.lang_pair +
                        ", segment " + seg.segment_id + ", system " + seg.system);
      }
      if (other->source != seg.source || other->reference != seg.reference) {
        throw DataError("darr_convert: segment " + seg.segment_id + " (" + seg.lang_pair +
                        ") has inconsistent source or reference across systems");
      }
    }
    g.push_back(&seg);
  }

  std::vector<DarrPair> out;
  for (auto& [key, rows] : groups) {
    std::sort(rows.begin(), rows.end(),
              [](const DASegment* a, const DASegment* b) { return a->system < b->system; });
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = i + 1; j < rows.size(); ++j) {
        const DASegment* a = rows[i];
        const DASegment* b = rows[j];
        if (!(std::fabs(a->da - b->da) > threshold)) continue;
        const bool a_better = a->da >= b->da;
        const DASegment* hi = a_better ? a : b;
        const DASegment* lo = a_better ? b : a;
        out.push_back({key.first, key.second, hi->system, lo->system,
                       {a->source, hi->hypothesis, lo->hypothesis, a->reference}});
      }
    }
  }
  return out;
}

}  // namespace mtscore

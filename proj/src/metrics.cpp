#include "mtscore/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "mtscore/error.hpp"
#include "mtscore/text.hpp"

namespace mtscore {

KendallResult kendall_tau_like(std::span<const ScoredPair> pairs) {
  if (pairs.empty()) throw ContractError("kendall_tau_like: no pairs");
  KendallResult r;
  for (const auto& p : pairs) {
    if (p.better_score > p.worse_score) {
      ++r.concordant;
    } else {
      ++r.discordant;
    }
  }
  r.tau = (static_cast<double>(r.concordant) - static_cast<double>(r.discordant)) /
          static_cast<double>(r.concordant + r.discordant);
  return r;
}

namespace {

SystemRanking sort_by_key(const std::map<std::string, std::map<std::string, double>>& keyed) {
  SystemRanking out;
  for (const auto& [lp, systems] : keyed) {
    std::vector<std::pair<std::string, double>> v(systems.begin(), systems.end());
    std::stable_sort(v.begin(), v.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    auto& names = out[lp];
    for (auto& [name, _] : v) names.push_back(name);
  }
  return out;
}

}  // namespace

SystemRanking rank_systems_by_mean_da(std::span<const DASegment> segments) {
  std::map<std::string, std::map<std::string, std::pair<double, std::size_t>>> acc;
  for (const auto& s : segments) {
    auto& a = acc[s.lang_pair][s.system];
    a.first += s.da;
    ++a.second;
  }
  std::map<std::string, std::map<std::string, double>> means;
  for (const auto& [lp, systems] : acc)
    for (const auto& [sys, a] : systems) means[lp][sys] = a.first / static_cast<double>(a.second);
  return sort_by_key(means);
}

SystemRanking rank_systems_by_wins(std::span<const DarrPair> pairs) {
  std::map<std::string, std::map<std::string, double>> wins;
  for (const auto& p : pairs) {
    wins[p.lang_pair][p.system_better] += 1.0;
    wins[p.lang_pair][p.system_worse] -= 1.0;
  }
  return sort_by_key(wins);
}

std::vector<ScoredPair> topn_subset(std::span<const ScoredPair> pairs,
                                    std::span<const std::string> ranking, std::size_t n) {
  if (n < 2) throw ContractError("topn_subset: n must be at least 2");
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < ranking.size(); ++i) position.emplace(ranking[i], i);
  auto in_top = [&](const std::string& sys) {
    auto it = position.find(sys);
    if (it == position.end()) {
      throw ContractError("topn_subset: system '" + sys + "' missing from ranking");
    }
    return it->second < n;
  };
  std::vector<ScoredPair> out;
  for (const auto& p : pairs) {
    const bool a = in_top(p.pair.system_better);
    const bool b = in_top(p.pair.system_worse);
    if (a && b) out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// BLEU

namespace {

std::unordered_map<std::string, std::size_t> ngram_counts(const std::vector<std::string>& words,
                                                          std::size_t n) {
  std::unordered_map<std::string, std::size_t> counts;
  if (words.size() < n) return counts;
  for (std::size_t i = 0; i + n <= words.size(); ++i) {
    std::string key;
    for (std::size_t k = 0; k < n; ++k) {
      if (k) key.push_back('\x1f');
      key += words[i + k];
    }
    ++counts[key];
  }
  return counts;
}

template <typename Map>
std::size_t clipped_matches(const Map& hyp, const Map& ref) {
  std::size_t m = 0;
  for (const auto& [g, c] : hyp) {
    auto it = ref.find(g);
    if (it != ref.end()) m += std::min(c, it->second);
  }
  return m;
}

}  // namespace

double sentence_bleu(std::string_view hypothesis, std::string_view reference, std::size_t max_n) {
  const auto hyp = split_words(hypothesis);
  const auto ref = split_words(reference);
  if (ref.empty()) throw ContractError("sentence_bleu: empty reference");
  if (hyp.empty() || max_n == 0) return 0.0;
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= max_n; ++n) {
    const auto h = ngram_counts(hyp, n);
    const auto r = ngram_counts(ref, n);
    const double matches = static_cast<double>(clipped_matches(h, r));
    const double total = hyp.size() >= n ? static_cast<double>(hyp.size() - n + 1) : 0.0;
    const double smooth = n > 1 ? 1.0 : 0.0;
    const double num = matches + smooth;
    const double den = total + smooth;
    if (num == 0.0 || den == 0.0) return 0.0;
    log_sum += std::log(num / den);
  }
  const double c = static_cast<double>(hyp.size());
  const double rl = static_cast<double>(ref.size());
  const double bp = c < rl ? std::exp(1.0 - rl / c) : 1.0;
  return bp * std::exp(log_sum / static_cast<double>(max_n));
}

// ---------------------------------------------------------------------------
// chrF

namespace {

// Decodes UTF-8 into code points, dropping whitespace. Invalid bytes are
// kept as single units.
std::u32string chars_without_space(std::string_view s) {
  std::u32string out;
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    char32_t cp = c;
    if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    }
    if (len > 1) {
      bool ok = i + len <= s.size();
      for (std::size_t k = 1; ok && k < len; ++k) {
        const auto cc = static_cast<unsigned char>(s[i + k]);
        if ((cc & 0xC0) != 0x80) ok = false;
        cp = (cp << 6) | (cc & 0x3F);
      }
      if (!ok) {
        len = 1;
        cp = c;
      }
    }
    i += len;
    if (cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r') continue;
    out.push_back(cp);
  }
  return out;
}

std::unordered_map<std::u32string, std::size_t> char_ngrams(const std::u32string& s,
                                                            std::size_t n) {
  std::unordered_map<std::u32string, std::size_t> counts;
  if (s.size() < n) return counts;
  for (std::size_t i = 0; i + n <= s.size(); ++i) ++counts[s.substr(i, n)];
  return counts;
}

}  // namespace

double chrf(std::string_view hypothesis, std::string_view reference, std::size_t max_n,
            double beta) {
  const auto hyp = chars_without_space(hypothesis);
  const auto ref = chars_without_space(reference);
  if (ref.empty()) throw ContractError("chrf: empty reference");
  const double b2 = beta * beta;
  double f_sum = 0.0;
  std::size_t orders = 0;
  for (std::size_t n = 1; n <= max_n; ++n) {
    if (hyp.size() < n || ref.size() < n) continue;
    const auto h = char_ngrams(hyp, n);
    const auto r = char_ngrams(ref, n);
    const double m = static_cast<double>(clipped_matches(h, r));
    const double p = m / static_cast<double>(hyp.size() - n + 1);
    const double rc = m / static_cast<double>(ref.size() - n + 1);
    const double f = (p + rc) > 0.0 ? (1.0 + b2) * p * rc / (b2 * p + rc) : 0.0;
    f_sum += f;
    ++orders;
  }
  return orders == 0 ? 0.0 : f_sum / static_cast<double>(orders);
}

// ---------------------------------------------------------------------------
// Reports

const ReportRow* EvalReport::find(std::string_view lang_pair, std::string_view subset) const {
  for (const auto& r : rows)
    if (r.lang_pair == lang_pair && r.subset == subset) return &r;
  return nullptr;
}

BatchScorer bleu_scorer() {
  return [](std::span<const ScoringTriple> triples) {
    std::vector<double> out;
    out.reserve(triples.size());
    for (const auto& t : triples) out.push_back(sentence_bleu(t.hypothesis, t.reference));
    return out;
  };
}

BatchScorer chrf_scorer() {
  return [](std::span<const ScoringTriple> triples) {
    std::vector<double> out;
    out.reserve(triples.size());
    for (const auto& t : triples) out.push_back(chrf(t.hypothesis, t.reference));
    return out;
  };
}

std::vector<ScoredPair> score_pairs(const BatchScorer& metric, std::span<const DarrPair> pairs) {
  std::vector<ScoringTriple> triples;
  triples.reserve(pairs.size() * 2);
  for (const auto& p : pairs) {
    triples.push_back({p.quad.source, p.quad.better, p.quad.reference});
    triples.push_back({p.quad.source, p.quad.worse, p.quad.reference});
  }
  const std::vector<double> scores = metric(triples);
  if (scores.size() != triples.size()) {
    throw ContractError("score_pairs: metric returned " + std::to_string(scores.size()) +
                        " scores for " + std::to_string(triples.size()) + " inputs");
  }
  std::vector<ScoredPair> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!std::isfinite(scores[2 * i]) || !std::isfinite(scores[2 * i + 1])) {
      throw DataError("score_pairs: non-finite metric score");
    }
    out.push_back({pairs[i], scores[2 * i], scores[2 * i + 1]});
  }
  return out;
}

EvalReport evaluate_scored(std::span<const ScoredPair> pairs, const SystemRanking* ranking,
                           std::span<const std::size_t> topn) {
  if (!topn.empty() && ranking == nullptr) {
    throw ContractError("evaluate: top-N slicing needs a system ranking");
  }
  std::map<std::string, std::vector<ScoredPair>> by_lp;
  for (const auto& p : pairs) by_lp[p.pair.lang_pair].push_back(p);

  EvalReport report;
  for (const auto& [lp, group] : by_lp) {
    const KendallResult all = kendall_tau_like(group);
    report.rows.push_back({lp, "all", all.concordant, all.discordant, all.tau});
    if (topn.empty()) continue;
    auto it = ranking->find(lp);
    if (it == ranking->end()) {
      throw ContractError("evaluate: no system ranking for language pair " + lp);
    }
    for (std::size_t n : topn) {
      const auto slice = topn_subset(group, it->second, n);
      if (slice.empty()) continue;
      const KendallResult k = kendall_tau_like(slice);
      report.rows.push_back({lp, "top" + std::to_string(n), k.concordant, k.discordant, k.tau});
    }
  }
  return report;
}

EvalReport evaluate_metric(const BatchScorer& metric, std::span<const DarrPair> pairs,
                           const SystemRanking* ranking, std::span<const std::size_t> topn) {
  const auto scored = score_pairs(metric, pairs);
  return evaluate_scored(scored, ranking, topn);
}

}  // namespace mtscore

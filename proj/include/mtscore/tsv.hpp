#ifndef MTSCORE_TSV_HPP_
#define MTSCORE_TSV_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mtscore/ablation.hpp"
#include "mtscore/data.hpp"
#include "mtscore/human_scores.hpp"
#include "mtscore/metrics.hpp"

namespace mtscore::io {

// Tab-separated table with a mandatory header row. Every data row must have
// exactly as many fields as the header; blank lines are skipped.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row
  std::string source;                     // file name for messages

  // Index of a header column; throws DataError when absent.
  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const;
  // "<source>:<line>: <message>" as a DataError.
  [[noreturn]] void fail(std::size_t row, const std::string& message) const;
};

Table read_table(std::istream& in, std::string source);
Table read_table(const std::filesystem::path& path);
// Throws DataError when a field holds a tab or newline.
void write_table(std::ostream& out, const Table& table);
void write_table(const std::filesystem::path& path, const Table& table);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(const Table& t, std::size_t row, std::size_t col);
std::size_t parse_count(const Table& t, std::size_t row, std::size_t col);

// Header names of each schema.
inline const std::vector<std::string> kEvalHeader{"src", "hyp", "ref", "score"};
inline const std::vector<std::string> kPostEditHeader{"src", "hyp", "ref", "pe"};
inline const std::vector<std::string> kDaHeader{"lang-pair", "seg-id", "system", "src",
                                                "hyp",       "ref",    "da-score"};
inline const std::vector<std::string> kDarrHeader{"lang-pair", "seg-id",     "sys-better",
                                                  "sys-worse", "src",        "hyp-better",
                                                  "hyp-worse", "ref"};
inline const std::vector<std::string> kMqmHeader{"src",   "hyp",   "ref",
                                                 "minor", "major", "critical"};
inline const std::vector<std::string> kReportHeader{"lang-pair", "subset", "concordant",
                                                    "discordant", "tau"};
inline const std::vector<std::string> kAblationHeader{
    "lang-pair", "subset", "variant", "concordant", "discordant", "tau", "delta-tau"};
inline constexpr std::string_view kMetricColumn = "metric";

std::vector<EvalTuple> parse_eval_tuples(const Table& t);
Table eval_tuples_table(std::span<const EvalTuple> tuples);

std::vector<PostEditTuple> parse_post_edits(const Table& t);
Table post_edits_table(std::span<const PostEditTuple> tuples);

std::vector<DASegment> parse_da(const Table& t);
Table da_table(std::span<const DASegment> segments);

std::vector<DarrPair> parse_darr(const Table& t);
Table darr_table(std::span<const DarrPair> pairs);

struct MqmRow {
  std::string source;
  std::string hypothesis;
  std::string reference;
  MqmAnnotation annotation;
  bool explicit_length = false;  // length came from an optional "length" column
};
// Optional seventh column "length"; otherwise the hypothesis word count.
std::vector<MqmRow> parse_mqm(const Table& t);

// Scoring input: src, hyp, ref and optionally score. Extra columns are
// preserved for the output.
std::vector<ScoringTriple> parse_scoring_input(const Table& t);
// Input table plus a trailing "metric" column.
Table append_metric_column(const Table& input, std::span<const double> scores);

// (src, hyp, ref) → metric lookup for evaluation.
struct ScoreLookup {
  std::vector<ScoringTriple> keys;
  std::vector<double> scores;
};
ScoreLookup parse_scores(const Table& t);

EvalReport parse_report(const Table& t);
Table report_table(const EvalReport& report);

Table ablation_table(std::span<const AblationRow> rows);
std::vector<AblationRow> parse_ablation(const Table& t);

}  // namespace mtscore::io

#endif  // MTSCORE_TSV_HPP_

#include "mtscore/tsv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "mtscore/error.hpp"
#include "mtscore/text.hpp"

namespace mtscore::io {

namespace {

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += v[i];
  }
  return s;
}

void require_header(const Table& t, const std::vector<std::string>& expected) {
  if (t.header != expected) {
    throw DataError(t.source + ":1: expected header [" + join(expected) + "], got [" +
                    join(t.header) + "]");
  }
}

const std::string& nonempty(const Table& t, std::size_t row, std::size_t col) {
  const std::string& v = t.rows[row][col];
  if (split_words(v).empty()) t.fail(row, "column '" + t.header[col] + "' is empty");
  return v;
}

}  // namespace

std::size_t Table::column(std::string_view name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw DataError(source + ":1: missing column '" + std::string(name) + "'");
  }
  return static_cast<std::size_t>(it - header.begin());
}

bool Table::has_column(std::string_view name) const {
  return std::find(header.begin(), header.end(), name) != header.end();
}

void Table::fail(std::size_t row, const std::string& message) const {
  throw DataError(source + ":" + std::to_string(line_numbers.at(row)) + ": " + message);
}

Table read_table(std::istream& in, std::string source) {
  Table t;
  t.source = std::move(source);
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header) {
      if (line.empty()) throw DataError(t.source + ":1: missing header row");
      t.header = split_tabs(line);
      have_header = true;
      continue;
    }
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != t.header.size()) {
      throw DataError(t.source + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(t.header.size()) + " columns, got " +
                      std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(lineno);
  }
  if (!have_header) throw DataError(t.source + ": empty file, header row required");
  return t;
}

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open for reading");
  return read_table(in, path.string());
}

void write_table(std::ostream& out, const Table& table) {
  auto write_row = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (fields[i].find_first_of("\t\n\r") != std::string::npos) {
        throw DataError("write_table: field contains a tab or newline: '" + fields[i] + "'");
      }
      if (i) out << '\t';
      out << fields[i];
    }
    out << '\n';
  };
  write_row(table.header);
  for (const auto& r : table.rows) {
    if (r.size() != table.header.size()) throw DataError("write_table: ragged row");
    write_row(r);
  }
}

void write_table(const std::filesystem::path& path, const Table& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  write_table(out, table);
  if (!out) throw DataError(path.string() + ": write failed");
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw DataError("format_double: conversion failed");
  return std::string(buf, ptr);
}

double parse_double(const Table& t, std::size_t row, std::size_t col) {
  const std::string& s = t.rows[row][col];
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && s[0] == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (s.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    t.fail(row, "column '" + t.header[col] + "': '" + s + "' is not a finite number");
  }
  return v;
}

std::size_t parse_count(const Table& t, std::size_t row, std::size_t col) {
  const std::string& s = t.rows[row][col];
  unsigned long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    t.fail(row, "column '" + t.header[col] + "': '" + s + "' is not a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

// ---------------------------------------------------------------------------

std::vector<EvalTuple> parse_eval_tuples(const Table& t) {
  require_header(t, kEvalHeader);
  std::vector<EvalTuple> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    out.push_back({nonempty(t, i, 0), nonempty(t, i, 1), nonempty(t, i, 2), parse_double(t, i, 3)});
  }
  return out;
}

Table eval_tuples_table(std::span<const EvalTuple> tuples) {
  Table t;
  t.header = kEvalHeader;
  for (const auto& e : tuples) {
    t.rows.push_back({e.source, e.hypothesis, e.reference, format_double(e.score)});
  }
  return t;
}

std::vector<PostEditTuple> parse_post_edits(const Table& t) {
  require_header(t, kPostEditHeader);
  std::vector<PostEditTuple> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    out.push_back({nonempty(t, i, 0), nonempty(t, i, 1), nonempty(t, i, 2), nonempty(t, i, 3)});
  }
  return out;
}

Table post_edits_table(std::span<const PostEditTuple> tuples) {
  Table t;
  t.header = kPostEditHeader;
  for (const auto& e : tuples) t.rows.push_back({e.source, e.hypothesis, e.reference, e.post_edit});
  return t;
}

std::vector<DASegment> parse_da(const Table& t) {
  require_header(t, kDaHeader);
  std::vector<DASegment> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    for (std::size_t c = 0; c < 3; ++c)
      if (r[c].empty()) t.fail(i, "column '" + t.header[c] + "' is empty");
    out.push_back({r[0], r[1], r[2], nonempty(t, i, 3), nonempty(t, i, 4), nonempty(t, i, 5),
                   parse_double(t, i, 6)});
  }
  return out;
}

Table da_table(std::span<const DASegment> segments) {
  Table t;
  t.header = kDaHeader;
  for (const auto& s : segments) {
    t.rows.push_back({s.lang_pair, s.segment_id, s.system, s.source, s.hypothesis, s.reference,
                      format_double(s.da)});
  }
  return t;
}

std::vector<DarrPair> parse_darr(const Table& t) {
  require_header(t, kDarrHeader);
  std::vector<DarrPair> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    for (std::size_t c = 0; c < 4; ++c)
      if (r[c].empty()) t.fail(i, "column '" + t.header[c] + "' is empty");
    out.push_back({r[0], r[1], r[2], r[3],
                   {nonempty(t, i, 4), nonempty(t, i, 5), nonempty(t, i, 6), nonempty(t, i, 7)}});
  }
  return out;
}

Table darr_table(std::span<const DarrPair> pairs) {
  Table t;
  t.header = kDarrHeader;
  for (const auto& p : pairs) {
    t.rows.push_back({p.lang_pair, p.segment_id, p.system_better, p.system_worse, p.quad.source,
                      p.quad.better, p.quad.worse, p.quad.reference});
  }
  return t;
}

std::vector<MqmRow> parse_mqm(const Table& t) {
  std::vector<std::string> with_length = kMqmHeader;
  with_length.push_back("length");
  const bool has_length = t.header == with_length;
  if (!has_length) require_header(t, kMqmHeader);
  std::vector<MqmRow> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    MqmRow row;
    row.source = nonempty(t, i, 0);
    row.hypothesis = nonempty(t, i, 1);
    row.reference = nonempty(t, i, 2);
    row.annotation.minor = parse_count(t, i, 3);
    row.annotation.major = parse_count(t, i, 4);
    row.annotation.critical = parse_count(t, i, 5);
    if (has_length) {
      row.annotation.sentence_length = parse_count(t, i, 6);
      if (row.annotation.sentence_length == 0) t.fail(i, "length must be at least 1");
      row.explicit_length = true;
    } else {
      row.annotation.sentence_length = split_words(row.hypothesis).size();
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<ScoringTriple> parse_scoring_input(const Table& t) {
  const std::vector<std::string> bare{"src", "hyp", "ref"};
  if (t.header != bare && t.header != kEvalHeader) {
    throw DataError(t.source + ":1: expected header [src, hyp, ref] or [src, hyp, ref, score]");
  }
  std::vector<ScoringTriple> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (t.header.size() == 4) parse_double(t, i, 3);
    out.push_back({nonempty(t, i, 0), nonempty(t, i, 1), nonempty(t, i, 2)});
  }
  return out;
}

Table append_metric_column(const Table& input, std::span<const double> scores) {
  if (scores.size() != input.rows.size()) {
    throw ContractError("append_metric_column: row count mismatch");
  }
  Table t;
  t.header = input.header;
  t.header.emplace_back(kMetricColumn);
  t.rows = input.rows;
  for (std::size_t i = 0; i < t.rows.size(); ++i) t.rows[i].push_back(format_double(scores[i]));
  return t;
}

ScoreLookup parse_scores(const Table& t) {
  const std::size_t src = t.column("src");
  const std::size_t hyp = t.column("hyp");
  const std::size_t ref = t.column("ref");
  const std::size_t metric = t.column(kMetricColumn);
  ScoreLookup out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    out.keys.push_back({nonempty(t, i, src), nonempty(t, i, hyp), nonempty(t, i, ref)});
    out.scores.push_back(parse_double(t, i, metric));
  }
  return out;
}

EvalReport parse_report(const Table& t) {
  require_header(t, kReportHeader);
  EvalReport report;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    report.rows.push_back({r[0], r[1], parse_count(t, i, 2), parse_count(t, i, 3),
                           parse_double(t, i, 4)});
  }
  return report;
}

Table report_table(const EvalReport& report) {
  Table t;
  t.header = kReportHeader;
  for (const auto& r : report.rows) {
    t.rows.push_back({r.lang_pair, r.subset, std::to_string(r.concordant),
                      std::to_string(r.discordant), format_double(r.tau)});
  }
  return t;
}

Table ablation_table(std::span<const AblationRow> rows) {
  Table t;
  t.header = kAblationHeader;
  for (const auto& r : rows) {
    const std::string delta = format_double(r.delta_tau);
    t.rows.push_back({r.lang_pair, "all", "ref-only", std::to_string(r.reference_only.concordant),
                      std::to_string(r.reference_only.discordant),
                      format_double(r.reference_only.tau), delta});
    t.rows.push_back({r.lang_pair, "all", "src+ref", std::to_string(r.full.concordant),
                      std::to_string(r.full.discordant), format_double(r.full.tau), delta});
  }
  return t;
}

std::vector<AblationRow> parse_ablation(const Table& t) {
  require_header(t, kAblationHeader);
  if (t.rows.size() % 2 != 0) throw DataError(t.source + ": ablation rows must come in pairs");
  std::vector<AblationRow> out;
  for (std::size_t i = 0; i < t.rows.size(); i += 2) {
    const auto& a = t.rows[i];
    const auto& b = t.rows[i + 1];
    if (a[2] != "ref-only" || b[2] != "src+ref" || a[0] != b[0]) {
      t.fail(i, "expected a ref-only row followed by a src+ref row for the same language pair");
    }
    AblationRow row;
    row.lang_pair = a[0];
    row.reference_only = {parse_count(t, i, 3), parse_count(t, i, 4), parse_double(t, i, 5)};
    row.full = {parse_count(t, i + 1, 3), parse_count(t, i + 1, 4), parse_double(t, i + 1, 5)};
    row.delta_tau = parse_double(t, i + 1, 6);
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace mtscore::io

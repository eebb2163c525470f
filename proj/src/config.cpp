#include "mtscore/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

#include "mtscore/error.hpp"
#include "mtscore/tsv.hpp"

namespace mtscore {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* what) {
  throw DataError("config: " + std::string(key) + " = '" + std::string(value) + "': " + what);
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    bad_value(key, v, "expected a number");
  }
  return out;
}

std::uint64_t to_uint(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    bad_value(key, v, "expected a non-negative integer");
  }
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad_value(key, v, "expected true or false");
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

}  // namespace

RunConfig::RunConfig(const EstimatorConfig& e) : estimator_(e) {
  ranker_.encoder = e.encoder;
  ranker_.layer_dropout = e.layer_dropout;
  ranker_.epochs = e.epochs;
  ranker_.batch_size = e.batch_size;
  ranker_.seed = e.seed;
}

RunConfig::RunConfig(const RankerConfig& r) : ranker_(r) {
  estimator_.encoder = r.encoder;
  estimator_.layer_dropout = r.layer_dropout;
  estimator_.epochs = r.epochs;
  estimator_.batch_size = r.batch_size;
  estimator_.seed = r.seed;
}

void RunConfig::set(std::string_view key, std::string_view value) {
  auto& e = estimator_;
  auto& r = ranker_;
  if (key == "seed") {
    e.seed = r.seed = to_uint(key, value);
  } else if (key == "encoder.kind") {
    EncoderKind k;
    if (value == "transformer") {
      k = EncoderKind::kTransformer;
    } else if (value == "hashed") {
      k = EncoderKind::kHashed;
    } else {
      bad_value(key, value, "expected transformer or hashed");
    }
    e.encoder.kind = r.encoder.kind = k;
  } else if (key == "encoder.vocab_size") {
    const auto v = to_uint(key, value);
    if (v < 3 || v > 0xffffffffULL) bad_value(key, value, "must be in [3, 2^32)");
    e.encoder.vocab_size = r.encoder.vocab_size = static_cast<std::uint32_t>(v);
  } else if (key == "encoder.dim") {
    e.encoder.dim = r.encoder.dim = to_uint(key, value);
  } else if (key == "encoder.layers") {
    e.encoder.layers = r.encoder.layers = to_uint(key, value);
  } else if (key == "encoder.heads") {
    e.encoder.heads = r.encoder.heads = to_uint(key, value);
  } else if (key == "encoder.ff_dim") {
    e.encoder.ff_dim = r.encoder.ff_dim = to_uint(key, value);
  } else if (key == "encoder.dropout") {
    e.encoder.dropout = r.encoder.dropout = to_double(key, value);
  } else if (key == "pooling.layer_dropout") {
    e.layer_dropout = r.layer_dropout = to_double(key, value);
  } else if (key == "train.epochs") {
    e.epochs = r.epochs = to_uint(key, value);
  } else if (key == "train.batch_size") {
    const auto v = to_uint(key, value);
    if (v == 0) bad_value(key, value, "must be positive");
    e.batch_size = r.batch_size = v;
  } else if (key == "train.optimizer") {
    if (value != "adam") bad_value(key, value, "only adam is supported");
  } else if (key == "estimator.hidden_units") {
    if (value == "auto") {
      e.hidden1 = e.hidden2 = 0;
    } else {
      const auto comma = value.find(',');
      if (comma == std::string_view::npos) bad_value(key, value, "expected auto or W1,W2");
      const auto h1 = to_uint(key, trim(value.substr(0, comma)));
      const auto h2 = to_uint(key, trim(value.substr(comma + 1)));
      if (h1 == 0 || h2 == 0) bad_value(key, value, "widths must be positive");
      e.hidden1 = h1;
      e.hidden2 = h2;
    }
  } else if (key == "estimator.activation") {
    if (value != "tanh") bad_value(key, value, "only tanh is supported");
  } else if (key == "estimator.dropout") {
    e.dropout = to_double(key, value);
  } else if (key == "estimator.include_source") {
    e.include_source = to_bool(key, value);
  } else if (key == "estimator.frozen_epochs") {
    e.frozen_epochs = to_uint(key, value);
  } else if (key == "estimator.lr_head") {
    e.lr_head = to_double(key, value);
  } else if (key == "estimator.lr_encoder") {
    e.lr_encoder = to_double(key, value);
  } else if (key == "ranker.margin") {
    r.margin = to_double(key, value);
  } else if (key == "ranker.reference_only") {
    r.reference_only = to_bool(key, value);
  } else if (key == "ranker.lr") {
    r.learning_rate = to_double(key, value);
  } else {
    throw DataError("config: unknown key '" + std::string(key) + "'");
  }
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  using io::format_double;
  const auto& e = estimator_;
  const auto& r = ranker_;
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("seed", std::to_string(e.seed));
  out.emplace_back("encoder.kind",
                   e.encoder.kind == EncoderKind::kTransformer ? "transformer" : "hashed");
  out.emplace_back("encoder.vocab_size", std::to_string(e.encoder.vocab_size));
  out.emplace_back("encoder.dim", std::to_string(e.encoder.dim));
  out.emplace_back("encoder.layers", std::to_string(e.encoder.layers));
  out.emplace_back("encoder.heads", std::to_string(e.encoder.heads));
  out.emplace_back("encoder.ff_dim", std::to_string(e.encoder.ff_dim));
  out.emplace_back("encoder.dropout", format_double(e.encoder.dropout));
  out.emplace_back("pooling.layer_dropout", format_double(e.layer_dropout));
  out.emplace_back("train.epochs", std::to_string(e.epochs));
  out.emplace_back("train.batch_size", std::to_string(e.batch_size));
  out.emplace_back("train.optimizer", "adam");
  out.emplace_back("estimator.hidden_units",
                   e.hidden1 == 0 && e.hidden2 == 0
                       ? std::string("auto")
                       : std::to_string(e.hidden1) + "," + std::to_string(e.hidden2));
  out.emplace_back("estimator.activation", "tanh");
  out.emplace_back("estimator.dropout", format_double(e.dropout));
  out.emplace_back("estimator.include_source", bool_str(e.include_source));
  out.emplace_back("estimator.frozen_epochs", std::to_string(e.frozen_epochs));
  out.emplace_back("estimator.lr_head", format_double(e.lr_head));
  out.emplace_back("estimator.lr_encoder", format_double(e.lr_encoder));
  out.emplace_back("ranker.margin", format_double(r.margin));
  out.emplace_back("ranker.reference_only", bool_str(r.reference_only));
  out.emplace_back("ranker.lr", format_double(r.learning_rate));
  return out;
}

RunConfig RunConfig::parse(std::istream& in, const std::string& source) {
  RunConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw DataError(source + ":" + std::to_string(lineno) + ": expected key = value");
    }
    try {
      cfg.set(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    } catch (const DataError& err) {
      throw DataError(source + ":" + std::to_string(lineno) + ": " + err.what());
    }
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": cannot open config");
  return parse(in, path.string());
}

}  // namespace mtscore

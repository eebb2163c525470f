#include "mtscore/checkpoint.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mtscore/error.hpp"

namespace mtscore {

namespace {

constexpr const char* kMagic = "mtscore-checkpoint";

void put_doubles(std::ostream& out, std::span<const double> xs) {
  std::string buf(xs.size() * 8, '\0');
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(xs[i]);
    for (int b = 0; b < 8; ++b) {
      buf[i * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void get_doubles(std::istream& in, std::span<double> xs, const std::string& source) {
  std::string buf(xs.size() * 8, '\0');
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
    throw DataError(source + ": truncated parameter data");
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i * 8 + b])) << (8 * b);
    }
    xs[i] = std::bit_cast<double>(bits);
    if (!std::isfinite(xs[i])) throw DataError(source + ": non-finite value in parameter data");
  }
}

void write_all(std::ostream& out, const char* kind, const RunConfig& cfg,
               const std::vector<NamedParam>& params, const Adam& adam) {
  out << kMagic << ' ' << kCheckpointVersion << '\n';
  out << "kind " << kind << '\n';
  for (const auto& [k, v] : cfg.entries()) out << "config " << k << ' ' << v << '\n';
  for (const auto& p : params) {
    const AdamSlot* s = adam.find_slot(p.tensor);
    out << "param " << p.name << ' ' << p.tensor.rows() << ' ' << p.tensor.cols() << ' '
        << (s ? s->t : 0) << '\n';
  }
  out << "data\n";
  for (const auto& p : params) {
    put_doubles(out, p.tensor.value().data());
    const AdamSlot* s = adam.find_slot(p.tensor);
    if (s) {
      put_doubles(out, s->m.data());
      put_doubles(out, s->v.data());
    } else {
      const std::vector<double> zeros(p.tensor.size(), 0.0);
      put_doubles(out, zeros);
      put_doubles(out, zeros);
    }
  }
  if (!out) throw DataError("checkpoint: write failed");
}

struct ParamHeader {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::uint64_t t = 0;
};

void restore(std::istream& in, const std::string& source, const std::vector<ParamHeader>& hdr,
             const std::vector<NamedParam>& params, Adam& adam) {
  if (hdr.size() != params.size()) {
    throw DataError(source + ": checkpoint has " + std::to_string(hdr.size()) +
                    " parameters, model expects " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& h = hdr[i];
    auto t = params[i].tensor;
    if (h.name != params[i].name || h.rows != t.rows() || h.cols != t.cols()) {
      throw DataError(source + ": parameter " + std::to_string(i) + " is " + h.name + " " +
                      std::to_string(h.rows) + "x" + std::to_string(h.cols) +
                      ", model expects " + params[i].name + " " +
                      t.value().shape_string());
    }
    get_doubles(in, t.mutable_value().data(), source);
    ad::Matrix m(h.rows, h.cols), v(h.rows, h.cols);
    get_doubles(in, m.data(), source);
    get_doubles(in, v.data(), source);
    if (h.t > 0) {
      AdamSlot& s = adam.slot(t);
      s.t = h.t;
      s.m = std::move(m);
      s.v = std::move(v);
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw DataError(source + ": trailing bytes after parameter data");
  }
}

}  // namespace

void save_checkpoint(std::ostream& out, const EstimatorModel& model) {
  write_all(out, "estimator", RunConfig(model.config()), model.parameters(), model.optimizer());
}

void save_checkpoint(std::ostream& out, const RankerModel& model) {
  write_all(out, "ranker", RunConfig(model.config()), model.parameters(), model.optimizer());
}

template <typename M>
static void save_to_path(const std::filesystem::path& path, const M& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  save_checkpoint(out, model);
}

void save_checkpoint(const std::filesystem::path& path, const EstimatorModel& model) {
  save_to_path(path, model);
}

void save_checkpoint(const std::filesystem::path& path, const RankerModel& model) {
  save_to_path(path, model);
}

LoadedModel load_checkpoint(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": empty checkpoint");
  {
    std::istringstream ls(line);
    std::string magic;
    int version = 0;
    if (!(ls >> magic >> version) || magic != kMagic) {
      throw DataError(source + ": not a checkpoint file");
    }
    if (version != kCheckpointVersion) {
      throw DataError(source + ": unsupported checkpoint version " + std::to_string(version));
    }
  }
  std::string kind;
  RunConfig cfg;
  std::vector<ParamHeader> hdr;
  bool saw_data = false;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    if (line == "data") {
      saw_data = true;
      break;
    }
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "kind") {
      ls >> kind;
    } else if (tag == "config") {
      std::string key, value;
      ls >> key;
      std::getline(ls >> std::ws, value);
      try {
        cfg.set(key, value);
      } catch (const DataError& e) {
        throw DataError(where + e.what());
      }
    } else if (tag == "param") {
      ParamHeader h;
      if (!(ls >> h.name >> h.rows >> h.cols >> h.t)) throw DataError(where + "bad param line");
      hdr.push_back(std::move(h));
    } else {
      throw DataError(where + "unexpected header line");
    }
  }
  if (!saw_data) throw DataError(source + ": missing data section");

  if (kind == "estimator") {
    auto model = std::make_unique<EstimatorModel>(cfg.estimator());
    restore(in, source, hdr, model->parameters(), model->optimizer());
    return model;
  }
  if (kind == "ranker") {
    auto model = std::make_unique<RankerModel>(cfg.ranker());
    restore(in, source, hdr, model->parameters(), model->optimizer());
    return model;
  }
  throw DataError(source + ": unknown model kind '" + kind + "'");
}

LoadedModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open checkpoint");
  return load_checkpoint(in, path.string());
}

ModelKind kind_of(const LoadedModel& m) {
  return std::holds_alternative<std::unique_ptr<EstimatorModel>>(m) ? ModelKind::kEstimator
                                                                      : ModelKind::kRanker;
}

}  // namespace mtscore

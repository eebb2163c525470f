#include "mtscore/encoder.hpp"

#include <cmath>

#include "mtscore/error.hpp"

namespace mtscore {

void EncoderConfig::validate() const {
  if (vocab_size < 3) throw ContractError("encoder: vocab_size must be at least 3");
  if (dim == 0) throw ContractError("encoder: dim must be positive");
  if (layers < 1) throw ContractError("encoder: layers must be at least 1");
  if (kind == EncoderKind::kTransformer) {
    if (heads == 0 || dim % heads != 0) {
      throw ContractError("encoder: dim " + std::to_string(dim) +
                          " not divisible by heads " + std::to_string(heads));
    }
    if (ff_dim == 0) throw ContractError("encoder: ff_dim must be positive");
  }
  if (dropout < 0.0 || dropout >= 1.0) throw ContractError("encoder: dropout must be in [0, 1)");
}

ad::Matrix sinusoidal_positions(std::size_t n, std::size_t d) {
  ad::Matrix pe(n, d);
  for (std::size_t pos = 0; pos < n; ++pos) {
    for (std::size_t i = 0; i < d; ++i) {
      const double exponent = static_cast<double>(2 * (i / 2)) / static_cast<double>(d);
      const double angle = static_cast<double>(pos) / std::pow(10000.0, exponent);
      pe(pos, i) = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
  }
  return pe;
}

namespace {

ad::Tensor normal_param(Rng& rng, std::size_t rows, std::size_t cols, double stddev) {
  ad::Matrix m(rows, cols);
  for (auto& v : m.data()) v = rng.normal(0.0, stddev);
  return ad::Tensor::parameter(std::move(m));
}

ad::Tensor const_param(std::size_t rows, std::size_t cols, double value) {
  return ad::Tensor::parameter(ad::Matrix(rows, cols, value));
}

ad::Tensor linear(const ad::Tensor& x, const ad::Tensor& w, const ad::Tensor& b) {
  return ad::add_bias(ad::matmul(x, w), b);
}

ad::Tensor maybe_dropout(const ad::Tensor& x, double p, Mode mode, Rng* rng) {
  if (mode != Mode::kTrain || p == 0.0 || rng == nullptr) return x;
  return ad::dropout(x, p, *rng);
}

}  // namespace

// ---------------------------------------------------------------------------
// TransformerEncoder

TransformerEncoder::TransformerEncoder(const EncoderConfig& config, std::uint64_t seed)
    : Encoder(config) {
  config.validate();
  Rng rng(seed, "init.encoder");
  const std::size_t d = config.dim;
  const double wd = 1.0 / std::sqrt(static_cast<double>(d));
  const double wf = 1.0 / std::sqrt(static_cast<double>(config.ff_dim));
  embedding_ = normal_param(rng, config.vocab_size, d, 1.0);
  blocks_.reserve(config.layers);
  for (std::size_t l = 0; l < config.layers; ++l) {
    Block b;
    b.ln1_gain = const_param(1, d, 1.0);
    b.ln1_bias = const_param(1, d, 0.0);
    b.wq = normal_param(rng, d, d, wd);
    b.bq = const_param(1, d, 0.0);
    b.wk = normal_param(rng, d, d, wd);
    b.bk = const_param(1, d, 0.0);
    b.wv = normal_param(rng, d, d, wd);
    b.bv = const_param(1, d, 0.0);
    b.wo = normal_param(rng, d, d, wd);
    b.bo = const_param(1, d, 0.0);
    b.ln2_gain = const_param(1, d, 1.0);
    b.ln2_bias = const_param(1, d, 0.0);
    b.w1 = normal_param(rng, d, config.ff_dim, wd);
    b.b1 = const_param(1, config.ff_dim, 0.0);
    b.w2 = normal_param(rng, config.ff_dim, d, wf);
    b.b2 = const_param(1, d, 0.0);
    blocks_.push_back(std::move(b));
  }
}

ad::Tensor TransformerEncoder::attention(const Block& b, const ad::Tensor& x) const {
  const std::size_t heads = config().heads;
  const std::size_t dh = config().dim / heads;
  const ad::Tensor q = linear(x, b.wq, b.bq);
  const ad::Tensor k = linear(x, b.wk, b.bk);
  const ad::Tensor v = linear(x, b.wv, b.bv);
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<ad::Tensor> outs;
  outs.reserve(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    const ad::Tensor qh = ad::slice_cols(q, h * dh, dh);
    const ad::Tensor kh = ad::slice_cols(k, h * dh, dh);
    const ad::Tensor vh = ad::slice_cols(v, h * dh, dh);
    const ad::Tensor scores = ad::scale(ad::matmul(qh, ad::transpose(kh)), inv_sqrt);
    outs.push_back(ad::matmul(ad::softmax_rows(scores), vh));
  }
  return linear(ad::concat(outs), b.wo, b.bo);
}

LayerStack TransformerEncoder::encode(const TokenSeq& seq, Mode mode, Rng* dropout_rng) const {
  if (seq.ids.empty()) throw ContractError("encode: empty token sequence");
  const double p = config().dropout;
  const ad::Tensor pos =
      ad::Tensor::constant(sinusoidal_positions(seq.size(), config().dim));
  LayerStack stack;
  stack.reserve(blocks_.size() + 1);
  ad::Tensor x = ad::add(ad::gather_rows(embedding_, seq.ids), pos);
  stack.push_back(x);
  for (const Block& b : blocks_) {
    const ad::Tensor a = attention(b, ad::layer_norm(x, b.ln1_gain, b.ln1_bias));
    x = ad::add(x, maybe_dropout(a, p, mode, dropout_rng));
    const ad::Tensor hidden =
        ad::relu(linear(ad::layer_norm(x, b.ln2_gain, b.ln2_bias), b.w1, b.b1));
    x = ad::add(x, maybe_dropout(linear(hidden, b.w2, b.b2), p, mode, dropout_rng));
    stack.push_back(x);
  }
  return stack;
}

std::vector<NamedParam> TransformerEncoder::parameters() const {
  std::vector<NamedParam> out;
  out.push_back({"encoder.embedding", embedding_});
  for (std::size_t l = 0; l < blocks_.size(); ++l) {
    const Block& b = blocks_[l];
    const std::string pre = "encoder.block" + std::to_string(l) + ".";
    out.push_back({pre + "ln1_gain", b.ln1_gain});
    out.push_back({pre + "ln1_bias", b.ln1_bias});
    out.push_back({pre + "wq", b.wq});
    out.push_back({pre + "bq", b.bq});
    out.push_back({pre + "wk", b.wk});
    out.push_back({pre + "bk", b.bk});
    out.push_back({pre + "wv", b.wv});
    out.push_back({pre + "bv", b.bv});
    out.push_back({pre + "wo", b.wo});
    out.push_back({pre + "bo", b.bo});
    out.push_back({pre + "ln2_gain", b.ln2_gain});
    out.push_back({pre + "ln2_bias", b.ln2_bias});
    out.push_back({pre + "w1", b.w1});
    out.push_back({pre + "b1", b.b1});
    out.push_back({pre + "w2", b.w2});
    out.push_back({pre + "b2", b.b2});
  }
  return out;
}

// ---------------------------------------------------------------------------
// HashedEncoder

HashedEncoder::HashedEncoder(const EncoderConfig& config, std::uint64_t seed)
    : Encoder(config), table_(config.vocab_size, config.dim) {
  config.validate();
  Rng rng(seed, "init.hashed");
  for (auto& v : table_.data()) v = rng.normal();
}

LayerStack HashedEncoder::encode(const TokenSeq& seq, Mode, Rng*) const {
  if (seq.ids.empty()) throw ContractError("encode: empty token sequence");
  ad::Matrix m(seq.size(), width());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq.ids[i] >= table_.rows()) throw DimensionError("encode: token id out of vocabulary");
    for (std::size_t j = 0; j < width(); ++j) m(i, j) = table_(seq.ids[i], j);
  }
  const ad::Tensor layer0 = ad::Tensor::constant(std::move(m));
  return LayerStack(num_layers(), layer0);
}

std::unique_ptr<Encoder> make_encoder(const EncoderConfig& config, std::uint64_t seed) {
  switch (config.kind) {
    case EncoderKind::kTransformer:
      return std::make_unique<TransformerEncoder>(config, seed);
    case EncoderKind::kHashed:
      return std::make_unique<HashedEncoder>(config, seed);
  }
  throw ContractError("make_encoder: unknown encoder kind");
}

}  // namespace mtscore

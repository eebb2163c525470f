#ifndef MTSCORE_ENCODER_HPP_
#define MTSCORE_ENCODER_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mtscore/autodiff.hpp"
#include "mtscore/rng.hpp"
#include "mtscore/text.hpp"

namespace mtscore {

enum class Mode { kTrain, kEval };

// One n×d matrix per encoder layer; index 0 is the embedding layer.
using LayerStack = std::vector<ad::Tensor>;

struct NamedParam {
  std::string name;
  ad::Tensor tensor;
};

enum class EncoderKind { kTransformer, kHashed };

struct EncoderConfig {
  EncoderKind kind = EncoderKind::kTransformer;
  std::uint32_t vocab_size = 4096;  // hash buckets, sentinels included
  std::size_t dim = 32;
  std::size_t layers = 4;           // transformer depth k
  std::size_t heads = 4;
  std::size_t ff_dim = 64;
  double dropout = 0.1;

  // Throws ContractError on inconsistent settings.
  void validate() const;
};

// Multi-layer encoder producing an embedding per token per layer.
class Encoder {
 public:
  explicit Encoder(EncoderConfig config) : config_(std::move(config)) {}
  virtual ~Encoder() = default;
  Encoder(const Encoder&) = delete;
  Encoder& operator=(const Encoder&) = delete;

  // Returns depth()+1 matrices of shape seq.size()×width(). `dropout_rng` is
  // only drawn from in train mode.
  virtual LayerStack encode(const TokenSeq& seq, Mode mode, Rng* dropout_rng) const = 0;
  virtual std::vector<NamedParam> parameters() const = 0;

  const EncoderConfig& config() const { return config_; }
  std::size_t width() const { return config_.dim; }
  std::size_t depth() const { return config_.layers; }
  std::size_t num_layers() const { return config_.layers + 1; }
  TokenSeq tokenize(std::string_view text) const {
    return mtscore::tokenize(text, config_.vocab_size);
  }

 private:
  EncoderConfig config_;
};

// Pre-norm transformer: layer 0 is token embedding plus sinusoidal position
// encoding, layer l is the output of block l.
class TransformerEncoder final : public Encoder {
 public:
  TransformerEncoder(const EncoderConfig& config, std::uint64_t seed);

  LayerStack encode(const TokenSeq& seq, Mode mode, Rng* dropout_rng) const override;
  std::vector<NamedParam> parameters() const override;

 private:
  struct Block {
    ad::Tensor ln1_gain, ln1_bias;
    ad::Tensor wq, bq, wk, bk, wv, bv, wo, bo;
    ad::Tensor ln2_gain, ln2_bias;
    ad::Tensor w1, b1, w2, b2;
  };

  ad::Tensor attention(const Block& b, const ad::Tensor& x) const;

  ad::Tensor embedding_;
  std::vector<Block> blocks_;
};

// Fixed random embedding per token id, repeated for every layer. No
// trainable parameters.
class HashedEncoder final : public Encoder {
 public:
  HashedEncoder(const EncoderConfig& config, std::uint64_t seed);

  LayerStack encode(const TokenSeq& seq, Mode mode, Rng* dropout_rng) const override;
  std::vector<NamedParam> parameters() const override { return {}; }

 private:
  ad::Matrix table_;
};

std::unique_ptr<Encoder> make_encoder(const EncoderConfig& config, std::uint64_t seed);

// Sinusoidal position encoding, n×d.
ad::Matrix sinusoidal_positions(std::size_t n, std::size_t d);

}  // namespace mtscore

#endif  // MTSCORE_ENCODER_HPP_

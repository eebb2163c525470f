#ifndef MTSCORE_POOLING_HPP_
#define MTSCORE_POOLING_HPP_

#include <memory>
#include <string_view>
#include <vector>

#include "mtscore/autodiff.hpp"
#include "mtscore/encoder.hpp"
#include "mtscore/rng.hpp"

namespace mtscore {

// Learned softmax mixture over encoder layers, scaled by mu, with layer
// dropout during training.
class LayerAttention {
 public:
  // alpha starts at zero (uniform mixture) and mu at one.
  LayerAttention(std::size_t num_layers, double dropout_p);

  std::size_t num_layers() const { return alpha_.size(); }
  double dropout_p() const { return dropout_p_; }
  const ad::Tensor& alpha() const { return alpha_; }
  const ad::Tensor& mu() const { return mu_; }
  ad::Tensor& alpha() { return alpha_; }
  ad::Tensor& mu() { return mu_; }

  // Per-layer keep mask for one training draw. Each layer is dropped with
  // probability p; a draw that drops every layer is rejected and redrawn.
  std::vector<bool> draw_mask(Rng& rng) const;

  // n×d mixture mu · sum_l softmax(alpha)_l · layer_l. Layer dropout applies
  // only in train mode with a non-null rng.
  ad::Tensor pool(const LayerStack& stack, Mode mode, Rng* rng) const;

 private:
  ad::Tensor alpha_;
  ad::Tensor mu_;
  double dropout_p_;
};

ad::Tensor pool_layers(const LayerStack& stack, const LayerAttention& att, Mode mode,
                       Rng* rng);

enum class Segment { kSource, kHypothesis, kReference };

struct SentenceEmbedding {
  Segment segment;
  ad::Tensor vector;  // 1×d
};

// Column-wise mean over all token rows (sentinels included).
ad::Tensor average_pool(const ad::Tensor& tokens);

// Encoder followed by layer attention and average pooling; the shared
// embedding path of both model kinds.
class PooledEncoder {
 public:
  PooledEncoder(const EncoderConfig& config, double layer_dropout, std::uint64_t seed);

  SentenceEmbedding embed(std::string_view text, Segment segment, Mode mode,
                          Rng* rng) const;

  const Encoder& encoder() const { return *encoder_; }
  const LayerAttention& attention() const { return attention_; }
  LayerAttention& attention() { return attention_; }
  std::size_t width() const { return encoder_->width(); }

  // Encoder parameters followed by alpha and mu.
  std::vector<NamedParam> parameters() const;

 private:
  std::unique_ptr<Encoder> encoder_;
  LayerAttention attention_;
};

}  // namespace mtscore

#endif  // MTSCORE_POOLING_HPP_

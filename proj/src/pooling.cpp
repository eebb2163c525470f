#include "mtscore/pooling.hpp"

#include <algorithm>

#include "mtscore/error.hpp"

namespace mtscore {

LayerAttention::LayerAttention(std::size_t num_layers, double dropout_p)
    : alpha_(ad::Tensor::parameter(ad::Matrix(1, num_layers, 0.0))),
      mu_(ad::Tensor::parameter(ad::Matrix(1, 1, 1.0))),
      dropout_p_(dropout_p) {
  if (num_layers == 0) throw ContractError("LayerAttention: no layers");
  if (dropout_p < 0.0 || dropout_p >= 1.0) {
    throw ContractError("LayerAttention: dropout must be in [0, 1)");
  }
}

std::vector<bool> LayerAttention::draw_mask(Rng& rng) const {
  std::vector<bool> keep(num_layers());
  do {
    for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = !rng.bernoulli(dropout_p_);
  } while (std::none_of(keep.begin(), keep.end(), [](bool k) { return k; }));
  return keep;
}

ad::Tensor LayerAttention::pool(const LayerStack& stack, Mode mode, Rng* rng) const {
  if (stack.size() != num_layers()) {
    throw DimensionError("pool_layers: " + std::to_string(stack.size()) + " layers but alpha has " +
                         std::to_string(num_layers()) + " entries");
  }
  ad::Tensor weights;
  if (mode == Mode::kTrain && dropout_p_ > 0.0 && rng != nullptr) {
    const std::vector<bool> keep = draw_mask(*rng);
    const std::unique_ptr<bool[]> flags(new bool[keep.size()]);
    std::copy(keep.begin(), keep.end(), flags.get());
    weights = ad::softmax(alpha_, std::span<const bool>(flags.get(), keep.size()));
  } else {
    weights = ad::softmax(alpha_);
  }
  ad::Tensor mixed = ad::scale_by(stack[0], ad::select(weights, 0));
  for (std::size_t l = 1; l < stack.size(); ++l) {
    mixed = ad::add(mixed, ad::scale_by(stack[l], ad::select(weights, l)));
  }
  return ad::scale_by(mixed, mu_);
}

ad::Tensor pool_layers(const LayerStack& stack, const LayerAttention& att, Mode mode,
                       Rng* rng) {
  return att.pool(stack, mode, rng);
}

ad::Tensor average_pool(const ad::Tensor& tokens) { return ad::mean_rows(tokens); }

PooledEncoder::PooledEncoder(const EncoderConfig& config, double layer_dropout,
                             std::uint64_t seed)
    : encoder_(make_encoder(config, seed)),
      attention_(encoder_->num_layers(), layer_dropout) {}

SentenceEmbedding PooledEncoder::embed(std::string_view text, Segment segment, Mode mode,
                                       Rng* rng) const {
  const TokenSeq seq = encoder_->tokenize(text);
  const LayerStack stack = encoder_->encode(seq, mode, rng);
  return {segment, average_pool(attention_.pool(stack, mode, rng))};
}

std::vector<NamedParam> PooledEncoder::parameters() const {
  std::vector<NamedParam> out = encoder_->parameters();
  out.push_back({"pooling.alpha", attention_.alpha()});
  out.push_back({"pooling.mu", attention_.mu()});
  return out;
}

}  // namespace mtscore

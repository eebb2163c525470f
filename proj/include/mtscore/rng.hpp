#ifndef MTSCORE_RNG_HPP_
#define MTSCORE_RNG_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace mtscore {

inline constexpr std::uint64_t kDefaultSeed = 3;

// Derives an independent stream seed from a root seed and a stream label.
// Streams are keyed by name, so adding a new component never shifts the
// values drawn by an existing one.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream);

// Deterministic generator. Only the raw mt19937_64 output is used; the
// distributions are implemented here because the standard library leaves
// their algorithms unspecified.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t root, std::string_view stream)
      : engine_(derive_seed(root, stream)) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Standard normal (Box-Muller, one value per call).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mtscore

#endif  // MTSCORE_RNG_HPP_

#ifndef MTSCORE_TEXT_HPP_
#define MTSCORE_TEXT_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mtscore {

// Lowercases ASCII letters and splits on whitespace; every ASCII punctuation
// character becomes its own word. Bytes >= 0x80 are kept inside words, so
// UTF-8 text passes through unchanged.
std::vector<std::string> split_words(std::string_view text);

inline constexpr std::uint32_t kBosId = 0;
inline constexpr std::uint32_t kEosId = 1;

struct TokenSeq {
  std::vector<std::uint32_t> ids;  // begin sentinel, words..., end sentinel
  std::string surface;

  std::size_t size() const { return ids.size(); }
};

// Word id in [2, vocab_size) from a fixed FNV-1a hash with a multiplicative
// finalizer; ids 0 and 1 are the sentinels.
std::uint32_t hash_word(std::string_view word, std::uint32_t vocab_size);

// Throws DataError when the text has no words.
TokenSeq tokenize(std::string_view text, std::uint32_t vocab_size);

}  // namespace mtscore

#endif  // MTSCORE_TEXT_HPP_

#include "mtscore/text.hpp"

#include "mtscore/error.hpp"

namespace mtscore {

namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_punct(unsigned char c) {
  return (c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) ||
         (c >= 123 && c <= 126);
}

}  // namespace

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) words.push_back(std::move(cur));
    cur.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_space(c)) {
      flush();
    } else if (is_punct(c)) {
      flush();
      words.emplace_back(1, ch);
    } else if (c >= 'A' && c <= 'Z') {
      cur.push_back(static_cast<char>(c - 'A' + 'a'));
    } else {
      cur.push_back(ch);
    }
  }
  flush();
  return words;
}

std::uint32_t hash_word(std::string_view word, std::uint32_t vocab_size) {
  if (vocab_size < 3) throw ContractError("hash_word: vocab_size must be at least 3");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : word) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  // FNV leaves the low bits poorly mixed for words that differ in one byte.
  h ^= h >> 29;
  h *= 0x9e3779b97f4a7c15ULL;
  h ^= h >> 32;
  return 2 + static_cast<std::uint32_t>(h % (vocab_size - 2));
}

TokenSeq tokenize(std::string_view text, std::uint32_t vocab_size) {
  const auto words = split_words(text);
  if (words.empty()) throw DataError("tokenize: empty input text");
  TokenSeq seq;
  seq.surface = std::string(text);
  seq.ids.reserve(words.size() + 2);
  seq.ids.push_back(kBosId);
  for (const auto& w : words) seq.ids.push_back(hash_word(w, vocab_size));
  seq.ids.push_back(kEosId);
  return seq;
}

}  // namespace mtscore

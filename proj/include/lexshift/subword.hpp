#ifndef LEXSHIFT_SUBWORD_HPP_
#define LEXSHIFT_SUBWORD_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lexshift {

struct NgramRange {
  int min = 3;
  int max = 6;

  friend bool operator==(const NgramRange&, const NgramRange&) = default;
};

inline constexpr std::uint32_t kDefaultBucketCount = 2'000'000;

/// 32-bit FNV-1a over the raw bytes.
constexpr std::uint32_t fnv1a(std::string_view bytes) noexcept {
  std::uint32_t h = 2166136261u;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 16777619u;
  }
  return h;
}

/// Character n-grams of "<" + word + ">", counted in code points, with
/// range.min <= n <= range.max. Ordered by start position, then by length.
/// The full padded token is included when its length is in range.
std::vector<std::string> extract_ngrams(std::string_view word, NgramRange range);

/// Bucket ids (fnv1a % bucket_count) of extract_ngrams(word, range), same order.
std::vector<std::uint32_t> ngram_buckets(std::string_view word, NgramRange range,
                                         std::uint32_t bucket_count);

}  // namespace lexshift

#endif  // LEXSHIFT_SUBWORD_HPP_

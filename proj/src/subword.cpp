#include "lexshift/subword.hpp"

#include "utf8.hpp"

namespace lexshift {

std::vector<std::string> extract_ngrams(std::string_view word, NgramRange range) {
  std::string padded;
  padded.reserve(word.size() + 2);
  padded.push_back('<');
  padded.append(word);
  padded.push_back('>');

  // Byte offsets of each code point, plus the end offset.
  std::vector<std::size_t> starts;
  for (std::size_t pos = 0; pos < padded.size();) {
    starts.push_back(pos);
    pos += utf8::sequence_length(static_cast<unsigned char>(padded[pos]));
  }
  const std::size_t chars = starts.size();
  starts.push_back(padded.size());

  std::vector<std::string> out;
  if (range.min < 1 || range.max < range.min) return out;
  for (std::size_t i = 0; i < chars; ++i) {
    for (int n = range.min; n <= range.max; ++n) {
      const std::size_t j = i + static_cast<std::size_t>(n);
      if (j > chars) break;
      out.emplace_back(padded.substr(starts[i], std::min(starts[j], padded.size()) - starts[i]));
    }
  }
  return out;
}

std::vector<std::uint32_t> ngram_buckets(std::string_view word, NgramRange range,
                                         std::uint32_t bucket_count) {
  std::vector<std::uint32_t> ids;
  if (bucket_count == 0) return ids;
  for (const auto& gram : extract_ngrams(word, range)) ids.push_back(fnv1a(gram) % bucket_count);
  return ids;
}

}  // namespace lexshift

#ifndef LEXSHIFT_CORPUS_HPP_
#define LEXSHIFT_CORPUS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lexshift {

using Sentence = std::vector<std::string>;

/// Tokenized corpus: one entry per non-empty input line.
struct Corpus {
  std::vector<Sentence> sentences;
  std::size_t token_count = 0;
  std::string source_id;

  bool empty() const noexcept { return token_count == 0; }
};

/// Splits on Unicode whitespace. Input must be valid UTF-8.
std::vector<std::string> tokenize(std::string_view line);

/// Lowercases ASCII, Latin-1, Latin Extended-A, Greek and Cyrillic letters;
/// everything else is copied through unchanged.
std::string fold_case(std::string_view word);

/// Throws DecodeError naming the offset of the first invalid byte.
void validate_utf8(std::string_view bytes, std::size_t base_offset = 0);

Corpus parse_corpus(std::string_view text, bool lowercase, std::string source_id = {});
Corpus load_corpus(const std::filesystem::path& path, bool lowercase, std::string source_id = {});

/// Writes one sentence per line, tokens separated by a single space.
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);

class FrequencyTable {
 public:
  FrequencyTable() = default;
  explicit FrequencyTable(std::unordered_map<std::string, std::uint64_t> counts);

  std::uint64_t count(std::string_view word) const;
  std::uint64_t total() const noexcept { return total_; }
  std::size_t size() const noexcept { return counts_.size(); }
  bool contains(std::string_view word) const;
  /// count/total, 0 when absent.
  double rel_freq(std::string_view word) const;

  /// Words by descending count, ties broken lexicographically.
  std::vector<std::pair<std::string, std::uint64_t>> ranked() const;

  const std::unordered_map<std::string, std::uint64_t>& counts() const noexcept { return counts_; }

 private:
  std::unordered_map<std::string, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

FrequencyTable count_frequencies(const Corpus& corpus);

/// rel_freq_t1(w) / rel_freq_t2(w), absent unless w occurs in both tables.
std::optional<double> frequency_ratio(std::string_view word, const FrequencyTable& f1,
                                      const FrequencyTable& f2);

}  // namespace lexshift

#endif  // LEXSHIFT_CORPUS_HPP_

#ifndef LEXSHIFT_PIVOT_HPP_
#define LEXSHIFT_PIVOT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lexshift/corpus.hpp"
#include "lexshift/embedding.hpp"

namespace lexshift {

/// Sorted, duplicate-free list of words.
using WordSet = std::vector<std::string>;
using WordList = std::vector<std::string>;

struct PivotConfig {
  /// Fraction of each corpus' ranked vocabulary considered frequent.
  double top_fraction = 0.15;
  /// Pivots need ratio_lo < freq_t1/freq_t2 < ratio_hi.
  double ratio_lo = 2.0 / 3.0;
  double ratio_hi = 3.0 / 2.0;
  int resamples = 10;
  std::size_t sample_size = 5000;
  std::uint64_t seed = 1;
  /// Frequency-changed words enter the explore set only with rel_freq >= floor in both corpora.
  double explore_floor = 0.0;
  /// Cap on |explore set|; 0 = no cap. Pivots are always kept.
  std::size_t explore_max = 0;

  void validate() const;
};

struct PivotResamples {
  WordSet pivots;
  std::vector<WordList> resamples;
  WordSet explore;
};

/// Words ranked in the top fraction of both tables, stored in both spaces,
/// and with ratio strictly inside (ratio_lo, ratio_hi).
WordSet select_pivots(const FrequencyTable& f1, const FrequencyTable& f2, const PivotConfig& cfg,
                      const EmbeddingSpace& space1, const EmbeddingSpace& space2);

/// The `count` most frequent words of a table (ceil(top_fraction * size), at least 1).
WordSet top_fraction(const FrequencyTable& table, double fraction);

/// cfg.resamples sorted lists, each a uniform draw without replacement of
/// min(sample_size, |pivots|) words; list i depends only on (seed, i).
std::vector<WordList> draw_resamples(const WordSet& pivots, const PivotConfig& cfg);

/// Uniform draw without replacement of min(count, |words|) words, sorted.
WordList sample_without_replacement(const WordSet& words, std::size_t count, std::uint64_t seed,
                                    std::uint64_t stream);

/// pivots plus words stored in both spaces whose ratio lies outside
/// [ratio_lo, ratio_hi], subsampled down to explore_max when set.
WordSet build_explore_set(const FrequencyTable& f1, const FrequencyTable& f2,
                          const WordSet& pivots, const PivotConfig& cfg,
                          const EmbeddingSpace& space1, const EmbeddingSpace& space2);

PivotResamples prepare_pivots(const FrequencyTable& f1, const FrequencyTable& f2,
                              const PivotConfig& cfg, const EmbeddingSpace& space1,
                              const EmbeddingSpace& space2);

/// Newline-delimited export for audit.
void write_word_list(const std::vector<std::string>& words, const std::filesystem::path& path);
std::vector<std::string> read_word_list(const std::filesystem::path& path);

}  // namespace lexshift

#endif  // LEXSHIFT_PIVOT_HPP_

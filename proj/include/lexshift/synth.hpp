#ifndef LEXSHIFT_SYNTH_HPP_
#define LEXSHIFT_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lexshift/corpus.hpp"
#include "lexshift/eval.hpp"

namespace lexshift {

/// Corpus pair with planted semantic change.
///
/// Context words are split into disjoint clusters, each with its own Zipfian
/// unigram distribution. Filler sentences draw every token from one cluster.
/// A planted word occurs `occurrences` times per corpus at the centre of a
/// sentence whose other tokens come from its home cluster; for a changed
/// word with mixing proportion p, round(p * occurrences) of its t2 sentences
/// take their context from a different cluster instead.
struct SynthSpec {
  std::size_t vocab_size = 2000;
  std::size_t tokens_per_corpus = 200'000;
  std::size_t clusters = 10;
  /// One planted word per entry, with that mixing proportion (0 allowed).
  std::vector<double> changed;
  /// Planted words with p = 0.
  std::size_t stable = 10;
  std::size_t sentence_length = 12;
  std::size_t occurrences = 200;
  double zipf_exponent = 1.0;
  std::uint64_t seed = 1;

  void validate() const;
};

struct PlantedWord {
  std::string word;
  std::size_t home_cluster = 0;
  std::size_t other_cluster = 0;
  double p = 0.0;
};

struct SynthCorpora {
  Corpus t1;
  Corpus t2;
  GoldData gold;
  /// Planted words in generation order: changed first, then stable.
  std::vector<PlantedWord> planted;
  /// Context vocabulary of each cluster.
  std::vector<std::vector<std::string>> cluster_words;

  std::vector<std::string> targets() const;
};

SynthCorpora generate(const SynthSpec& spec);

/// Writes corpus_t1.txt, corpus_t2.txt, targets.txt and
/// truth/task1/<language>.txt, truth/task2/<language>.txt under `dir`.
void write_synth(const SynthCorpora& data, const std::filesystem::path& dir,
                 const std::string& language);

}  // namespace lexshift

#endif  // LEXSHIFT_SYNTH_HPP_

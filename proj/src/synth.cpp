#include "lexshift/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "lexshift/answers.hpp"
#include "lexshift/error.hpp"
#include "lexshift/pivot.hpp"

namespace lexshift {
namespace {

constexpr const char* kSyllables[] = {"ba", "ke", "di", "lo", "mu", "na", "pe", "ri", "so", "tu",
                                      "va", "ze", "gi", "ho", "fu", "ja", "ly", "wo", "xe", "qi"};
constexpr std::size_t kSyllableCount = std::size(kSyllables);

std::string syllable_word(std::size_t index, std::size_t length) {
  std::string w;
  for (std::size_t i = 0; i < length; ++i) {
    w += kSyllables[index % kSyllableCount];
    index /= kSyllableCount;
  }
  return w;
}

// Distinct pseudo-words carrying no cluster information in their spelling.
std::vector<std::string> make_names(std::size_t count, std::mt19937_64& rng) {
  std::size_t length = 3;
  std::size_t space = kSyllableCount * kSyllableCount * kSyllableCount;
  while (space < count) {
    space *= kSyllableCount;
    ++length;
  }
  std::vector<std::size_t> ids(space);
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);
  std::vector<std::string> names;
  names.reserve(count);
  for (std::size_t i = 0; i < count; ++i) names.push_back(syllable_word(ids[i], length));
  return names;
}

}  // namespace

void SynthSpec::validate() const {
  const std::size_t planted = changed.size() + stable;
  if (clusters < 2) throw ContractError("synth: need at least two clusters");
  if (sentence_length < 2) throw ContractError("synth: sentence length must be >= 2");
  for (const double p : changed) {
    if (!(p >= 0.0 && p <= 1.0)) throw ContractError("synth: mixing proportion outside [0, 1]");
  }
  if (planted + clusters > vocab_size) {
    throw ContractError("synth: infeasible spec, " + std::to_string(planted) +
                        " planted words leave no context vocabulary in " +
                        std::to_string(vocab_size) + " words");
  }
  if (planted * occurrences * sentence_length > tokens_per_corpus) {
    throw ContractError("synth: infeasible spec, planted sentences exceed the token budget");
  }
}

std::vector<std::string> SynthCorpora::targets() const {
  std::vector<std::string> out;
  for (const auto& p : planted) out.push_back(p.word);
  return out;
}

SynthCorpora generate(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const std::size_t planted_count = spec.changed.size() + spec.stable;
  const auto names = make_names(spec.vocab_size, rng);

  SynthCorpora data;
  const std::size_t context_words = spec.vocab_size - planted_count;
  data.cluster_words.resize(spec.clusters);
  for (std::size_t i = 0; i < context_words; ++i) {
    data.cluster_words[i % spec.clusters].push_back(names[planted_count + i]);
  }
  for (std::size_t i = 0; i < planted_count; ++i) {
    PlantedWord pw;
    pw.word = names[i];
    pw.home_cluster = i % spec.clusters;
    pw.other_cluster = (pw.home_cluster + spec.clusters / 2) % spec.clusters;
    pw.p = i < spec.changed.size() ? spec.changed[i] : 0.0;
    data.gold.binary[pw.word] = pw.p > 0.0 ? 1 : 0;
    data.gold.graded[pw.word] = pw.p;
    data.planted.push_back(std::move(pw));
  }

  std::vector<std::discrete_distribution<std::size_t>> zipf;
  for (const auto& words : data.cluster_words) {
    std::vector<double> w(words.size());
    for (std::size_t r = 0; r < w.size(); ++r) {
      w[r] = 1.0 / std::pow(static_cast<double>(r + 1), spec.zipf_exponent);
    }
    zipf.emplace_back(w.begin(), w.end());
  }

  const std::size_t L = spec.sentence_length;
  const std::size_t centre = L / 2;
  auto make_corpus = [&](bool second, std::uint64_t stream) {
    std::mt19937_64 g(spec.seed * 0x9E3779B97F4A7C15ull + stream);
    auto fill = [&](Sentence& s, std::size_t cluster) {
      for (auto& tok : s) {
        if (tok.empty()) tok = data.cluster_words[cluster][zipf[cluster](g)];
      }
    };
    Corpus c;
    c.source_id = second ? "t2" : "t1";
    for (const auto& pw : data.planted) {
      const auto moved = second ? static_cast<std::size_t>(std::llround(
                                      pw.p * static_cast<double>(spec.occurrences)))
                                : 0;
      for (std::size_t k = 0; k < spec.occurrences; ++k) {
        Sentence s(L);
        s[centre] = pw.word;
        fill(s, k < moved ? pw.other_cluster : pw.home_cluster);
        c.sentences.push_back(std::move(s));
      }
    }
    const std::size_t filler = (spec.tokens_per_corpus - c.sentences.size() * L) / L;
    std::uniform_int_distribution<std::size_t> pick_cluster(0, spec.clusters - 1);
    for (std::size_t k = 0; k < filler; ++k) {
      Sentence s(L);
      fill(s, pick_cluster(g));
      c.sentences.push_back(std::move(s));
    }
    std::shuffle(c.sentences.begin(), c.sentences.end(), g);
    c.token_count = c.sentences.size() * L;
    return c;
  };
  data.t1 = make_corpus(false, 1);
  data.t2 = make_corpus(true, 2);
  return data;
}

void write_synth(const SynthCorpora& data, const std::filesystem::path& dir,
                 const std::string& language) {
  std::filesystem::create_directories(dir);
  write_corpus(data.t1, dir / "corpus_t1.txt");
  write_corpus(data.t2, dir / "corpus_t2.txt");
  write_word_list(data.targets(), dir / "targets.txt");
  BinaryAnswers binary;
  GradedAnswers graded;
  for (const auto& p : data.planted) {
    binary.emplace_back(p.word, data.gold.binary.at(p.word));
    graded.emplace_back(p.word, p.p);
  }
  write_binary_answers(binary, dir / "truth" / "task1" / (language + ".txt"));
  write_graded_answers(graded, dir / "truth" / "task2" / (language + ".txt"));
}

}  // namespace lexshift

#include "lexshift/pivot.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_set>

#include "lexshift/error.hpp"
#include "textio.hpp"

namespace lexshift {

void PivotConfig::validate() const {
  if (!(top_fraction > 0.0 && top_fraction <= 1.0)) {
    throw ContractError("pivot: top fraction must be in (0, 1]");
  }
  if (!(ratio_lo > 0.0 && ratio_lo < 1.0 && ratio_hi > 1.0)) {
    throw ContractError("pivot: ratio bounds must satisfy 0 < lo < 1 < hi");
  }
  if (resamples < 1) throw ContractError("pivot: need at least one resample");
  if (sample_size < 1) throw ContractError("pivot: resample size must be >= 1");
}

WordSet top_fraction(const FrequencyTable& table, double fraction) {
  const auto ranked = table.ranked();
  if (ranked.empty()) return {};
  auto count = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(ranked.size())));
  count = std::clamp<std::size_t>(count, 1, ranked.size());
  WordSet out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(ranked[i].first);
  std::sort(out.begin(), out.end());
  return out;
}

WordSet select_pivots(const FrequencyTable& f1, const FrequencyTable& f2, const PivotConfig& cfg,
                      const EmbeddingSpace& space1, const EmbeddingSpace& space2) {
  cfg.validate();
  if (f1.size() == 0 || f2.size() == 0) throw ContractError("pivot: empty frequency table");
  const WordSet top1 = top_fraction(f1, cfg.top_fraction);
  const WordSet top2 = top_fraction(f2, cfg.top_fraction);
  WordSet both;
  std::set_intersection(top1.begin(), top1.end(), top2.begin(), top2.end(),
                        std::back_inserter(both));
  WordSet pivots;
  for (const auto& w : both) {
    if (!space1.contains(w) || !space2.contains(w)) continue;
    const auto ratio = frequency_ratio(w, f1, f2);
    if (ratio && cfg.ratio_lo < *ratio && *ratio < cfg.ratio_hi) pivots.push_back(w);
  }
  if (pivots.empty()) {
    throw ContractError("pivot set is empty; increase the top fraction (--rho)");
  }
  return pivots;
}

WordList sample_without_replacement(const WordSet& words, std::size_t count, std::uint64_t seed,
                                    std::uint64_t stream) {
  count = std::min(count, words.size());
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::mt19937_64 rng(seq);
  std::vector<std::size_t> idx(words.size());
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  WordList out;
  out.reserve(count);
  for (const auto i : idx) out.push_back(words[i]);
  return out;
}

std::vector<WordList> draw_resamples(const WordSet& pivots, const PivotConfig& cfg) {
  cfg.validate();
  if (pivots.empty()) throw ContractError("cannot resample an empty pivot set");
  std::vector<WordList> out;
  out.reserve(static_cast<std::size_t>(cfg.resamples));
  for (int i = 0; i < cfg.resamples; ++i) {
    out.push_back(sample_without_replacement(pivots, cfg.sample_size, cfg.seed,
                                             static_cast<std::uint64_t>(i)));
  }
  return out;
}

WordSet build_explore_set(const FrequencyTable& f1, const FrequencyTable& f2,
                          const WordSet& pivots, const PivotConfig& cfg,
                          const EmbeddingSpace& space1, const EmbeddingSpace& space2) {
  cfg.validate();
  const std::unordered_set<std::string> pivot_set(pivots.begin(), pivots.end());
  WordSet changed;
  for (const auto& [word, count] : f1.counts()) {
    if (pivot_set.count(word) || !space1.contains(word) || !space2.contains(word)) continue;
    if (f1.rel_freq(word) < cfg.explore_floor || f2.rel_freq(word) < cfg.explore_floor) continue;
    const auto ratio = frequency_ratio(word, f1, f2);
    if (ratio && (*ratio < cfg.ratio_lo || *ratio > cfg.ratio_hi)) changed.push_back(word);
  }
  std::sort(changed.begin(), changed.end());
  if (cfg.explore_max > 0 && pivots.size() + changed.size() > cfg.explore_max) {
    const std::size_t room = cfg.explore_max > pivots.size() ? cfg.explore_max - pivots.size() : 0;
    changed = sample_without_replacement(changed, room, cfg.seed, 0xE0E0E0E0ull);
  }
  WordSet explore;
  explore.reserve(pivots.size() + changed.size());
  std::merge(pivots.begin(), pivots.end(), changed.begin(), changed.end(),
             std::back_inserter(explore));
  return explore;
}

PivotResamples prepare_pivots(const FrequencyTable& f1, const FrequencyTable& f2,
                              const PivotConfig& cfg, const EmbeddingSpace& space1,
                              const EmbeddingSpace& space2) {
  PivotResamples out;
  out.pivots = select_pivots(f1, f2, cfg, space1, space2);
  out.resamples = draw_resamples(out.pivots, cfg);
  out.explore = build_explore_set(f1, f2, out.pivots, cfg, space1, space2);
  return out;
}

void write_word_list(const std::vector<std::string>& words, const std::filesystem::path& path) {
  auto out = textio::open_output(path, "word list");
  for (const auto& w : words) out << w << '\n';
  if (!out) throw IoError("failed writing word list: " + path.string());
}

std::vector<std::string> read_word_list(const std::filesystem::path& path) {
  auto in = textio::open_input(path, "word list");
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const auto w = textio::strip_cr(line);
    const auto fields = textio::split_fields(w);
    if (!fields.empty()) words.emplace_back(fields.front());
  }
  return words;
}

}  // namespace lexshift

#ifndef LEXSHIFT_EVAL_HPP_
#define LEXSHIFT_EVAL_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lexshift {

using BinaryLabels = std::map<std::string, int>;
using GradedScores = std::map<std::string, double>;

struct GoldData {
  BinaryLabels binary;
  GradedScores graded;
};

/// Fraction of words whose labels agree; key sets must be equal.
double accuracy(const BinaryLabels& predicted, const BinaryLabels& gold);

/// Sample Pearson correlation.
double pearson(std::span<const double> x, std::span<const double> y);

struct KendallTau {
  double tau = 0.0;
  /// Two-sided, normal approximation with tie-adjusted variance.
  double p_value = 1.0;
  /// concordant - discordant
  std::int64_t score = 0;
  std::int64_t pairs = 0;
  std::int64_t x_tied_pairs = 0;
  std::int64_t y_tied_pairs = 0;
};

/// Kendall tau-b in O(n log n).
KendallTau kendall_tau(std::span<const double> x, std::span<const double> y);

/// Threshold h maximizing accuracy of (score > h) against labels; candidates
/// are 0, midpoints between consecutive distinct scores, and the max score.
/// Ties resolve to the smallest candidate.
double select_threshold(std::span<const double> scores, std::span<const int> labels);

/// Pairs matched by word: x from predicted, y from gold, ordered by word.
struct AlignedScores {
  std::vector<double> predicted;
  std::vector<double> gold;
};
AlignedScores align(const GradedScores& predicted, const GradedScores& gold);

struct LanguageMetrics {
  std::string language;
  std::size_t binary_count = 0;
  std::optional<double> accuracy;
  std::size_t graded_count = 0;
  std::optional<double> pearson;
  std::optional<KendallTau> kendall;
};

/// Metrics for whichever tasks have both gold and predictions.
LanguageMetrics evaluate_language(std::string language, const GoldData& gold,
                                  const std::optional<BinaryLabels>& predicted_binary,
                                  const std::optional<GradedScores>& predicted_graded);

}  // namespace lexshift

#endif  // LEXSHIFT_EVAL_HPP_

#ifndef LEXSHIFT_CHANGE_HPP_
#define LEXSHIFT_CHANGE_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lexshift/embedding.hpp"
#include "lexshift/error.hpp"
#include "lexshift/pivot.hpp"

namespace lexshift {

/// exp(phi * s_j) / sum_k exp(phi * s_k), shifted by the max for stability.
template <typename Derived>
Eigen::VectorXd softmax(const Eigen::MatrixBase<Derived>& similarities, double phi) {
  const Eigen::VectorXd s = similarities.template cast<double>();
  if (s.size() == 0) throw ContractError("softmax over an empty vector");
  const Eigen::VectorXd z = phi * s;
  Eigen::VectorXd e = (z.array() - z.maxCoeff()).exp().matrix();
  return e / e.sum();
}

/// sum_j p_j ln(p_j / q_j) in nats; both arguments must be strictly positive.
template <typename DerivedP, typename DerivedQ>
double kl_divergence(const Eigen::MatrixBase<DerivedP>& p, const Eigen::MatrixBase<DerivedQ>& q) {
  if (p.size() != q.size()) throw ContractError("KL divergence of vectors of different length");
  const auto a = p.template cast<double>().array();
  const auto b = q.template cast<double>().array();
  return (a * (a.log() - b.log())).sum();
}

/// Softmax-normalized similarity of one query to one pivot resample.
struct Profile {
  std::size_t resample_id = 0;
  Eigen::VectorXd probs;
};

/// Reference construction: one cosine() call per pivot. Only the query may
/// fall back to subword composition.
Profile build_profile(std::string_view query, std::span<const std::string> resample,
                      const EmbeddingSpace& space, double phi, std::size_t resample_id = 0);

/// KL(p || q); throws ContractError unless both come from the same resample.
double kl_divergence(const Profile& p, const Profile& q);

enum class Period { kFirst, kSecond };

/// Profiles and raw divergences for many queries against fixed resamples.
/// Pivot vectors are normalized once per space; a query costs one
/// matrix-vector product per resample and period.
class ChangeModel {
 public:
  ChangeModel(std::vector<WordList> resamples, const EmbeddingSpace& first,
              const EmbeddingSpace& second, double phi);

  std::size_t resample_count() const noexcept { return resamples_.size(); }
  const std::vector<WordList>& resamples() const noexcept { return resamples_; }
  double phi() const noexcept { return phi_; }

  Profile profile(std::string_view query, std::size_t resample, Period period) const;
  /// lambda_i = KL(profile_t1 || profile_t2) for each resample, in order.
  std::vector<double> raw_lambdas(std::string_view query) const;

 private:
  struct Side {
    const EmbeddingSpace* space;
    std::vector<Eigen::MatrixXd> unit_pivots;
  };
  Side make_side(const EmbeddingSpace& space) const;
  Eigen::VectorXd unit_query(const Side& side, std::string_view query) const;
  Eigen::VectorXd probs(const Side& side, const Eigen::VectorXd& q, std::size_t resample) const;

  std::vector<WordList> resamples_;
  double phi_;
  Side first_;
  Side second_;
};

std::vector<double> raw_lambdas(std::string_view query, const std::vector<WordList>& resamples,
                                const EmbeddingSpace& first, const EmbeddingSpace& second,
                                double phi);

struct CalibrationBounds {
  double upper = 1.0;
  double lower = 0.0;
  int draws = 0;
  std::size_t draw_size = 0;
};

/// Nearest-rank percentile: the ceil(pct/100 * n)-th smallest value.
double nearest_rank_percentile(std::span<const double> values, double pct);

/// upper = mean of the 90th percentiles, lower = mean of the 10th
/// percentiles over the given per-draw samples of per-word lambda values.
CalibrationBounds bounds_from_draws(const std::vector<std::vector<double>>& draws);

/// Draws `draws` subsets of `draw_size` explore words (without replacement),
/// takes each word's mean raw lambda over the pivot resamples, and averages
/// the per-draw 90th/10th percentiles. Throws CalibrationError when
/// upper == lower.
CalibrationBounds calibrate_bounds(const WordSet& explore, const ChangeModel& model, int draws,
                                   std::size_t draw_size, std::uint64_t seed, int workers = 1);

CalibrationBounds calibrate_bounds(const WordSet& explore, const std::vector<WordList>& resamples,
                                   const EmbeddingSpace& first, const EmbeddingSpace& second,
                                   double phi, int draws, std::size_t draw_size,
                                   std::uint64_t seed);

/// clamp((lambda - lower) / (upper - lower), 0, 1).
double scale_lambda(double lambda, const CalibrationBounds& bounds);

struct ChangeScore {
  std::string word;
  std::vector<double> raw;
  std::vector<double> scaled;
  double mean = 0.0;
  bool changed = false;
};

/// Scales each lambda, averages, and applies the strict threshold mean > h.
ChangeScore make_score(std::string word, std::vector<double> raw, const CalibrationBounds& bounds,
                       double threshold);

ChangeScore score_word(std::string_view query, const ChangeModel& model,
                       const CalibrationBounds& bounds, double threshold);

ChangeScore score_word(std::string_view query, const std::vector<WordList>& resamples,
                       const EmbeddingSpace& first, const EmbeddingSpace& second, double phi,
                       const CalibrationBounds& bounds, double threshold);

struct RankedWord {
  std::string word;
  double score = 0.0;

  friend bool operator==(const RankedWord&, const RankedWord&) = default;
};

/// Descending mean score, ties by word.
std::vector<RankedWord> rank_words(const std::vector<ChangeScore>& scores);

}  // namespace lexshift

#endif  // LEXSHIFT_CHANGE_HPP_

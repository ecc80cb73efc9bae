#include "lexshift/change.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <thread>

namespace lexshift {

Profile build_profile(std::string_view query, std::span<const std::string> resample,
                      const EmbeddingSpace& space, double phi, std::size_t resample_id) {
  if (resample.empty()) throw ContractError("profile over an empty resample");
  const auto q = space.vector(query);
  Eigen::VectorXd sims(static_cast<Eigen::Index>(resample.size()));
  for (std::size_t j = 0; j < resample.size(); ++j) {
    const auto idx = space.index_of(resample[j]);
    if (!idx) {
      throw ContractError("pivot '" + resample[j] +
                          "' is not stored in the embedding space (pivot selection is inconsistent)");
    }
    sims(static_cast<Eigen::Index>(j)) = cosine(q, space.row(*idx).transpose());
  }
  return Profile{resample_id, softmax(sims, phi)};
}

double kl_divergence(const Profile& p, const Profile& q) {
  if (p.resample_id != q.resample_id || p.probs.size() != q.probs.size()) {
    throw ContractError("KL divergence between profiles of different resamples");
  }
  return kl_divergence(p.probs, q.probs);
}

ChangeModel::ChangeModel(std::vector<WordList> resamples, const EmbeddingSpace& first,
                         const EmbeddingSpace& second, double phi)
    : resamples_(std::move(resamples)), phi_(phi) {
  if (resamples_.empty()) throw ContractError("change model needs at least one resample");
  if (!(phi >= 0.0) || !std::isfinite(phi)) throw ContractError("phi must be finite and >= 0");
  first_ = make_side(first);
  second_ = make_side(second);
}

ChangeModel::Side ChangeModel::make_side(const EmbeddingSpace& space) const {
  Side side{&space, {}};
  side.unit_pivots.reserve(resamples_.size());
  for (const auto& resample : resamples_) {
    if (resample.empty()) throw ContractError("empty pivot resample");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(resample.size()), space.dim());
    for (std::size_t j = 0; j < resample.size(); ++j) {
      const auto idx = space.index_of(resample[j]);
      if (!idx) {
        throw ContractError("pivot '" + resample[j] +
                            "' is not stored in the embedding space (pivot selection is inconsistent)");
      }
      const Eigen::VectorXd v = space.row(*idx).transpose().cast<double>();
      const double n = v.norm();
      if (!(n > 0.0)) throw DegenerateError("pivot '" + resample[j] + "' has a zero vector");
      m.row(static_cast<Eigen::Index>(j)) = v.transpose() / n;
    }
    side.unit_pivots.push_back(std::move(m));
  }
  return side;
}

Eigen::VectorXd ChangeModel::unit_query(const Side& side, std::string_view query) const {
  const Eigen::VectorXd q = side.space->vector(query).cast<double>();
  const double n = q.norm();
  if (!(n > 0.0)) throw DegenerateError("query '" + std::string(query) + "' has a zero vector");
  return q / n;
}

Eigen::VectorXd ChangeModel::probs(const Side& side, const Eigen::VectorXd& q,
                                   std::size_t resample) const {
  const Eigen::VectorXd sims = (side.unit_pivots[resample] * q).cwiseMax(-1.0).cwiseMin(1.0);
  return softmax(sims, phi_);
}

Profile ChangeModel::profile(std::string_view query, std::size_t resample, Period period) const {
  if (resample >= resamples_.size()) throw ContractError("resample index out of range");
  const Side& side = period == Period::kFirst ? first_ : second_;
  return Profile{resample, probs(side, unit_query(side, query), resample)};
}

std::vector<double> ChangeModel::raw_lambdas(std::string_view query) const {
  const Eigen::VectorXd q1 = unit_query(first_, query);
  const Eigen::VectorXd q2 = unit_query(second_, query);
  std::vector<double> out;
  out.reserve(resamples_.size());
  for (std::size_t i = 0; i < resamples_.size(); ++i) {
    out.push_back(kl_divergence(probs(first_, q1, i), probs(second_, q2, i)));
  }
  return out;
}

std::vector<double> raw_lambdas(std::string_view query, const std::vector<WordList>& resamples,
                                const EmbeddingSpace& first, const EmbeddingSpace& second,
                                double phi) {
  return ChangeModel(resamples, first, second, phi).raw_lambdas(query);
}

double nearest_rank_percentile(std::span<const double> values, double pct) {
  if (values.empty()) throw ContractError("percentile of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(pct * n / 100.0));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

CalibrationBounds bounds_from_draws(const std::vector<std::vector<double>>& draws) {
  if (draws.empty()) throw ContractError("calibration needs at least one draw");
  CalibrationBounds b;
  b.upper = 0.0;
  b.lower = 0.0;
  for (const auto& d : draws) {
    b.upper += nearest_rank_percentile(d, 90.0);
    b.lower += nearest_rank_percentile(d, 10.0);
    b.draw_size = std::max(b.draw_size, d.size());
  }
  b.upper /= static_cast<double>(draws.size());
  b.lower /= static_cast<double>(draws.size());
  b.draws = static_cast<int>(draws.size());
  if (!(b.upper > b.lower)) {
    throw CalibrationError(
        "degenerate calibration: upper bound equals lower bound (are both embedding spaces "
        "identical, e.g. trained on the same corpus?)");
  }
  return b;
}

CalibrationBounds calibrate_bounds(const WordSet& explore, const ChangeModel& model, int draws,
                                   std::size_t draw_size, std::uint64_t seed, int workers) {
  if (explore.empty()) throw ContractError("calibration needs a non-empty explore set");
  if (draws < 1 || draw_size < 1) throw ContractError("calibration needs K >= 1 and M' >= 1");

  std::vector<WordList> samples;
  for (int k = 0; k < draws; ++k) {
    samples.push_back(sample_without_replacement(explore, draw_size, seed ^ 0xCA11B8A7Eull,
                                                 static_cast<std::uint64_t>(k)));
  }
  // Each word's mean lambda is computed once even if drawn repeatedly.
  std::map<std::string, double> mean_lambda;
  for (const auto& s : samples) {
    for (const auto& w : s) mean_lambda.emplace(w, 0.0);
  }
  std::vector<std::map<std::string, double>::iterator> pending;
  for (auto it = mean_lambda.begin(); it != mean_lambda.end(); ++it) pending.push_back(it);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto l = model.raw_lambdas(pending[i]->first);
      pending[i]->second = std::accumulate(l.begin(), l.end(), 0.0) / static_cast<double>(l.size());
    }
  };
  const auto n_workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)),
                                                 1, std::max<std::size_t>(pending.size(), 1));
  if (n_workers == 1) {
    work(0, pending.size());
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < n_workers; ++w) {
      threads.emplace_back(work, pending.size() * w / n_workers, pending.size() * (w + 1) / n_workers);
    }
    for (auto& t : threads) t.join();
  }

  std::vector<std::vector<double>> values;
  for (const auto& s : samples) {
    std::vector<double> v;
    v.reserve(s.size());
    for (const auto& w : s) v.push_back(mean_lambda.at(w));
    values.push_back(std::move(v));
  }
  auto b = bounds_from_draws(values);
  b.draw_size = std::min(draw_size, explore.size());
  return b;
}

CalibrationBounds calibrate_bounds(const WordSet& explore, const std::vector<WordList>& resamples,
                                   const EmbeddingSpace& first, const EmbeddingSpace& second,
                                   double phi, int draws, std::size_t draw_size,
                                   std::uint64_t seed) {
  return calibrate_bounds(explore, ChangeModel(resamples, first, second, phi), draws, draw_size,
                          seed);
}

double scale_lambda(double lambda, const CalibrationBounds& bounds) {
  return std::clamp((lambda - bounds.lower) / (bounds.upper - bounds.lower), 0.0, 1.0);
}

ChangeScore make_score(std::string word, std::vector<double> raw, const CalibrationBounds& bounds,
                       double threshold) {
  if (raw.empty()) throw ContractError("score needs at least one lambda");
  ChangeScore s;
  s.word = std::move(word);
  s.scaled.reserve(raw.size());
  for (const double l : raw) s.scaled.push_back(scale_lambda(l, bounds));
  s.mean = std::accumulate(s.scaled.begin(), s.scaled.end(), 0.0) /
           static_cast<double>(s.scaled.size());
  s.raw = std::move(raw);
  s.changed = s.mean > threshold;
  return s;
}

ChangeScore score_word(std::string_view query, const ChangeModel& model,
                       const CalibrationBounds& bounds, double threshold) {
  return make_score(std::string(query), model.raw_lambdas(query), bounds, threshold);
}

ChangeScore score_word(std::string_view query, const std::vector<WordList>& resamples,
                       const EmbeddingSpace& first, const EmbeddingSpace& second, double phi,
                       const CalibrationBounds& bounds, double threshold) {
  return score_word(query, ChangeModel(resamples, first, second, phi), bounds, threshold);
}

std::vector<RankedWord> rank_words(const std::vector<ChangeScore>& scores) {
  std::vector<RankedWord> out;
  out.reserve(scores.size());
  for (const auto& s : scores) out.push_back({s.word, s.mean});
  std::sort(out.begin(), out.end(), [](const RankedWord& a, const RankedWord& b) {
    return a.score != b.score ? a.score > b.score : a.word < b.word;
  });
  return out;
}

}  // namespace lexshift

#ifndef LEXSHIFT_TRAINER_HPP_
#define LEXSHIFT_TRAINER_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lexshift/corpus.hpp"
#include "lexshift/embedding.hpp"
#include "lexshift/subword.hpp"

namespace lexshift {

struct TrainerConfig {
  int dim = 100;
  int window = 7;
  int epochs = 5;
  int negatives = 5;
  double learning_rate = 0.025;
  std::uint64_t min_count = 5;
  NgramRange ngrams{3, 6};
  std::uint32_t bucket_count = kDefaultBucketCount;
  /// Frequent-word subsampling threshold; <= 0 disables subsampling.
  double subsample = 1e-4;
  std::uint64_t seed = 1;
  /// 1 = deterministic single-worker mode.
  int workers = 1;

  void validate() const;
};

/// Trainer vocabulary: descending count, ties by word.
struct Vocabulary {
  std::vector<std::string> words;
  std::vector<std::uint64_t> counts;
  std::unordered_map<std::string, std::int32_t> index;
  std::uint64_t total = 0;

  std::size_t size() const noexcept { return words.size(); }
  std::optional<std::int32_t> find(std::string_view word) const {
    const auto it = index.find(std::string(word));
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
};

Vocabulary build_vocab(const FrequencyTable& counts, const TrainerConfig& cfg);
Vocabulary build_vocab(const Corpus& corpus, const TrainerConfig& cfg);

/// Unigram^0.75 sampling table for negatives.
class NegativeTable {
 public:
  explicit NegativeTable(std::span<const std::uint64_t> counts, std::size_t table_size = 10'000'000);

  template <typename Rng>
  std::int32_t draw(Rng& rng) const {
    return table_[std::uniform_int_distribution<std::size_t>(0, table_.size() - 1)(rng)];
  }
  /// Exact count^0.75 / Z for word i.
  double probability(std::size_t i) const { return probs_.at(i); }
  std::size_t size() const noexcept { return table_.size(); }

 private:
  std::vector<std::int32_t> table_;
  std::vector<double> probs_;
};

/// Parameters of the subword skip-gram model.
///
/// Input rows [0, V) hold word vectors; row V + k holds the vector of
/// bucket_ids[k]. Only buckets reached by some vocabulary word get a row, so
/// memory follows the number of distinct n-grams rather than bucket_count.
template <typename Scalar>
struct BasicTrainingState {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix input;
  Matrix output;
  /// Per word: its own input row followed by its n-gram rows.
  std::vector<std::vector<std::int32_t>> input_rows;
  std::vector<std::uint32_t> bucket_ids;
  std::uint64_t processed_tokens = 0;

  Eigen::Index dim() const noexcept { return input.cols(); }
  std::size_t vocab_size() const noexcept { return input_rows.size(); }
};

using TrainingState = BasicTrainingState<float>;

/// Input rows uniform in [-1/(2d), 1/(2d)], output rows zero.
template <typename Scalar = float>
BasicTrainingState<Scalar> initialize_state(const Vocabulary& vocab, const TrainerConfig& cfg) {
  cfg.validate();
  BasicTrainingState<Scalar> state;
  const auto v = static_cast<std::int32_t>(vocab.size());

  std::map<std::uint32_t, std::int32_t> bucket_row;
  std::vector<std::vector<std::uint32_t>> word_buckets(vocab.size());
  for (std::int32_t w = 0; w < v; ++w) {
    word_buckets[w] = ngram_buckets(vocab.words[w], cfg.ngrams, cfg.bucket_count);
    for (const auto b : word_buckets[w]) bucket_row.emplace(b, 0);
  }
  std::int32_t next = v;
  for (auto& [bucket, row] : bucket_row) {
    row = next++;
    state.bucket_ids.push_back(bucket);
  }
  state.input_rows.resize(vocab.size());
  for (std::int32_t w = 0; w < v; ++w) {
    auto& rows = state.input_rows[w];
    rows.reserve(word_buckets[w].size() + 1);
    rows.push_back(w);
    for (const auto b : word_buckets[w]) rows.push_back(bucket_row.at(b));
  }

  state.input.resize(next, cfg.dim);
  state.output = BasicTrainingState<Scalar>::Matrix::Zero(v, cfg.dim);
  std::mt19937_64 rng(cfg.seed ^ 0x9E3779B97F4A7C15ull);
  const double bound = 1.0 / (2.0 * cfg.dim);
  std::uniform_real_distribution<double> uniform(-bound, bound);
  for (Eigen::Index r = 0; r < state.input.rows(); ++r) {
    for (Eigen::Index c = 0; c < state.input.cols(); ++c) {
      state.input(r, c) = static_cast<Scalar>(uniform(rng));
    }
  }
  return state;
}

template <typename Scalar>
Scalar log_sigmoid(Scalar x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  return x >= 0 ? Scalar(1) / (Scalar(1) + std::exp(-x)) : std::exp(x) / (Scalar(1) + std::exp(x));
}

/// Mean of the given input rows.
template <typename Scalar>
typename BasicTrainingState<Scalar>::Vector hidden(const BasicTrainingState<Scalar>& state,
                                                   std::span<const std::int32_t> rows) {
  typename BasicTrainingState<Scalar>::Vector h =
      BasicTrainingState<Scalar>::Vector::Zero(state.dim());
  for (const auto r : rows) h += state.input.row(r).transpose();
  h /= static_cast<Scalar>(rows.size());
  return h;
}

/// -log s(o_target . h) - sum_n log s(-o_n . h), h = mean of input rows.
template <typename Scalar>
Scalar pair_loss(const BasicTrainingState<Scalar>& state, std::span<const std::int32_t> rows,
                 std::int32_t target, std::span<const std::int32_t> negatives) {
  const auto h = hidden(state, rows);
  Scalar loss = -log_sigmoid<Scalar>(state.output.row(target).dot(h.transpose()));
  for (const auto n : negatives) loss -= log_sigmoid<Scalar>(-state.output.row(n).dot(h.transpose()));
  return loss;
}

template <typename Scalar>
struct PairGradient {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Scalar loss{};
  /// d loss / d row, keyed by row index; repeated rows are accumulated.
  std::map<std::int32_t, Vector> input;
  std::map<std::int32_t, Vector> output;
};

/// Exact gradient of pair_loss with respect to every row it touches.
template <typename Scalar>
PairGradient<Scalar> pair_gradient(const BasicTrainingState<Scalar>& state,
                                   std::span<const std::int32_t> rows, std::int32_t target,
                                   std::span<const std::int32_t> negatives) {
  using Vector = typename PairGradient<Scalar>::Vector;
  PairGradient<Scalar> g;
  const auto h = hidden(state, rows);
  Vector grad_h = Vector::Zero(state.dim());
  auto accumulate = [&](std::int32_t row, bool positive) {
    const Scalar score = state.output.row(row).dot(h.transpose());
    g.loss -= log_sigmoid<Scalar>(positive ? score : -score);
    const Scalar coeff = sigmoid(score) - (positive ? Scalar(1) : Scalar(0));
    grad_h += coeff * state.output.row(row).transpose();
    auto [it, inserted] = g.output.try_emplace(row, Vector::Zero(state.dim()));
    it->second += coeff * h;
  };
  accumulate(target, true);
  for (const auto n : negatives) accumulate(n, false);
  const Scalar share = Scalar(1) / static_cast<Scalar>(rows.size());
  for (const auto r : rows) {
    auto [it, inserted] = g.input.try_emplace(r, Vector::Zero(state.dim()));
    it->second += share * grad_h;
  }
  return g;
}

/// One stochastic update for a (center, context) pair; returns the loss
/// before the update. Output rows move along their exact negative gradient.
/// Every input row receives the full hidden-layer gradient, i.e. the exact
/// gradient rescaled by the number of rows, so that the mean h moves at the
/// same rate regardless of how many n-grams a word has.
template <typename Scalar>
Scalar sgd_step(BasicTrainingState<Scalar>& state, std::span<const std::int32_t> rows,
                std::int32_t target, std::span<const std::int32_t> negatives, Scalar lr,
                typename BasicTrainingState<Scalar>::Vector& h,
                typename BasicTrainingState<Scalar>::Vector& grad_h) {
  h.setZero(state.dim());
  for (const auto r : rows) h += state.input.row(r).transpose();
  h /= static_cast<Scalar>(rows.size());
  grad_h.setZero(state.dim());
  Scalar loss = 0;
  auto update = [&](std::int32_t row, bool positive) {
    auto out = state.output.row(row);
    const Scalar score = out.dot(h.transpose());
    loss -= log_sigmoid<Scalar>(positive ? score : -score);
    const Scalar alpha = lr * ((positive ? Scalar(1) : Scalar(0)) - sigmoid(score));
    grad_h += alpha * out.transpose();
    out += alpha * h.transpose();
  };
  update(target, true);
  for (const auto n : negatives) update(n, false);
  for (const auto r : rows) state.input.row(r) += grad_h.transpose();
  return loss;
}

/// Word vectors = mean of each word's input rows; buckets = their input rows.
EmbeddingSpace export_space(const TrainingState& state, const Vocabulary& vocab,
                            const TrainerConfig& cfg);

/// Probability of keeping a token with relative frequency f: min(1, sqrt(t/f)).
double keep_probability(double rel_freq, double threshold);

/// Skip-gram with negative sampling over subword-composed inputs.
EmbeddingSpace train(const Corpus& corpus, const TrainerConfig& cfg);

}  // namespace lexshift

#endif  // LEXSHIFT_TRAINER_HPP_

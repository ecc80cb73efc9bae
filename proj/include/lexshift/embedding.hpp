#ifndef LEXSHIFT_EMBEDDING_HPP_
#define LEXSHIFT_EMBEDDING_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lexshift/error.hpp"
#include "lexshift/subword.hpp"

namespace lexshift {

/// Cosine similarity, evaluated in double and clamped to [-1, 1].
template <typename DerivedA, typename DerivedB>
double cosine(const Eigen::MatrixBase<DerivedA>& u, const Eigen::MatrixBase<DerivedB>& v) {
  const auto a = u.template cast<double>();
  const auto b = v.template cast<double>();
  const double nu = a.norm();
  const double nv = b.norm();
  if (!(nu > 0.0) || !(nv > 0.0)) throw DegenerateError("cosine of a zero-norm vector");
  return std::clamp(a.dot(b) / (nu * nv), -1.0, 1.0);
}

/// Hashed character n-gram vectors. Buckets never written are implicitly zero.
class SubwordTable {
 public:
  using Scalar = float;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  SubwordTable(Eigen::Index dim, NgramRange range, std::uint32_t bucket_count);

  Eigen::Index dim() const noexcept { return dim_; }
  NgramRange range() const noexcept { return range_; }
  std::uint32_t bucket_count() const noexcept { return bucket_count_; }
  /// Number of stored (non-implicit) buckets.
  std::size_t stored() const noexcept { return ids_.size(); }

  void set(std::uint32_t bucket, const Eigen::Ref<const Vector>& v);
  /// Stored bucket ids in ascending order.
  std::vector<std::uint32_t> bucket_ids() const;
  /// Stored vector or the zero vector.
  Vector bucket(std::uint32_t id) const;
  /// Mean of the bucket vectors of every n-gram of "<word>".
  Vector compose(std::string_view word) const;

 private:
  Eigen::Index dim_;
  NgramRange range_;
  std::uint32_t bucket_count_;
  std::vector<std::uint32_t> ids_;
  std::unordered_map<std::uint32_t, Eigen::Index> row_of_;
  Matrix rows_;
};

/// Word -> R^d map for one corpus, optionally with a subword table for OOV queries.
class EmbeddingSpace {
 public:
  using Scalar = float;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  explicit EmbeddingSpace(Eigen::Index dim);
  /// Rows of `vectors` correspond to `words`; words must be distinct.
  EmbeddingSpace(std::vector<std::string> words, Matrix vectors);

  Eigen::Index dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return words_.size(); }
  const std::vector<std::string>& words() const noexcept { return words_; }
  const Matrix& matrix() const noexcept { return vectors_; }

  std::optional<Eigen::Index> index_of(std::string_view word) const;
  /// True when the word has a stored vector (subword fallback not considered).
  bool contains(std::string_view word) const { return index_of(word).has_value(); }
  /// True when vector() will succeed.
  bool resolvable(std::string_view word) const;

  void add_word(std::string word, const Eigen::Ref<const Vector>& v);
  Eigen::Block<const Matrix, 1, Eigen::Dynamic, true> row(Eigen::Index i) const {
    return vectors_.row(i);
  }

  bool has_subwords() const noexcept { return subwords_.has_value(); }
  const SubwordTable& subwords() const;
  void set_subwords(SubwordTable table);

  /// Stored vector, else the subword composition, else OovError.
  Vector vector(std::string_view word) const;

 private:
  Eigen::Index dim_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, Eigen::Index> index_;
  Matrix vectors_;
  std::optional<SubwordTable> subwords_;
};

/// Path of the auxiliary bucket file written next to a text embedding file.
std::filesystem::path subword_path(const std::filesystem::path& embedding_path);

/// word2vec text format ("V d" header, then "word f1 ... fd", 6 decimals).
/// A subword table, if any, goes to subword_path(path).
void save_embeddings(const EmbeddingSpace& space, const std::filesystem::path& path);

/// Reads the text format and, when present next to it, the subword file.
EmbeddingSpace load_embeddings(const std::filesystem::path& path);

}  // namespace lexshift

#endif  // LEXSHIFT_EMBEDDING_HPP_

#include "lexshift/embedding.hpp"

#include <fstream>
#include <string>

#include "textio.hpp"

namespace lexshift {

SubwordTable::SubwordTable(Eigen::Index dim, NgramRange range, std::uint32_t bucket_count)
    : dim_(dim), range_(range), bucket_count_(bucket_count), rows_(0, dim) {
  if (dim <= 0) throw ContractError("subword table dimension must be positive");
  if (bucket_count == 0) throw ContractError("subword table needs at least one bucket");
  if (range.min < 1 || range.max < range.min) throw ContractError("invalid n-gram range");
}

void SubwordTable::set(std::uint32_t bucket, const Eigen::Ref<const Vector>& v) {
  if (bucket >= bucket_count_) throw ContractError("bucket id out of range");
  if (v.size() != dim_) throw ContractError("bucket vector has wrong dimension");
  if (const auto it = row_of_.find(bucket); it != row_of_.end()) {
    rows_.row(it->second) = v.transpose();
    return;
  }
  const Eigen::Index r = rows_.rows();
  rows_.conservativeResize(r + 1, Eigen::NoChange);
  rows_.row(r) = v.transpose();
  row_of_.emplace(bucket, r);
  ids_.push_back(bucket);
}

std::vector<std::uint32_t> SubwordTable::bucket_ids() const {
  auto ids = ids_;
  std::sort(ids.begin(), ids.end());
  return ids;
}

SubwordTable::Vector SubwordTable::bucket(std::uint32_t id) const {
  if (const auto it = row_of_.find(id); it != row_of_.end()) return rows_.row(it->second).transpose();
  return Vector::Zero(dim_);
}

SubwordTable::Vector SubwordTable::compose(std::string_view word) const {
  const auto ids = ngram_buckets(word, range_, bucket_count_);
  Vector sum = Vector::Zero(dim_);
  for (const auto id : ids) {
    if (const auto it = row_of_.find(id); it != row_of_.end()) sum += rows_.row(it->second).transpose();
  }
  if (!ids.empty()) sum /= static_cast<Scalar>(ids.size());
  return sum;
}

EmbeddingSpace::EmbeddingSpace(Eigen::Index dim) : dim_(dim), vectors_(0, dim) {
  if (dim <= 0) throw ContractError("embedding dimension must be positive");
}

EmbeddingSpace::EmbeddingSpace(std::vector<std::string> words, Matrix vectors)
    : dim_(vectors.cols()), words_(std::move(words)), vectors_(std::move(vectors)) {
  if (dim_ <= 0) throw ContractError("embedding dimension must be positive");
  if (static_cast<Eigen::Index>(words_.size()) != vectors_.rows()) {
    throw ContractError("word list and vector matrix disagree in length");
  }
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], static_cast<Eigen::Index>(i)).second) {
      throw ContractError("duplicate word in embedding space: '" + words_[i] + "'");
    }
  }
}

std::optional<Eigen::Index> EmbeddingSpace::index_of(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool EmbeddingSpace::resolvable(std::string_view word) const {
  return !word.empty() && (contains(word) || has_subwords());
}

void EmbeddingSpace::add_word(std::string word, const Eigen::Ref<const Vector>& v) {
  if (v.size() != dim_) throw ContractError("vector for '" + word + "' has wrong dimension");
  const auto r = vectors_.rows();
  if (!index_.emplace(word, r).second) throw ContractError("duplicate word: '" + word + "'");
  vectors_.conservativeResize(r + 1, Eigen::NoChange);
  vectors_.row(r) = v.transpose();
  words_.push_back(std::move(word));
}

const SubwordTable& EmbeddingSpace::subwords() const {
  if (!subwords_) throw ContractError("embedding space has no subword table");
  return *subwords_;
}

void EmbeddingSpace::set_subwords(SubwordTable table) {
  if (table.dim() != dim_) throw ContractError("subword table dimension mismatch");
  subwords_ = std::move(table);
}

EmbeddingSpace::Vector EmbeddingSpace::vector(std::string_view word) const {
  if (word.empty()) throw ContractError("empty query word");
  if (const auto i = index_of(word)) return vectors_.row(*i).transpose();
  if (subwords_) return subwords_->compose(word);
  throw OovError(std::string(word));
}

std::filesystem::path subword_path(const std::filesystem::path& embedding_path) {
  auto p = embedding_path;
  p += ".subwords";
  return p;
}

namespace {

template <typename RowT>
void append_row(std::string& line, const RowT& row) {
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    line.push_back(' ');
    textio::append_fixed(line, static_cast<double>(row(j)), 6);
  }
  line.push_back('\n');
}

std::vector<std::uint64_t> parse_header(std::string_view line, std::size_t expected,
                                        const std::string& file) {
  const auto fields = textio::split_fields(textio::strip_cr(line));
  std::vector<std::uint64_t> out;
  if (fields.size() == expected) {
    for (const auto f : fields) {
      const auto v = textio::parse_uint(f);
      if (!v) break;
      out.push_back(*v);
    }
  }
  if (out.size() != expected) {
    throw FormatError(file + ":1: malformed header '" + std::string(line) + "'", 1);
  }
  return out;
}

template <typename Vec>
void parse_values(const std::vector<std::string_view>& fields, std::size_t first, Vec& v,
                  const std::string& file, std::size_t line_no) {
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const auto x = textio::parse_double(fields[first + static_cast<std::size_t>(j)]);
    if (!x) {
      throw FormatError(file + ":" + std::to_string(line_no) + ": bad number '" +
                            std::string(fields[first + static_cast<std::size_t>(j)]) + "'",
                        line_no);
    }
    v(j) = static_cast<float>(*x);
  }
}

SubwordTable load_subwords(const std::filesystem::path& path, Eigen::Index dim) {
  auto in = textio::open_input(path, "subword file");
  const std::string file = path.string();
  std::string line;
  if (!std::getline(in, line)) throw FormatError(file + ":1: missing header", 1);
  // count dim bucket_count n_min n_max
  const auto h = parse_header(line, 5, file);
  if (static_cast<Eigen::Index>(h[1]) != dim) {
    throw FormatError(file + ":1: subword dimension " + std::to_string(h[1]) +
                          " does not match embedding dimension " + std::to_string(dim),
                      1);
  }
  SubwordTable table(dim, NgramRange{static_cast<int>(h[3]), static_cast<int>(h[4])},
                     static_cast<std::uint32_t>(h[2]));
  SubwordTable::Vector v(dim);
  std::size_t line_no = 1;
  std::uint64_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = textio::split_fields(textio::strip_cr(line));
    if (fields.empty()) continue;
    if (fields.size() != static_cast<std::size_t>(dim) + 1) {
      throw FormatError(file + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(dim + 1) + " fields, got " +
                            std::to_string(fields.size()),
                        line_no);
    }
    const auto id = textio::parse_uint(fields[0]);
    if (!id || *id >= h[2]) {
      throw FormatError(file + ":" + std::to_string(line_no) + ": bad bucket id", line_no);
    }
    parse_values(fields, 1, v, file, line_no);
    table.set(static_cast<std::uint32_t>(*id), v);
    ++rows;
  }
  if (rows != h[0]) {
    throw FormatError(file + ": header declares " + std::to_string(h[0]) + " buckets, found " +
                          std::to_string(rows),
                      line_no);
  }
  return table;
}

}  // namespace

void save_embeddings(const EmbeddingSpace& space, const std::filesystem::path& path) {
  {
    auto out = textio::open_output(path, "embedding file");
    std::string line = std::to_string(space.size()) + " " + std::to_string(space.dim()) + "\n";
    out << line;
    for (std::size_t i = 0; i < space.size(); ++i) {
      line = space.words()[i];
      append_row(line, space.row(static_cast<Eigen::Index>(i)));
      out << line;
    }
    if (!out) throw IoError("failed writing embedding file: " + path.string());
  }
  const auto sub = subword_path(path);
  if (!space.has_subwords()) {
    std::error_code ec;
    std::filesystem::remove(sub, ec);
    return;
  }
  const auto& table = space.subwords();
  auto out = textio::open_output(sub, "subword file");
  std::string line = std::to_string(table.stored()) + " " + std::to_string(table.dim()) + " " +
                     std::to_string(table.bucket_count()) + " " +
                     std::to_string(table.range().min) + " " + std::to_string(table.range().max) +
                     "\n";
  out << line;
  for (const auto id : table.bucket_ids()) {
    line = std::to_string(id);
    append_row(line, table.bucket(id));
    out << line;
  }
  if (!out) throw IoError("failed writing subword file: " + sub.string());
}

EmbeddingSpace load_embeddings(const std::filesystem::path& path) {
  auto in = textio::open_input(path, "embedding file");
  const std::string file = path.string();
  std::string line;
  if (!std::getline(in, line)) throw FormatError(file + ":1: missing header", 1);
  const auto h = parse_header(line, 2, file);
  if (h[1] == 0) throw FormatError(file + ":1: dimension must be positive", 1);
  const auto rows = static_cast<Eigen::Index>(h[0]);
  const auto dim = static_cast<Eigen::Index>(h[1]);

  std::vector<std::string> words;
  words.reserve(static_cast<std::size_t>(rows));
  EmbeddingSpace::Matrix vectors(rows, dim);
  EmbeddingSpace::Vector v(dim);
  std::size_t line_no = 1;
  Eigen::Index r = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = textio::split_fields(textio::strip_cr(line));
    if (fields.empty()) continue;
    if (fields.size() != static_cast<std::size_t>(dim) + 1) {
      throw FormatError(file + ":" + std::to_string(line_no) + ": expected word plus " +
                            std::to_string(dim) + " values, got " +
                            std::to_string(fields.size()) + " fields",
                        line_no);
    }
    if (r >= rows) {
      throw FormatError(file + ":" + std::to_string(line_no) + ": more rows than header declares",
                        line_no);
    }
    parse_values(fields, 1, v, file, line_no);
    vectors.row(r++) = v.transpose();
    words.emplace_back(fields[0]);
  }
  if (r != rows) {
    throw FormatError(file + ": header declares " + std::to_string(rows) + " rows, found " +
                          std::to_string(r),
                      line_no);
  }
  EmbeddingSpace space(std::move(words), std::move(vectors));
  if (const auto sub = subword_path(path); std::filesystem::exists(sub)) {
    space.set_subwords(load_subwords(sub, dim));
  }
  return space;
}

}  // namespace lexshift

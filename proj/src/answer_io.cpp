#include "lexshift/answers.hpp"

#include <cmath>
#include <optional>
#include <set>

#include "lexshift/error.hpp"
#include "textio.hpp"

namespace lexshift {
namespace {

template <typename Value, typename Parse>
std::vector<std::pair<std::string, Value>> read_answers(const std::filesystem::path& path,
                                                        Parse parse) {
  auto in = textio::open_input(path, "answer file");
  const std::string file = path.string();
  std::vector<std::pair<std::string, Value>> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = textio::split_fields(textio::strip_cr(line));
    if (fields.empty()) continue;
    const auto where = file + ":" + std::to_string(line_no) + ": ";
    if (fields.size() != 2) {
      throw FormatError(where + "expected 'word<TAB>value', got " + std::to_string(fields.size()) +
                            " fields",
                        line_no);
    }
    const auto value = parse(fields[1]);
    if (!value) {
      throw FormatError(where + "bad value '" + std::string(fields[1]) + "'", line_no);
    }
    std::string word(fields[0]);
    if (!seen.insert(word).second) {
      throw FormatError(where + "duplicate word '" + word + "'", line_no);
    }
    out.emplace_back(std::move(word), *value);
  }
  return out;
}

}  // namespace

BinaryAnswers read_binary_answers(const std::filesystem::path& path) {
  return read_answers<int>(path, [](std::string_view s) -> std::optional<int> {
    if (s == "0") return 0;
    if (s == "1") return 1;
    return std::nullopt;
  });
}

GradedAnswers read_graded_answers(const std::filesystem::path& path) {
  return read_answers<double>(path, [](std::string_view s) -> std::optional<double> {
    const auto v = textio::parse_double(s);
    if (v && !std::isfinite(*v)) return std::nullopt;
    return v;
  });
}

void write_binary_answers(const BinaryAnswers& answers, const std::filesystem::path& path) {
  auto out = textio::open_output(path, "answer file");
  for (const auto& [word, label] : answers) out << word << '\t' << label << '\n';
  if (!out) throw IoError("failed writing answer file: " + path.string());
}

void write_graded_answers(const GradedAnswers& answers, const std::filesystem::path& path) {
  auto out = textio::open_output(path, "answer file");
  for (const auto& [word, score] : answers) out << word << '\t' << textio::fixed(score, 6) << '\n';
  if (!out) throw IoError("failed writing answer file: " + path.string());
}

BinaryLabels to_labels(const BinaryAnswers& answers) {
  return BinaryLabels(answers.begin(), answers.end());
}

GradedScores to_scores(const GradedAnswers& answers) {
  return GradedScores(answers.begin(), answers.end());
}

GoldData load_gold(const std::filesystem::path& binary, const std::filesystem::path& graded) {
  GoldData gold;
  if (!binary.empty()) gold.binary = to_labels(read_binary_answers(binary));
  if (!graded.empty()) gold.graded = to_scores(read_graded_answers(graded));
  return gold;
}

}  // namespace lexshift

#ifndef LEXSHIFT_ANSWERS_HPP_
#define LEXSHIFT_ANSWERS_HPP_

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "lexshift/eval.hpp"

namespace lexshift {

// Answer files: one "word<TAB>value" line per target, UTF-8. Task 1 values
// are 0/1 labels, task 2 values are real scores.

using BinaryAnswers = std::vector<std::pair<std::string, int>>;
using GradedAnswers = std::vector<std::pair<std::string, double>>;

/// Throws FormatError (with line number) on bad fields, bad labels or duplicate words.
BinaryAnswers read_binary_answers(const std::filesystem::path& path);
GradedAnswers read_graded_answers(const std::filesystem::path& path);

void write_binary_answers(const BinaryAnswers& answers, const std::filesystem::path& path);
/// Scores are written with 6 decimals.
void write_graded_answers(const GradedAnswers& answers, const std::filesystem::path& path);

BinaryLabels to_labels(const BinaryAnswers& answers);
GradedScores to_scores(const GradedAnswers& answers);

/// Reads whichever of the two gold files is given (empty path = skip).
GoldData load_gold(const std::filesystem::path& binary, const std::filesystem::path& graded);

}  // namespace lexshift

#endif  // LEXSHIFT_ANSWERS_HPP_

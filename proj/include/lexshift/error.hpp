#ifndef LEXSHIFT_ERROR_HPP_
#define LEXSHIFT_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace lexshift {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Input bytes are not valid UTF-8.
class DecodeError : public Error {
 public:
  DecodeError(const std::string& what, std::size_t byte_offset)
      : Error(what), byte_offset_(byte_offset) {}
  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

/// Malformed embedding, answer or config file.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line) : Error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Word has no vector and no subword table is available.
class OovError : public Error {
 public:
  explicit OovError(const std::string& word)
      : Error("out-of-vocabulary word without subword table: '" + word + "'"), word_(word) {}
  const std::string& word() const noexcept { return word_; }

 private:
  std::string word_;
};

/// Zero-norm vector, zero variance, all-tied ranking and similar undefined cases.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Calibration collapsed (upper bound equals lower bound).
class CalibrationError : public Error {
 public:
  using Error::Error;
};

/// Caller violated a precondition (mismatched inputs, invalid configuration, empty sets).
class ContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace lexshift

#endif  // LEXSHIFT_ERROR_HPP_

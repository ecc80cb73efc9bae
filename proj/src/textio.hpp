#ifndef LEXSHIFT_SRC_TEXTIO_HPP_
#define LEXSHIFT_SRC_TEXTIO_HPP_

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lexshift/error.hpp"

namespace lexshift::textio {

/// Locale-independent fixed-point formatting.
inline void append_fixed(std::string& out, double value, int precision) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, precision);
  if (res.ec != std::errc{}) {
    res = std::to_chars(buf, buf + sizeof(buf), value);
  }
  out.append(buf, res.ptr);
}

inline std::string fixed(double value, int precision) {
  std::string s;
  append_fixed(s, value, precision);
  return s;
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<std::uint64_t> parse_uint(std::string_view s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

/// Splits on ASCII spaces and tabs, dropping empty fields.
inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    const std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
    if (pos > start) fields.push_back(line.substr(start, pos - start));
  }
  return fields;
}

inline std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

inline std::ifstream open_input(const std::filesystem::path& path, std::string_view what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + std::string(what) + ": " + path.string());
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path, std::string_view what) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + std::string(what) + ": " + path.string());
  return out;
}

}  // namespace lexshift::textio

#endif  // LEXSHIFT_SRC_TEXTIO_HPP_

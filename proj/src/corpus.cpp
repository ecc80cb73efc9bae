#include "lexshift/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "lexshift/error.hpp"
#include "textio.hpp"
#include "utf8.hpp"

namespace lexshift {
namespace {

bool is_unicode_space(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

char32_t lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp < 0x80) return cp;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  if ((cp >= 0x100 && cp <= 0x137) || (cp >= 0x14A && cp <= 0x177)) return cp | 1;
  if ((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E)) return (cp & 1) ? cp + 1 : cp;
  if (cp == 0x178) return 0xFF;
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 32;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 32;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
  return cp;
}

}  // namespace

void validate_utf8(std::string_view bytes, std::size_t base_offset) {
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    std::size_t len = 0;
    if (utf8::decode(bytes, pos, len) == utf8::kInvalid) {
      throw DecodeError("invalid UTF-8 at byte offset " + std::to_string(base_offset + pos),
                        base_offset + pos);
    }
    pos += len;
  }
}

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  std::size_t start = std::string_view::npos;
  while (pos < line.size()) {
    std::size_t len = 1;
    const char32_t cp = utf8::decode(line, pos, len);
    if (is_unicode_space(cp)) {
      if (start != std::string_view::npos) {
        tokens.emplace_back(line.substr(start, pos - start));
        start = std::string_view::npos;
      }
    } else if (start == std::string_view::npos) {
      start = pos;
    }
    pos += len;
  }
  if (start != std::string_view::npos) tokens.emplace_back(line.substr(start));
  return tokens;
}

std::string fold_case(std::string_view word) {
  std::string out;
  out.reserve(word.size());
  std::size_t pos = 0;
  while (pos < word.size()) {
    std::size_t len = 1;
    const char32_t cp = utf8::decode(word, pos, len);
    if (cp == utf8::kInvalid) {
      out.append(word.substr(pos, len));
    } else {
      utf8::append(out, lower(cp));
    }
    pos += len;
  }
  return out;
}

Corpus parse_corpus(std::string_view text, bool lowercase, std::string source_id) {
  validate_utf8(text);
  Corpus corpus;
  corpus.source_id = std::move(source_id);
  std::size_t begin = 0;
  while (begin <= text.size()) {
    std::size_t end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    auto tokens = tokenize(text.substr(begin, end - begin));
    if (!tokens.empty()) {
      if (lowercase) {
        for (auto& t : tokens) t = fold_case(t);
      }
      corpus.token_count += tokens.size();
      corpus.sentences.push_back(std::move(tokens));
    }
    begin = end + 1;
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, bool lowercase, std::string source_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed reading corpus file: " + path.string());
  if (source_id.empty()) source_id = path.stem().string();
  try {
    return parse_corpus(bytes, lowercase, std::move(source_id));
  } catch (const DecodeError& e) {
    throw DecodeError(path.string() + ": " + e.what(), e.byte_offset());
  }
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  auto out = textio::open_output(path, "corpus file");
  std::string line;
  for (const auto& sentence : corpus.sentences) {
    line.clear();
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      if (i) line.push_back(' ');
      line += sentence[i];
    }
    line.push_back('\n');
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
  }
  if (!out) throw IoError("failed writing corpus file: " + path.string());
}

FrequencyTable::FrequencyTable(std::unordered_map<std::string, std::uint64_t> counts)
    : counts_(std::move(counts)) {
  for (auto it = counts_.begin(); it != counts_.end();) {
    if (it->second == 0) {
      it = counts_.erase(it);
    } else {
      total_ += it->second;
      ++it;
    }
  }
}

std::uint64_t FrequencyTable::count(std::string_view word) const {
  const auto it = counts_.find(std::string(word));
  return it == counts_.end() ? 0 : it->second;
}

bool FrequencyTable::contains(std::string_view word) const {
  return counts_.find(std::string(word)) != counts_.end();
}

double FrequencyTable::rel_freq(std::string_view word) const {
  if (total_ == 0) return 0.0;
  return static_cast<double>(count(word)) / static_cast<double>(total_);
}

std::vector<std::pair<std::string, std::uint64_t>> FrequencyTable::ranked() const {
  std::vector<std::pair<std::string, std::uint64_t>> out(counts_.begin(), counts_.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return out;
}

FrequencyTable count_frequencies(const Corpus& corpus) {
  if (corpus.empty()) {
    throw ContractError("cannot count frequencies of an empty corpus");
  }
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& sentence : corpus.sentences) {
    for (const auto& token : sentence) ++counts[token];
  }
  return FrequencyTable(std::move(counts));
}

std::optional<double> frequency_ratio(std::string_view word, const FrequencyTable& f1,
                                      const FrequencyTable& f2) {
  const std::uint64_t c1 = f1.count(word);
  const std::uint64_t c2 = f2.count(word);
  if (c1 == 0 || c2 == 0) return std::nullopt;
  // (c1/T1)/(c2/T2) as one quotient so that exact rational ratios stay exact.
  return (static_cast<double>(c1) * static_cast<double>(f2.total())) /
         (static_cast<double>(c2) * static_cast<double>(f1.total()));
}

}  // namespace lexshift

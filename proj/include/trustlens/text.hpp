#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace trustlens::text {

/// Unicode NFC followed by trimming of outer whitespace. Throws Error(Parse)
/// on invalid UTF-8.
std::string normalize(std::string_view utf8);

/// Full Unicode case folding.
std::string fold_case(std::string_view utf8);

/// Case-folded word tokens. A token is a maximal run of letters, digits and
/// non-ASCII code points; an apostrophe or hyphen joins two such runs
/// ("that's", "e-mail"). Curly apostrophes are mapped to ASCII first.
std::vector<std::string> tokenize(std::string_view utf8);

/// A set of single- or multi-word terms matched against token sequences, so
/// every match falls on word boundaries.
class TermSet {
 public:
  TermSet() = default;

  /// Loads one term per line; blank lines and lines starting with '#' are
  /// skipped. Throws Error(Config) when the file cannot be read.
  static TermSet load(const std::filesystem::path& path);
  static TermSet from_terms(const std::vector<std::string>& terms);

  void add(std::string_view term);
  void merge(const TermSet& other);

  /// Number of (possibly overlapping) term occurrences in the token sequence.
  std::size_t count_matches(const std::vector<std::string>& tokens) const;
  bool matches_any(const std::vector<std::string>& tokens) const;

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

 private:
  // Terms grouped by first token; each entry stores the remaining tokens.
  std::unordered_map<std::string, std::vector<std::vector<std::string>>> by_head_;
  std::size_t size_ = 0;
};

}  // namespace trustlens::text

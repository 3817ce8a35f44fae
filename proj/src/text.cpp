#include "trustlens/text.hpp"

#include <algorithm>
#include <fstream>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "trustlens/error.hpp"

namespace trustlens::text {
namespace {

bool valid_utf8(std::string_view s) {
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  const int32_t n = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < n) {
    UChar32 c;
    U8_NEXT(p, i, n, c);
    if (c < 0) return false;
  }
  return true;
}

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c >= 0x80;
}

std::string map_apostrophes(std::string_view s) {
  // U+2019 and U+2018 are E2 80 99 / E2 80 98 in UTF-8.
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 &&
        static_cast<unsigned char>(s[i + 1]) == 0x80 &&
        (static_cast<unsigned char>(s[i + 2]) == 0x99 ||
         static_cast<unsigned char>(s[i + 2]) == 0x98)) {
      out.push_back('\'');
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

}  // namespace

std::string normalize(std::string_view utf8) {
  if (!valid_utf8(utf8)) throw Error(ErrorKind::Parse, "invalid UTF-8 text");
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error(ErrorKind::Config, "ICU NFC normalizer unavailable");
  icu::UnicodeString source = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  icu::UnicodeString normalized = nfc->normalize(source, status);
  if (U_FAILURE(status)) throw Error(ErrorKind::Parse, "Unicode normalization failed");
  std::string out;
  normalized.toUTF8String(out);

  std::size_t begin = 0;
  std::size_t end = out.size();
  while (begin < end && is_space(static_cast<unsigned char>(out[begin]))) ++begin;
  while (end > begin && is_space(static_cast<unsigned char>(out[end - 1]))) --end;
  return out.substr(begin, end - begin);
}

std::string fold_case(std::string_view utf8) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  s.foldCase();
  std::string out;
  s.toUTF8String(out);
  return out;
}

std::vector<std::string> tokenize(std::string_view utf8) {
  const std::string folded = fold_case(map_apostrophes(utf8));
  std::vector<std::string> tokens;
  std::string current;
  const std::size_t n = folded.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<unsigned char>(folded[i]);
    if (is_word_byte(c)) {
      current.push_back(static_cast<char>(c));
      continue;
    }
    const bool joiner = (c == '\'' || c == '-') && !current.empty() && i + 1 < n &&
                        is_word_byte(static_cast<unsigned char>(folded[i + 1]));
    if (joiner) {
      current.push_back(static_cast<char>(c));
      continue;
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

TermSet TermSet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot read lexicon " + path.string());
  TermSet set;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view view(line);
    std::size_t first = view.find_first_not_of(" \t");
    if (first == std::string_view::npos || view[first] == '#') continue;
    set.add(view);
  }
  return set;
}

TermSet TermSet::from_terms(const std::vector<std::string>& terms) {
  TermSet set;
  for (const auto& term : terms) set.add(term);
  return set;
}

void TermSet::add(std::string_view term) {
  std::vector<std::string> tokens = tokenize(term);
  if (tokens.empty()) return;
  std::string head = tokens.front();
  std::vector<std::string> rest(tokens.begin() + 1, tokens.end());
  auto& bucket = by_head_[head];
  for (const auto& existing : bucket) {
    if (existing == rest) return;
  }
  bucket.push_back(std::move(rest));
  ++size_;
}

void TermSet::merge(const TermSet& other) {
  for (const auto& [head, rests] : other.by_head_) {
    auto& bucket = by_head_[head];
    for (const auto& rest : rests) {
      if (std::find(bucket.begin(), bucket.end(), rest) != bucket.end()) continue;
      bucket.push_back(rest);
      ++size_;
    }
  }
}

std::size_t TermSet::count_matches(const std::vector<std::string>& tokens) const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto it = by_head_.find(tokens[i]);
    if (it == by_head_.end()) continue;
    for (const auto& rest : it->second) {
      if (i + 1 + rest.size() > tokens.size()) continue;
      bool ok = true;
      for (std::size_t j = 0; j < rest.size() && ok; ++j) ok = tokens[i + 1 + j] == rest[j];
      if (ok) ++count;
    }
  }
  return count;
}

bool TermSet::matches_any(const std::vector<std::string>& tokens) const {
  return count_matches(tokens) > 0;
}

}  // namespace trustlens::text

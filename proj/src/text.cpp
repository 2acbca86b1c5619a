#include "evtab/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace evtab {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)); }
bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)); }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)); }

constexpr std::array<std::string_view, 24> kGuarded = {
    "vs",  "e.g", "i.e", "al",   "fig",  "figs", "dr",    "approx",
    "no",  "ca",  "cf",  "etc",  "mr",   "mrs",  "ms",    "st",
    "resp", "ref", "refs", "eq", "vol",  "incl", "max",   "min"};

constexpr std::string_view kLeadingPunct = "([{\"'";
constexpr std::string_view kTrailingPunct = ")]}\"',;:.?!";

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string to_upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string trim_copy(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string squeeze_spaces(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (char c : s) {
    if (is_space(c)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.push_back(c);
  }
  return out;
}

bool is_guarded_abbreviation(std::string_view word) {
  while (!word.empty() && word.back() == '.') word.remove_suffix(1);
  while (!word.empty() && kLeadingPunct.find(word.front()) != std::string_view::npos)
    word.remove_prefix(1);
  if (word.empty()) return false;
  // Single-letter initials ("J. Smith").
  if (word.size() == 1 && is_alpha(word[0])) return true;
  const std::string lower = to_lower(word);
  return std::find(kGuarded.begin(), kGuarded.end(), lower) != kGuarded.end();
}

std::vector<CharSpan> split_sentences(std::string_view text) {
  std::vector<CharSpan> out;
  const std::size_t n = text.size();
  std::size_t start = 0;

  auto emit = [&](std::size_t b, std::size_t e) {
    while (b < e && is_space(text[b])) ++b;
    while (e > b && is_space(text[e - 1])) --e;
    if (b < e) out.push_back({b, e});
  };

  for (std::size_t i = 0; i < n; ++i) {
    const char c = text[i];
    if (c != '.' && c != '?' && c != '!') continue;
    if (i + 1 < n && !is_space(text[i + 1])) continue;
    std::size_t k = i + 1;
    while (k < n && is_space(text[k])) ++k;
    if (k < n && !is_upper(text[k])) continue;
    if (c == '.') {
      std::size_t w = i;
      while (w > start && !is_space(text[w - 1])) --w;
      if (is_guarded_abbreviation(text.substr(w, i + 1 - w))) continue;
    }
    emit(start, i + 1);
    start = i + 1;
  }
  emit(start, n);
  return out;
}

std::vector<CharSpan> tokenize(std::string_view text, CharSpan range) {
  std::vector<CharSpan> out;
  std::size_t i = range.begin;
  const std::size_t end = std::min(range.end, text.size());
  while (i < end) {
    while (i < end && is_space(text[i])) ++i;
    if (i >= end) break;
    std::size_t j = i;
    while (j < end && !is_space(text[j])) ++j;

    std::size_t b = i;
    std::size_t e = j;
    std::vector<CharSpan> trailing;
    while (b < e && kLeadingPunct.find(text[b]) != std::string_view::npos) {
      out.push_back({b, b + 1});
      ++b;
    }
    while (e > b + 1 && kTrailingPunct.find(text[e - 1]) != std::string_view::npos) {
      if (text[e - 1] == '.' && is_guarded_abbreviation(text.substr(b, e - b))) break;
      trailing.push_back({e - 1, e});
      --e;
    }
    if (b < e) out.push_back({b, e});
    out.insert(out.end(), trailing.rbegin(), trailing.rend());
    i = j;
  }
  return out;
}

}  // namespace evtab

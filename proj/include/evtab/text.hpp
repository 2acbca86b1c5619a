#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace evtab {

// Half-open byte range [begin, end) into an abstract's text.
struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool empty() const { return end <= begin; }
  bool overlaps(const CharSpan& o) const {
    return begin < o.end && o.begin < end;
  }
  friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

// Sentence boundaries inside `text`. A boundary follows '.', '?' or '!' when
// whitespace and then an uppercase letter come next, unless the word carrying
// the period is a guarded abbreviation ("vs.", "e.g.", initials, ...). Returned
// spans are trimmed and relative to `text`; the gaps between them hold only
// whitespace.
std::vector<CharSpan> split_sentences(std::string_view text);

// Word-level tokens of text[range]. Whitespace separates tokens; brackets,
// quotes and trailing punctuation are split off as their own tokens. Spans are
// absolute offsets into `text`.
std::vector<CharSpan> tokenize(std::string_view text, CharSpan range);

std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);
std::string trim_copy(std::string_view s);
// Collapses runs of whitespace to one space and trims both ends.
std::string squeeze_spaces(std::string_view s);

bool is_guarded_abbreviation(std::string_view word);

}  // namespace evtab

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "embedded_data.hpp"
#include "evtab/preprocess.hpp"

namespace evtab {

namespace {

const std::set<std::string, std::less<>> kLinkWords = {
    "of", "and", "the", "in", "with", "for", "to", "a", "an", "on", "by", "or", "at", "from"};

bool is_word(std::string_view s) {
  return !s.empty() && std::any_of(s.begin(), s.end(), [](char c) {
           return std::isalpha(static_cast<unsigned char>(c));
         });
}

bool is_short_form(std::string_view s) {
  return s.size() >= 2 && std::all_of(s.begin(), s.end(), [](char c) {
           return c >= 'A' && c <= 'Z';
         });
}

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

// Right-to-left character match of `short_form` inside the joined words.
// Returns the index of the first word used, or -1.
int match_long_form(std::string_view short_form, const std::vector<std::string>& words) {
  std::string joined;
  std::vector<std::size_t> word_start;
  for (const auto& w : words) {
    if (!joined.empty()) joined.push_back(' ');
    word_start.push_back(joined.size());
    joined += w;
  }
  long s = static_cast<long>(short_form.size()) - 1;
  long l = static_cast<long>(joined.size()) - 1;
  while (s >= 0) {
    const char c = lower(short_form[static_cast<std::size_t>(s)]);
    while (l >= 0) {
      const bool at_word_start = l == 0 || joined[static_cast<std::size_t>(l - 1)] == ' ';
      if (lower(joined[static_cast<std::size_t>(l)]) == c && (s > 0 || at_word_start)) break;
      --l;
    }
    if (l < 0) return -1;
    --l;
    --s;
  }
  const std::size_t first_char = static_cast<std::size_t>(l + 1);
  for (std::size_t w = word_start.size(); w-- > 0;) {
    if (word_start[w] <= first_char) return static_cast<int>(w);
  }
  return -1;
}

}  // namespace

AbbrevMap guess_abbreviations(const Abstract& abstract) {
  AbbrevMap out;
  for (const Sentence& s : abstract.sentences) {
    for (std::size_t i = s.first_token; i + 2 < s.end_token; ++i) {
      const auto& toks = abstract.tokens;
      if (toks[i].surface != "(" || toks[i + 2].surface != ")") continue;
      const std::string& sf = toks[i + 1].surface;
      if (!is_short_form(sf) || out.contains(sf)) continue;

      // Window of preceding words: at most |sf| content words plus any link
      // words between them, stopping at punctuation.
      std::vector<std::string> window;
      std::size_t content = 0;
      for (std::size_t k = i; k-- > s.first_token;) {
        const std::string& w = toks[k].surface;
        if (!is_word(w)) break;
        const bool link = kLinkWords.contains(to_lower(w));
        if (!link && content == sf.size()) break;
        if (!link) ++content;
        window.insert(window.begin(), w);
      }
      if (window.empty()) continue;
      const int first = match_long_form(sf, window);
      if (first < 0) continue;
      const auto begin = window.begin() + first;
      if (kLinkWords.contains(to_lower(*begin))) continue;
      std::string expansion;
      for (auto it = begin; it != window.end(); ++it) {
        if (!expansion.empty()) expansion.push_back(' ');
        expansion += *it;
      }
      out.emplace(sf, expansion);
    }
  }
  return out;
}

AbbrevMap guess_abbreviations(std::string_view text) {
  return guess_abbreviations(make_abstract("", "", {{"", std::string(text)}}));
}

void expand_abbreviations(Abstract& abstract, const AbbrevMap& dictionary,
                          const AbbrevMap& guessed) {
  if (dictionary.empty() && guessed.empty()) return;
  std::vector<Token> out;
  out.reserve(abstract.tokens.size());
  for (const Token& t : abstract.tokens) {
    const std::string* expansion = nullptr;
    if (auto it = guessed.find(t.surface); it != guessed.end()) expansion = &it->second;
    else if (auto it2 = dictionary.find(t.surface); it2 != dictionary.end())
      expansion = &it2->second;
    if (!expansion) {
      out.push_back(t);
      continue;
    }
    abstract.abbrev_map[t.surface] = *expansion;
    std::istringstream words(*expansion);
    std::vector<std::string> parts;
    for (std::string w; words >> w;) parts.push_back(w);
    for (std::size_t k = 0; k < parts.size(); ++k) {
      Token e = t;
      e.surface = parts[k];
      e.normalized = parts[k];
      if (k + 1 < parts.size()) e.gold = Label::O;
      out.push_back(std::move(e));
    }
  }
  abstract.tokens = std::move(out);
  // Sentence token ranges follow the rebuilt token list.
  for (auto& s : abstract.sentences) s.first_token = s.end_token = 0;
  for (std::size_t i = abstract.tokens.size(); i-- > 0;) {
    abstract.sentences[abstract.tokens[i].sentence].first_token = i;
  }
  for (std::size_t i = 0; i < abstract.tokens.size(); ++i) {
    abstract.sentences[abstract.tokens[i].sentence].end_token = i + 1;
  }
}

AbbrevMap parse_abbreviations(std::string_view tsv) {
  AbbrevMap out;
  std::istringstream in{std::string(tsv)};
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    const std::string key = trim_copy(line.substr(0, tab));
    const std::string value = squeeze_spaces(line.substr(tab + 1));
    if (!key.empty() && !value.empty()) out[key] = value;
  }
  return out;
}

const AbbrevMap& default_abbreviations() {
  static const AbbrevMap map = parse_abbreviations(data::kAbbreviationsTsv);
  return map;
}

}  // namespace evtab

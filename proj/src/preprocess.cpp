#include "evtab/preprocess.hpp"

#include <algorithm>
#include <array>

namespace evtab {

namespace {

constexpr std::array<std::string_view, 21> kPosBlacklist = {
    "(",  ")",   ":",  "CC",  "DT", "EX",  "FW", "IN",  "LS",  "PRP$", "WDT",
    "WP", "RP",  "TO", "PRP", "WRB", "PDT", "WP$", "MD", "JJR", "JJS"};

void normalize_abstract(Abstract& a) {
  std::vector<Token> out;
  out.reserve(a.tokens.size());
  for (Sentence& s : a.sentences) {
    const std::span<const Token> sentence(a.tokens.data() + s.first_token,
                                          s.end_token - s.first_token);
    auto normalized = normalize_tokens(sentence, a.text);
    s.first_token = out.size();
    out.insert(out.end(), std::make_move_iterator(normalized.begin()),
               std::make_move_iterator(normalized.end()));
    s.end_token = out.size();
  }
  a.tokens = std::move(out);
}

}  // namespace

bool is_blacklisted_pos(std::string_view pos) {
  return std::find(kPosBlacklist.begin(), kPosBlacklist.end(), pos) != kPosBlacklist.end();
}

std::vector<Candidate> filter_candidates(const Abstract& abstract) {
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < abstract.tokens.size(); ++i) {
    const Token& t = abstract.tokens[i];
    if (t.section == SectionClass::Conclusions) continue;
    if (is_blacklisted_pos(t.pos)) continue;
    out.push_back({out.size() + 1, i});
  }
  return out;
}

std::vector<std::string> audit_filtered_gold(const Abstract& abstract) {
  std::vector<std::string> warnings;
  for (const Token& t : abstract.tokens) {
    if (t.gold == Label::O) continue;
    if (t.section == SectionClass::Conclusions || is_blacklisted_pos(t.pos)) {
      warnings.push_back(abstract.id + ": gold " + std::string(to_string(t.gold)) + " token '" +
                         t.surface + "' (" + t.pos + ", " + std::string(to_string(t.section)) +
                         ") is not a candidate");
    }
  }
  return warnings;
}

std::array<std::size_t, 5> section_block_sizes(std::size_t sentence_count) {
  std::array<std::size_t, 5> sizes{};
  for (std::size_t b = 0; b < 5; ++b) {
    sizes[b] = sentence_count / 5 + (b < sentence_count % 5 ? 1 : 0);
  }
  return sizes;
}

void assign_sections_unstructured(Abstract& abstract) {
  constexpr std::array<SectionClass, 5> kOrder = {
      SectionClass::Background, SectionClass::Objective, SectionClass::Methods,
      SectionClass::Results, SectionClass::Conclusions};
  const auto sizes = section_block_sizes(abstract.sentences.size());
  std::size_t sentence = 0;
  for (std::size_t b = 0; b < 5; ++b) {
    for (std::size_t k = 0; k < sizes[b]; ++k, ++sentence) {
      const Sentence& s = abstract.sentences[sentence];
      for (std::size_t i = s.first_token; i < s.end_token; ++i) {
        abstract.tokens[i].section = kOrder[b];
      }
    }
  }
}

std::vector<std::string> title_words(std::string_view title, const Resources& resources) {
  Abstract t = make_abstract("", "", {{"", std::string(title)}});
  expand_abbreviations(t, resources.abbreviations, guess_abbreviations(t));
  normalize_abstract(t);
  std::vector<std::string> words;
  for (const Token& tok : t.tokens) {
    words.push_back(norm_tag_from_text(tok.normalized) ? tok.normalized : to_lower(tok.normalized));
  }
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  return words;
}

void preprocess(Abstract& abstract, const Resources& resources) {
  if (abstract.preprocessed) return;
  const AbbrevMap guessed = guess_abbreviations(abstract);
  expand_abbreviations(abstract, resources.abbreviations, guessed);
  normalize_abstract(abstract);
  tag_pos(abstract);
  chunk(abstract);
  assign_semantics(abstract, *resources.gazetteer);
  if (!abstract.structured) assign_sections_unstructured(abstract);
  abstract.title_words = title_words(abstract.title, resources);
  abstract.preprocessed = true;
}

}  // namespace evtab

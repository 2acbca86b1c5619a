#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evtab/labels.hpp"
#include "evtab/text.hpp"

namespace evtab {

struct Token {
  std::string surface;     // token text as seen by the pipeline
  std::string normalized;  // surface, or a normalization tag such as _MEAS_
  std::string pos;
  std::size_t chunk_id = 0;
  CharSpan span;                // offsets into Abstract::text
  std::size_t sentence = 0;     // abstract-wide sentence ordinal
  std::size_t sentence_index = 0;  // ordinal within its paragraph
  std::size_t paragraph = 0;
  SectionClass section = SectionClass::None;
  Label gold = Label::O;
  SemanticClass semantic = SemanticClass::None;
  bool in_brackets = false;

  friend bool operator==(const Token&, const Token&) = default;
};

struct Paragraph {
  std::string heading;
  SectionClass section = SectionClass::None;
  CharSpan span;

  friend bool operator==(const Paragraph&, const Paragraph&) = default;
};

struct Sentence {
  std::size_t paragraph = 0;
  std::size_t index_in_paragraph = 0;
  CharSpan span;
  std::size_t first_token = 0;  // [first_token, end_token)
  std::size_t end_token = 0;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct Chunk {
  std::size_t begin = 0;  // token range [begin, end)
  std::size_t end = 0;
  ChunkType type = ChunkType::Other;
  SemanticClass semantic = SemanticClass::None;

  friend bool operator==(const Chunk&, const Chunk&) = default;
};

struct GoldSpan {
  Label label = Label::O;
  CharSpan span;

  friend bool operator==(const GoldSpan&, const GoldSpan&) = default;
};

// One abstract. `text` is the paragraph bodies joined by '\n'; every span in
// the structure indexes it. Tokens are in reading order.
struct Abstract {
  std::string id;
  std::string title;
  std::string text;
  bool structured = false;
  std::vector<Paragraph> paragraphs;
  std::vector<GoldSpan> gold;
  std::map<std::string, std::string> abbrev_map;
  std::vector<Token> tokens;
  std::vector<Sentence> sentences;
  std::vector<Chunk> chunks;
  std::vector<std::string> title_words;  // lowercased, filled by preprocessing
  bool preprocessed = false;

  std::string_view original(const Token& t) const {
    return std::string_view(text).substr(t.span.begin, t.span.size());
  }
  std::string_view original(CharSpan s) const {
    return std::string_view(text).substr(s.begin, s.size());
  }
  const std::string& heading_of(const Token& t) const {
    return paragraphs.at(t.paragraph).heading;
  }

  friend bool operator==(const Abstract&, const Abstract&) = default;
};

struct ParagraphInput {
  std::string heading;  // empty for an unlabeled body
  std::string text;
};

// Section class of a paragraph heading; case-insensitive, NONE when unknown.
SectionClass section_class(std::string_view heading);

// Builds an abstract from raw paragraphs: sentence split, tokenization, and
// gold labels projected onto tokens by span overlap. `structured` defaults to
// "at least two labeled paragraphs".
Abstract make_abstract(std::string id, std::string title,
                       const std::vector<ParagraphInput>& paragraphs,
                       std::vector<GoldSpan> gold = {},
                       std::optional<bool> structured = std::nullopt);

// Re-projects gold spans onto the current tokens (used after re-tokenizing).
void project_gold(Abstract& abstract);

struct StrippedText {
  std::string text;
  std::vector<GoldSpan> gold;  // offsets into `text`
};

// Removes <P>, <A1>, <A2>, <OC>, <R1>, <R2> markup. Throws UnbalancedTag,
// OverlappingTags or UnknownTag.
StrippedText strip_annotations(std::string_view annotated);

// Annotated text as a single unlabeled paragraph.
Abstract parse_annotated(std::string_view annotated);

// Annotated text split into headed paragraphs.
Abstract parse_annotated(std::string id, std::string title,
                         const std::vector<ParagraphInput>& annotated);

// Inverse of parse_annotated: the abstract text with tags reinserted around
// the gold spans.
std::string render_annotated(const Abstract& abstract);

// Corpus file: a header line, then one JSON record per abstract.
inline constexpr std::string_view kCorpusFormat = "evtab-corpus";
inline constexpr int kCorpusVersion = 1;

void write_corpus(std::ostream& out, std::span<const Abstract> corpus);
std::vector<Abstract> read_corpus(std::istream& in);
std::string encode_corpus(std::span<const Abstract> corpus);
std::vector<Abstract> decode_corpus(std::string_view bytes);

void save_corpus(const std::string& path, std::span<const Abstract> corpus);
std::vector<Abstract> load_corpus(const std::string& path);

}  // namespace evtab

#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evtab/corpus.hpp"
#include "evtab/labels.hpp"

namespace evtab {

// ---------------------------------------------------------------------------
// Normalization tags

enum class NormTag : std::uint8_t {
  Num,
  Perc,
  Meas,
  ConfInt,
  ConfIntM,
  Range,
  Ratio,
  PVal,
  Frac,
  PeriodOfTime,
  GroupOne,
  Dose,
  Count,
  PercRange,
  MeasRange,
  Date
};

inline constexpr std::size_t kNumNormTags = 16;
// Type value of any word that is not a normalization tag.
inline constexpr int kNonTagType = 101;

std::string_view tag_text(NormTag t);  // "_NUM_", "_MEAS_", ...
std::optional<NormTag> norm_tag_from_text(std::string_view word);

// Equivalence-class id in [0, 15]. Tags whose values are directly comparable
// share a type: {NUM, MEAS, COUNT, DOSE}, {CONFINT, CONFINTM}, {PERC, PERCRANGE},
// {RANGE, MEASRANGE}; the rest are singletons.
int type_id(NormTag t);
// type_id of the tag `word`, or kNonTagType.
int word_type(std::string_view word);

// ---------------------------------------------------------------------------
// Abbreviations

using AbbrevMap = std::map<std::string, std::string>;

// Definitions of the form "long form (LF)": the parenthesized all-capitals
// word is matched right-to-left against the characters of the preceding
// words, its first letter anchored at a word start, within a window of at most
// |LF| non-stopword words. Plurals ("IOPs") and forms with digits or
// punctuation are ignored.
AbbrevMap guess_abbreviations(const Abstract& abstract);
AbbrevMap guess_abbreviations(std::string_view text);

// Replaces every token equal to a key with the words of its expansion.
// `guessed` wins over `dictionary`. Expansion tokens keep the short form's
// span; only the last expansion word keeps its gold label.
void expand_abbreviations(Abstract& abstract, const AbbrevMap& dictionary,
                          const AbbrevMap& guessed);

// Tab-separated "SHORT<TAB>Long Form" lines; '#' starts a comment.
AbbrevMap parse_abbreviations(std::string_view tsv);
const AbbrevMap& default_abbreviations();

// ---------------------------------------------------------------------------
// Numeric normalization

// Rewrites numeric constructions in one sentence's tokens as normalization
// tags. The pattern table is applied repeatedly until nothing changes; bare
// numbers become _NUM_ only once every other pattern is exhausted, which lets
// a trailing unit spread left across "x, y and z unit" lists. Each tag token
// spans the original text it replaced.
std::vector<Token> normalize_tokens(std::span<const Token> sentence, std::string_view text);

// Convenience for a single sentence string: tokens joined by single spaces.
std::string normalize_sentence(std::string_view sentence);

// Inverse of normalization for one token: the original text it covers.
std::string denormalize(const Abstract& abstract, const Token& token);

// ---------------------------------------------------------------------------
// POS tagging and chunking fallback for raw text

// Closed-class lexicon, suffix rules, default NN. Normalization tags and
// numbers are CD; bracket and colon tokens get their own Penn tags.
std::string fallback_pos(std::string_view word, bool sentence_initial);
void tag_pos(Abstract& abstract);

// Rule chunker: NP runs of determiners/adjectives/nouns/numbers, VP runs of
// verbs/modals/adverbs, PP single prepositions, everything else "other".
// Chunks partition each sentence.
void chunk(Abstract& abstract);

// ---------------------------------------------------------------------------
// Semantic classes

class Gazetteer {
 public:
  Gazetteer() = default;
  static Gazetteer parse(std::string_view tsv);
  static const Gazetteer& builtin();

  void add(std::string_view phrase, SemanticClass c);
  std::optional<SemanticClass> find(std::string_view phrase) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, SemanticClass> entries_;  // lowercase, single-spaced
};

// Rule patterns first, then gazetteer lookup on the whole chunk and on every
// suffix obtained by dropping words from the left.
SemanticClass classify_chunk(std::span<const std::string> words, const Gazetteer& gazetteer);

bool is_semantic_stopword(std::string_view word);
std::vector<SemanticClass> propagate_semantics(SemanticClass chunk_class,
                                               std::span<const std::string> words);

void assign_semantics(Abstract& abstract, const Gazetteer& gazetteer);

// ---------------------------------------------------------------------------
// Candidates and sections

bool is_blacklisted_pos(std::string_view pos);

struct Candidate {
  std::size_t index = 0;        // 1-based candidate index
  std::size_t token_index = 0;  // index into Abstract::tokens
};

// Drops tokens of CONCLUSIONS paragraphs and tokens with a blacklisted POS.
std::vector<Candidate> filter_candidates(const Abstract& abstract);

// Gold tokens that filtering removes; reported, never fatal.
std::vector<std::string> audit_filtered_gold(const Abstract& abstract);

// Five contiguous sentence blocks of near-equal size (earlier blocks take the
// remainder) labelled BACKGROUND..CONCLUSIONS.
std::array<std::size_t, 5> section_block_sizes(std::size_t sentence_count);
void assign_sections_unstructured(Abstract& abstract);

// ---------------------------------------------------------------------------
// Whole pipeline

struct Resources {
  AbbrevMap abbreviations = default_abbreviations();
  const Gazetteer* gazetteer = &Gazetteer::builtin();
};

// Abbreviation expansion, normalization, tagging (unless the abstract is
// already preprocessed), chunking, semantic classes and section guessing.
void preprocess(Abstract& abstract, const Resources& resources = {});

// Lowercased, expanded and normalized title words.
std::vector<std::string> title_words(std::string_view title, const Resources& resources);

}  // namespace evtab

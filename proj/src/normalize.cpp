#include <regex>

#include "evtab/preprocess.hpp"

namespace evtab {

namespace {

constexpr std::array<std::string_view, kNumNormTags> kTagText = {
    "_NUM_",   "_PERC_", "_MEAS_", "_CONFINT_", "_CONFINTM_", "_RANGE_",
    "_RATIO_", "_PVAL_", "_FRAC_", "_POFT_",    "_GONE_",     "_DOSE_",
    "_COUNT_", "_PERCRANGE_", "_MEASRANGE_", "_DATE_"};

constexpr std::array<int, kNumNormTags> kTypeId = {
    0,  // _NUM_
    1,  // _PERC_
    0,  // _MEAS_
    3,  // _CONFINT_
    3,  // _CONFINTM_
    5,  // _RANGE_
    6,  // _RATIO_
    7,  // _PVAL_
    8,  // _FRAC_
    9,  // _POFT_
    10, // _GONE_
    0,  // _DOSE_
    0,  // _COUNT_
    1,  // _PERCRANGE_
    5,  // _MEASRANGE_
    15, // _DATE_
};

// Building blocks. Tokens are rendered joined by single spaces, so " " marks
// a token boundary and " ?" an optional one.
const std::string kNum = R"([+-]?\d+(?:,\d{3})*(?:\.\d+)?)";
const std::string kUNum = R"(\d+(?:,\d{3})*(?:\.\d+)?)";
const std::string kPm = R"((?:\+/-|\+/−|±|\+-))";
const std::string kDash = R"((?:-|–|to))";
const std::string kUnit =
    R"((?:mmHg|mm Hg|cells/mm2|μm|µm|um|nm|mm|cm|mcg|µg|μg|mg|kg|g|mL|ml|dB|diopters?|dioptres?|logMAR|letters|microns?|degrees?|D))";
const std::string kTimeUnit = R"((?:hours?|days?|weeks?|months?|years?|minutes?))";
const std::string kMonth =
    R"((?:January|February|March|April|May|June|July|August|September|October|November|December|Jan|Feb|Mar|Apr|Jun|Jul|Aug|Sep|Sept|Oct|Nov|Dec))";
const std::string kEnd = R"((?=\s|$))";

const std::string kCiBody = R"((?:\d+(?:\.\d+)? ?% )?(?:CI|confidence interval)(?: [,:=])? )" +
                            kNum + R"( ?(?:-|–|to|,|;) ?)" + kNum;

struct Rule {
  NormTag tag;
  std::regex re;
};

std::regex make(const std::string& body) {
  return std::regex("(?:" + body + ")" + kEnd, std::regex::ECMAScript | std::regex::optimize);
}

const std::vector<Rule>& rules() {
  static const std::vector<Rule> table = [] {
    std::vector<Rule> t;
    t.push_back({NormTag::ConfIntM, make(kCiBody + " ?" + kUnit)});
    t.push_back({NormTag::ConfInt, make(kCiBody)});
    t.push_back({NormTag::PercRange, make(kNum + " ?%? ?" + kDash + " ?" + kNum + " ?%")});
    t.push_back({NormTag::MeasRange, make(kNum + " ?" + kDash + " ?" + kNum + " ?" + kUnit)});
    t.push_back({NormTag::PeriodOfTime,
                 make(kUNum + " ?" + kDash + " ?" + kUNum + " " + kTimeUnit + "|" + kUNum +
                      R"(-(?:hour|day|week|month|year)s?)")});
    t.push_back({NormTag::Dose,
                 make(kUNum + R"( ?(?:mg/kg|mg/day|mg/ml|mg/mL|µg/ml|μg/ml|mcg/ml|IU))")});
    t.push_back({NormTag::Meas, make(kNum + "(?: ?" + kPm + " ?" + kUNum + ")? ?" + kUnit)});
    t.push_back({NormTag::Perc, make(kNum + " ?%(?: ?" + kPm + " ?" + kUNum + " ?%)?|" + kNum +
                                     " ?" + kPm + " ?" + kUNum + " ?%")});
    t.push_back({NormTag::PVal, make(R"([Pp] ?(?:<=|>=|<|>|=|≤|≥) ?\d*\.?\d+)")});
    t.push_back({NormTag::Count, make(R"([nN] ?= ?\d+)")});
    t.push_back({NormTag::Date, make(kMonth + R"((?: \d{1,2}(?: ,)?)? (?:19|20)\d{2})")});
    t.push_back({NormTag::Frac, make(kUNum + " of " + kUNum)});
    t.push_back({NormTag::Ratio, make(kUNum + " ?[/:] ?" + kUNum)});
    t.push_back({NormTag::Range, make(kNum + " ?(?:-|–) ?" + kNum + "|" + kNum + " to " + kNum)});
    t.push_back({NormTag::GroupOne, make(R"((?:[Gg]roup|[Aa]rm) (?:1|2|one|two|A|B|I|II))")});
    // A unit at the end of a list applies to every item of the list.
    t.push_back({NormTag::Meas,
                 make(kNum + R"((?= (?:, )?(?:,|and|or|vs\.?|versus) _MEAS_))")});
    t.push_back({NormTag::Perc,
                 make(kNum + R"((?= (?:, )?(?:,|and|or|vs\.?|versus) _PERC_))")});
    return t;
  }();
  return table;
}

const Rule& number_rule() {
  static const Rule r{NormTag::Num, make(kNum)};
  return r;
}

// One left-to-right sweep of `rule` over the sentence. Matches must start at
// a token start; kEnd guarantees they stop at a token end.
bool apply_rule(std::vector<Token>& tokens, const Rule& rule, std::string_view text) {
  if (tokens.empty()) return false;
  std::string rendered;
  std::vector<std::size_t> starts;
  std::vector<std::size_t> ends;
  for (const Token& t : tokens) {
    if (!rendered.empty()) rendered.push_back(' ');
    starts.push_back(rendered.size());
    rendered += t.normalized;
    ends.push_back(rendered.size());
  }

  std::vector<Token> out;
  out.reserve(tokens.size());
  bool changed = false;
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::smatch m;
    const auto first = rendered.cbegin() + static_cast<std::ptrdiff_t>(starts[i]);
    auto flags = std::regex_constants::match_continuous;
    if (i > 0) flags |= std::regex_constants::match_prev_avail;
    if (!norm_tag_from_text(tokens[i].normalized) &&
        std::regex_search(first, rendered.cend(), m, rule.re, flags) && m.length(0) > 0) {
      const std::size_t match_end = starts[i] + static_cast<std::size_t>(m.length(0));
      std::size_t j = i;
      while (j < tokens.size() && ends[j] < match_end) ++j;
      if (j < tokens.size() && ends[j] == match_end) {
        Token tag = tokens[i];
        tag.span = {tokens[i].span.begin, tokens[i].span.end};
        for (std::size_t k = i; k <= j; ++k) {
          tag.span.begin = std::min(tag.span.begin, tokens[k].span.begin);
          tag.span.end = std::max(tag.span.end, tokens[k].span.end);
          if (tag.gold == Label::O) tag.gold = tokens[k].gold;
        }
        tag.surface = std::string(text.substr(tag.span.begin, tag.span.size()));
        tag.normalized = std::string(tag_text(rule.tag));
        out.push_back(std::move(tag));
        changed = true;
        i = j + 1;
        continue;
      }
    }
    out.push_back(tokens[i]);
    ++i;
  }
  if (changed) tokens = std::move(out);
  return changed;
}

}  // namespace

std::string_view tag_text(NormTag t) { return kTagText[static_cast<std::size_t>(t)]; }

std::optional<NormTag> norm_tag_from_text(std::string_view word) {
  if (word.size() < 3 || word.front() != '_' || word.back() != '_') return std::nullopt;
  for (std::size_t i = 0; i < kNumNormTags; ++i) {
    if (kTagText[i] == word) return static_cast<NormTag>(i);
  }
  return std::nullopt;
}

int type_id(NormTag t) { return kTypeId[static_cast<std::size_t>(t)]; }

int word_type(std::string_view word) {
  const auto tag = norm_tag_from_text(word);
  return tag ? type_id(*tag) : kNonTagType;
}

std::vector<Token> normalize_tokens(std::span<const Token> sentence, std::string_view text) {
  std::vector<Token> tokens(sentence.begin(), sentence.end());
  for (;;) {
    bool changed = false;
    for (const Rule& rule : rules()) changed |= apply_rule(tokens, rule, text);
    if (!changed) changed = apply_rule(tokens, number_rule(), text);
    if (!changed) break;
  }
  return tokens;
}

std::string normalize_sentence(std::string_view sentence) {
  std::vector<Token> tokens;
  for (const CharSpan& s : tokenize(sentence, {0, sentence.size()})) {
    Token t;
    t.surface = std::string(sentence.substr(s.begin, s.size()));
    t.normalized = t.surface;
    t.span = s;
    tokens.push_back(std::move(t));
  }
  std::string out;
  for (const Token& t : normalize_tokens(tokens, sentence)) {
    if (!out.empty()) out.push_back(' ');
    out += t.normalized;
  }
  return out;
}

std::string denormalize(const Abstract& abstract, const Token& token) {
  return std::string(abstract.original(token));
}

}  // namespace evtab

#include <algorithm>
#include <set>
#include <sstream>

#include "embedded_data.hpp"
#include "evtab/preprocess.hpp"

namespace evtab {

namespace {

const std::set<std::string, std::less<>> kStopwords = {
    // coordination and negation
    "and", "or", "for", "not", "nor", "but",
    // determiners
    "the", "a", "an", "this", "that", "these", "those", "each", "every", "both", "either",
    "neither", "no", "all", "some", "any", "another",
    // prepositions
    "of", "in", "with", "at", "by", "from", "on", "to", "after", "before", "during", "between",
    "among", "than", "versus", "vs", "vs.", "via", "within", "without", "under", "over", "into",
    "per", "as", "about", "against", "across", "through", "throughout", "until", "upon",
    "despite", "toward", "towards"};

const std::set<std::string, std::less<>> kArmHeads = {"group", "groups", "arm", "arms"};
const std::set<std::string, std::less<>> kPatientHeads = {
    "patients", "patient", "subjects",  "subject",  "women",   "men",    "participants",
    "volunteers", "individuals", "children", "adults", "persons", "people"};
const std::set<std::string, std::less<>> kTimeUnits = {
    "hour", "hours", "day", "days", "week", "weeks", "month", "months", "year", "years",
    "minute", "minutes"};
const std::set<std::string, std::less<>> kFrequencyWords = {
    "once", "twice", "thrice", "daily", "bid", "b.i.d.", "tid", "t.i.d.", "qd", "q.d.",
    "nightly", "weekly", "hourly"};

std::string key_of(std::string_view phrase) { return to_lower(squeeze_spaces(phrase)); }

}  // namespace

Gazetteer Gazetteer::parse(std::string_view tsv) {
  Gazetteer g;
  std::istringstream in{std::string(tsv)};
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    const auto cls = semantic_from_string(trim_copy(line.substr(tab + 1)));
    if (!cls) continue;
    g.add(line.substr(0, tab), *cls);
  }
  return g;
}

const Gazetteer& Gazetteer::builtin() {
  static const Gazetteer g = parse(data::kGazetteerTsv);
  return g;
}

void Gazetteer::add(std::string_view phrase, SemanticClass c) {
  const std::string key = key_of(phrase);
  if (!key.empty()) entries_.emplace(key, c);
}

std::optional<SemanticClass> Gazetteer::find(std::string_view phrase) const {
  const auto it = entries_.find(key_of(phrase));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

SemanticClass classify_chunk(std::span<const std::string> words, const Gazetteer& gazetteer) {
  if (words.empty()) return SemanticClass::None;
  std::vector<std::string> lower;
  lower.reserve(words.size());
  for (const auto& w : words) lower.push_back(norm_tag_from_text(w) ? w : to_lower(w));

  const std::string& last = lower.back();
  const auto has = [&](std::string_view w) {
    return std::find(lower.begin(), lower.end(), w) != lower.end();
  };
  if (has(tag_text(NormTag::GroupOne)) || kArmHeads.contains(last)) return SemanticClass::Arm;
  if (kPatientHeads.contains(last)) return SemanticClass::Patients;
  if (std::any_of(lower.begin(), lower.end(),
                  [](const std::string& w) { return kFrequencyWords.contains(w); }))
    return SemanticClass::Frequency;
  if (has(tag_text(NormTag::PeriodOfTime))) return SemanticClass::PeriodOfTime;
  for (std::size_t i = 0; i + 1 < lower.size(); ++i) {
    if (lower[i] == tag_text(NormTag::Num) && kTimeUnits.contains(lower[i + 1]))
      return SemanticClass::PeriodOfTime;
  }

  // Whole chunk first, then drop one word at a time from the left.
  for (std::size_t start = 0; start < lower.size(); ++start) {
    std::string phrase;
    for (std::size_t k = start; k < lower.size(); ++k) {
      if (!phrase.empty()) phrase.push_back(' ');
      phrase += lower[k];
    }
    if (const auto c = gazetteer.find(phrase)) return *c;
  }
  return SemanticClass::None;
}

bool is_semantic_stopword(std::string_view word) { return kStopwords.contains(to_lower(word)); }

std::vector<SemanticClass> propagate_semantics(SemanticClass chunk_class,
                                               std::span<const std::string> words) {
  std::vector<SemanticClass> out;
  out.reserve(words.size());
  for (const auto& w : words) {
    out.push_back(is_semantic_stopword(w) ? SemanticClass::None : chunk_class);
  }
  return out;
}

void assign_semantics(Abstract& abstract, const Gazetteer& gazetteer) {
  for (Chunk& c : abstract.chunks) {
    std::vector<std::string> words;
    for (std::size_t i = c.begin; i < c.end; ++i) words.push_back(abstract.tokens[i].normalized);
    c.semantic = classify_chunk(words, gazetteer);
    const auto per_token = propagate_semantics(c.semantic, words);
    for (std::size_t i = c.begin; i < c.end; ++i) abstract.tokens[i].semantic = per_token[i - c.begin];
  }
}

}  // namespace evtab

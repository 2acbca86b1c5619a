#include "evtab/features.hpp"

#include <algorithm>

#include "evtab/errors.hpp"
#include "evtab/preprocess.hpp"

namespace evtab {

std::uint32_t FeatureDictionary::intern(std::string_view name) {
  if (auto id = find(name)) return *id;
  if (frozen_) throw Error("feature dictionary is frozen");
  const auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return id;
}

std::optional<std::uint32_t> FeatureDictionary::find(std::string_view name) const {
  const auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

FeatureDictionary FeatureDictionary::from_names(std::vector<std::string> names) {
  FeatureDictionary d;
  for (auto& n : names) {
    if (d.ids_.contains(n)) throw Error("duplicate feature name: " + n);
    d.intern(n);
  }
  d.freeze();
  return d;
}

int position_bin(std::size_t i, std::size_t n) {
  if (n <= 1) return 0;
  // ceil(9 i / (n - 1)): five tokens give 0, 3, 5, 7, 9.
  return static_cast<int>((9 * i + n - 2) / (n - 1));
}

namespace {

std::string word_form(const Token& t) {
  return norm_tag_from_text(t.normalized) ? t.normalized : to_lower(t.normalized);
}

const char* flag(bool b) { return b ? "T" : "F"; }

}  // namespace

std::vector<std::string> extract_features(const Abstract& abstract, std::size_t token_index) {
  const Token& t = abstract.tokens.at(token_index);
  const Sentence& s = abstract.sentences.at(t.sentence);
  const std::string word = word_form(t);
  const std::string sem(to_string(t.semantic));
  const std::string section(to_string(t.section));
  const bool in_title =
      std::binary_search(abstract.title_words.begin(), abstract.title_words.end(), word);

  std::vector<std::string> f;
  f.reserve(24);
  f.push_back("w=" + word);
  const std::string prev =
      token_index > s.first_token ? word_form(abstract.tokens[token_index - 1]) : "none";
  f.push_back("bi=" + prev + "|" + word);
  for (int d = -2; d <= 2; ++d) {
    const auto k = static_cast<long>(token_index) + d;
    const bool inside = k >= static_cast<long>(s.first_token) && k < static_cast<long>(s.end_token);
    f.push_back("pos[" + std::to_string(d) + "]=" +
                (inside ? abstract.tokens[static_cast<std::size_t>(k)].pos : "none"));
  }
  f.push_back("sem=" + sem);
  f.push_back(std::string("title=") + flag(in_title));
  f.push_back(std::string("brk=") + flag(t.in_brackets));
  f.push_back("pbin=" + std::to_string(position_bin(token_index - s.first_token,
                                                    s.end_token - s.first_token)));
  if (t.chunk_id < abstract.chunks.size()) {
    const Chunk& c = abstract.chunks[t.chunk_id];
    for (std::size_t k = c.begin; k < c.end; ++k) f.push_back("cbow=" + word_form(abstract.tokens[k]));
    f.push_back("ctype=" + std::string(to_string(c.type)));
  } else {
    f.push_back("ctype=none");
  }
  f.push_back("spos=" + std::to_string(std::min<std::size_t>(t.sentence_index, 9)));
  const std::string& heading = abstract.heading_of(t);
  f.push_back("head=" + (heading.empty() ? std::string("none") : to_upper(heading)));
  f.push_back("sec=" + section);
  f.push_back("sem*sec=" + sem + "|" + section);
  f.push_back(std::string("title*sem=") + flag(in_title) + "|" + sem);
  return f;
}

FeatureDictionary fit_dictionary(std::span<const std::vector<std::string>> feature_sets) {
  FeatureDictionary d;
  for (const auto& set : feature_sets) {
    for (const auto& name : set) d.intern(name);
  }
  d.freeze();
  return d;
}

FeatureVector vectorize(std::span<const std::string> features, const FeatureDictionary& dictionary,
                        std::size_t candidate) {
  if (!dictionary.frozen()) throw Error("vectorize requires a frozen dictionary");
  FeatureVector v;
  v.candidate = candidate;
  v.ids.reserve(features.size());
  for (const auto& name : features) {
    if (auto id = dictionary.find(name)) v.ids.push_back(*id);
  }
  std::sort(v.ids.begin(), v.ids.end());
  v.ids.erase(std::unique(v.ids.begin(), v.ids.end()), v.ids.end());
  return v;
}

}  // namespace evtab

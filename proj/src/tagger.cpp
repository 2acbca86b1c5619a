#include <cctype>
#include <unordered_map>

#include "evtab/preprocess.hpp"

namespace evtab {

namespace {

const std::unordered_map<std::string, std::string>& lexicon() {
  static const std::unordered_map<std::string, std::string> lex = [] {
    std::unordered_map<std::string, std::string> m;
    auto add = [&m](std::initializer_list<const char*> words, const char* tag) {
      for (const char* w : words) m.emplace(w, tag);
    };
    add({"the", "a", "an", "this", "that", "these", "those", "each", "every", "both", "no",
         "any", "all", "some", "another"},
        "DT");
    add({"of", "in", "with", "for", "at", "by", "from", "on", "after", "before", "during",
         "between", "among", "than", "versus", "vs", "vs.", "via", "within", "without", "under",
         "over", "into", "per", "whether", "because", "since", "while", "although", "though",
         "if", "as", "about", "against", "across", "through", "throughout", "until", "upon",
         "despite", "toward", "towards", "like", "whereas"},
        "IN");
    add({"to"}, "TO");
    add({"and", "or", "but", "nor", "either", "neither"}, "CC");
    add({"it", "they", "we", "he", "she", "them", "us", "i", "you", "him"}, "PRP");
    add({"its", "their", "our", "his", "her", "my", "your"}, "PRP$");
    add({"can", "could", "may", "might", "must", "shall", "should", "will", "would"}, "MD");
    add({"there"}, "EX");
    add({"which", "whichever"}, "WDT");
    add({"who", "what", "whom"}, "WP");
    add({"whose"}, "WP$");
    add({"when", "where", "how", "why"}, "WRB");
    add({"et", "al", "al."}, "FW");
    add({"higher", "lower", "greater", "better", "worse", "more", "less", "fewer", "larger",
         "smaller", "longer", "shorter", "faster", "slower"},
        "JJR");
    add({"highest", "lowest", "greatest", "best", "worst", "most", "least", "largest",
         "smallest", "longest"},
        "JJS");
    add({"was", "did", "had"}, "VBD");
    add({"were"}, "VBD");
    add({"is", "has", "does"}, "VBZ");
    add({"are", "have", "do"}, "VBP");
    add({"be"}, "VB");
    add({"been"}, "VBN");
    add({"being"}, "VBG");
    add({"not", "also", "very", "only", "however", "then", "twice", "once", "respectively"},
        "RB");
    return m;
  }();
  return lex;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool is_number(std::string_view w) {
  bool digit = false;
  for (char c : w) {
    if (std::isdigit(static_cast<unsigned char>(c))) digit = true;
    else if (c != '.' && c != ',' && c != '-' && c != '+') return false;
  }
  return digit;
}

}  // namespace

std::string fallback_pos(std::string_view word, bool sentence_initial) {
  if (word.empty()) return "SYM";
  if (norm_tag_from_text(word) || is_number(word)) return "CD";
  if (word == "(" || word == "[" || word == "{") return "(";
  if (word == ")" || word == "]" || word == "}") return ")";
  if (word == ":" || word == ";" || word == "-" || word == "--") return ":";
  if (word == ",") return ",";
  if (word == "." || word == "?" || word == "!") return ".";
  if (word == "\"" || word == "'") return "''";
  if (!std::isalnum(static_cast<unsigned char>(word[0])) && word.size() == 1) return "SYM";

  const std::string lower = to_lower(word);
  if (auto it = lexicon().find(lower); it != lexicon().end()) return it->second;

  const bool capital = std::isupper(static_cast<unsigned char>(word[0])) != 0;
  if (capital && !sentence_initial) return "NNP";
  if (lower.size() > 4 && ends_with(lower, "ly")) return "RB";
  if (lower.size() > 4 && ends_with(lower, "ing")) return "VBG";
  if (lower.size() > 4 && ends_with(lower, "ed")) return "VBN";
  for (std::string_view suf : {"ous", "ive", "ical", "ful", "less", "able", "ible", "ary", "ar"}) {
    if (lower.size() > suf.size() + 2 && ends_with(lower, suf)) return "JJ";
  }
  if (lower.size() > 3 && ends_with(lower, "s") && !ends_with(lower, "ss") &&
      !ends_with(lower, "us") && !ends_with(lower, "is"))
    return "NNS";
  return "NN";
}

void tag_pos(Abstract& abstract) {
  for (const Sentence& s : abstract.sentences) {
    for (std::size_t i = s.first_token; i < s.end_token; ++i) {
      Token& t = abstract.tokens[i];
      t.pos = fallback_pos(t.normalized, i == s.first_token);
    }
  }
}

namespace {

enum class Group { Noun, NounStart, Verb, Prep, Other };

Group group_of(std::string_view pos) {
  if (pos == "DT" || pos == "PDT" || pos == "PRP$") return Group::NounStart;
  if (pos == "JJ" || pos == "JJR" || pos == "JJS" || pos == "CD" || pos == "POS" ||
      pos.starts_with("NN"))
    return Group::Noun;
  if (pos.starts_with("VB") || pos == "MD" || pos.starts_with("RB")) return Group::Verb;
  if (pos == "IN" || pos == "TO") return Group::Prep;
  return Group::Other;
}

}  // namespace

void chunk(Abstract& abstract) {
  abstract.chunks.clear();
  for (const Sentence& s : abstract.sentences) {
    std::size_t i = s.first_token;
    while (i < s.end_token) {
      const Group g = group_of(abstract.tokens[i].pos);
      std::size_t j = i + 1;
      ChunkType type = ChunkType::Other;
      if (g == Group::Noun || g == Group::NounStart) {
        type = ChunkType::NP;
        while (j < s.end_token && group_of(abstract.tokens[j].pos) == Group::Noun) ++j;
      } else if (g == Group::Verb) {
        type = ChunkType::VP;
        while (j < s.end_token && group_of(abstract.tokens[j].pos) == Group::Verb) ++j;
      } else if (g == Group::Prep) {
        type = ChunkType::PP;
      }
      const std::size_t id = abstract.chunks.size();
      abstract.chunks.push_back({i, j, type, SemanticClass::None});
      for (std::size_t k = i; k < j; ++k) abstract.tokens[k].chunk_id = id;
      i = j;
    }
  }
}

}  // namespace evtab

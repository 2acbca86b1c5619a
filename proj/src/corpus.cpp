#include "evtab/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "evtab/errors.hpp"

namespace evtab {

using nlohmann::json;

namespace {

struct HeadingEntry {
  std::string_view heading;
  SectionClass section;
};

// Known PubMed section labels.
constexpr std::array<HeadingEntry, 36> kHeadings = {{
    {"INTRODUCTION", SectionClass::Background},
    {"TRIAL REGISTRATION", SectionClass::Background},
    {"BACKGROUND", SectionClass::Background},
    {"FINANCIAL DISCLOSURE(S)", SectionClass::Background},
    {"FINANCIAL DISCLOSURE", SectionClass::Background},
    {"FINANCIAL DISCLOSURES", SectionClass::Background},
    {"CLINICAL TRIAL REGISTRATION", SectionClass::Background},
    {"AIMS", SectionClass::Objective},
    {"BACKGROUND/AIMS", SectionClass::Objective},
    {"AIM", SectionClass::Objective},
    {"PURPOSE", SectionClass::Objective},
    {"OBJECTIVE", SectionClass::Objective},
    {"INTRODUCTION AND PURPOSE", SectionClass::Objective},
    {"SETTING", SectionClass::Methods},
    {"PATIENTS AND METHODS", SectionClass::Methods},
    {"METHODS", SectionClass::Methods},
    {"STUDY DESIGN AND METHODS", SectionClass::Methods},
    {"RESEARCH DESIGN AND METHODS", SectionClass::Methods},
    {"STATISTICS", SectionClass::Methods},
    {"SUBJECTS AND METHODS", SectionClass::Methods},
    {"METHOD", SectionClass::Methods},
    {"PARTICIPANTS", SectionClass::Methods},
    {"MAIN OUTCOME MEASURES", SectionClass::Methods},
    {"DESIGN", SectionClass::Methods},
    {"OUTCOME MEASUREMENT", SectionClass::Methods},
    {"INTERVENTIONS", SectionClass::Methods},
    {"MATERIALS AND METHODS", SectionClass::Methods},
    {"INTERVENTION", SectionClass::Methods},
    {"RESULTS", SectionClass::Results},
    {"FINDINGS", SectionClass::Results},
    {"MAIN RESULTS", SectionClass::Results},
    {"APPLICATION TO CLINICAL PRACTICE", SectionClass::Conclusions},
    {"CONCLUSION", SectionClass::Conclusions},
    {"CONCLUSIONS", SectionClass::Conclusions},
    {"DISCUSSION", SectionClass::Conclusions},
    {"OBJECTIVES", SectionClass::Objective},
}};

bool is_tag_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

// Parses "<name>" or "</name>" at annotated[pos]. Returns the tag length, or 0
// if the text at pos is not tag-shaped.
std::size_t match_tag(std::string_view s, std::size_t pos, bool& closing,
                      std::string_view& name) {
  std::size_t i = pos + 1;
  closing = false;
  if (i < s.size() && s[i] == '/') {
    closing = true;
    ++i;
  }
  if (i >= s.size() || !std::isalpha(static_cast<unsigned char>(s[i]))) return 0;
  const std::size_t name_begin = i;
  while (i < s.size() && is_tag_name_char(s[i])) ++i;
  if (i >= s.size() || s[i] != '>') return 0;
  name = s.substr(name_begin, i - name_begin);
  return i + 1 - pos;
}

CharSpan trimmed(std::string_view text, CharSpan s) {
  while (s.begin < s.end && std::isspace(static_cast<unsigned char>(text[s.begin]))) ++s.begin;
  while (s.end > s.begin && std::isspace(static_cast<unsigned char>(text[s.end - 1]))) --s.end;
  return s;
}

}  // namespace

SectionClass section_class(std::string_view heading) {
  std::string key = to_upper(squeeze_spaces(heading));
  while (!key.empty() && (key.back() == ':' || key.back() == '.')) key.pop_back();
  for (const auto& e : kHeadings) {
    if (e.heading == key) return e.section;
  }
  if (key.find("METHOD") != std::string::npos) return SectionClass::Methods;
  if (key.find("RESULT") != std::string::npos || key.find("FINDING") != std::string::npos)
    return SectionClass::Results;
  if (key.find("CONCLU") != std::string::npos) return SectionClass::Conclusions;
  return SectionClass::None;
}

void project_gold(Abstract& abstract) {
  for (Token& t : abstract.tokens) {
    t.gold = Label::O;
    for (const GoldSpan& g : abstract.gold) {
      if (g.span.overlaps(t.span)) {
        t.gold = g.label;
        break;
      }
    }
  }
}

Abstract make_abstract(std::string id, std::string title,
                       const std::vector<ParagraphInput>& paragraphs,
                       std::vector<GoldSpan> gold,
                       std::optional<bool> structured) {
  Abstract a;
  a.id = std::move(id);
  a.title = std::move(title);
  a.gold = std::move(gold);

  std::size_t labeled = 0;
  for (const auto& p : paragraphs) {
    if (!trim_copy(p.heading).empty()) ++labeled;
  }
  a.structured = structured.value_or(labeled >= 2);

  for (std::size_t i = 0; i < paragraphs.size(); ++i) {
    if (i > 0) a.text.push_back('\n');
    Paragraph para;
    para.heading = trim_copy(paragraphs[i].heading);
    para.span.begin = a.text.size();
    a.text += paragraphs[i].text;
    para.span.end = a.text.size();
    para.section = a.structured ? section_class(para.heading) : SectionClass::None;
    a.paragraphs.push_back(std::move(para));
  }

  // In a structured abstract every paragraph needs a concrete class: unknown
  // headings inherit from the previous known paragraph, or the next one.
  if (a.structured) {
    std::optional<SectionClass> last;
    for (auto& p : a.paragraphs) {
      if (p.section != SectionClass::None) last = p.section;
      else if (last) p.section = *last;
    }
    std::optional<SectionClass> next;
    for (auto it = a.paragraphs.rbegin(); it != a.paragraphs.rend(); ++it) {
      if (it->section != SectionClass::None) next = it->section;
      else it->section = next.value_or(SectionClass::Background);
    }
  }

  const std::string_view text(a.text);
  for (std::size_t pi = 0; pi < a.paragraphs.size(); ++pi) {
    const Paragraph& para = a.paragraphs[pi];
    const auto local = split_sentences(text.substr(para.span.begin, para.span.size()));
    int depth = 0;
    for (std::size_t si = 0; si < local.size(); ++si) {
      Sentence s;
      s.paragraph = pi;
      s.index_in_paragraph = si;
      s.span = {para.span.begin + local[si].begin, para.span.begin + local[si].end};
      s.first_token = a.tokens.size();
      for (const CharSpan& ts : tokenize(text, s.span)) {
        Token t;
        t.surface = std::string(text.substr(ts.begin, ts.size()));
        t.normalized = t.surface;
        t.span = ts;
        t.sentence = a.sentences.size();
        t.sentence_index = si;
        t.paragraph = pi;
        t.section = para.section;
        if (t.surface == "(" || t.surface == "[") ++depth;
        t.in_brackets = depth > 0;
        if ((t.surface == ")" || t.surface == "]") && depth > 0) --depth;
        a.tokens.push_back(std::move(t));
      }
      s.end_token = a.tokens.size();
      a.sentences.push_back(s);
    }
  }
  project_gold(a);
  return a;
}

StrippedText strip_annotations(std::string_view annotated) {
  StrippedText out;
  out.text.reserve(annotated.size());
  Label open = Label::O;  // O: no tag open
  std::size_t open_at = 0;
  std::size_t i = 0;
  while (i < annotated.size()) {
    if (annotated[i] == '<') {
      bool closing = false;
      std::string_view name;
      const std::size_t len = match_tag(annotated, i, closing, name);
      if (len > 0) {
        const auto label = label_from_string(name);
        if (!label || *label == Label::O)
          throw UnknownTag("unknown annotation tag <" + std::string(name) + "> at offset " +
                           std::to_string(i));
        if (!closing) {
          if (open != Label::O)
            throw OverlappingTags("tag <" + std::string(name) + "> opened inside <" +
                                  std::string(to_string(open)) + "> at offset " +
                                  std::to_string(i));
          open = *label;
          open_at = out.text.size();
        } else {
          if (open == Label::O)
            throw UnbalancedTag("closing </" + std::string(name) +
                                "> without opening tag at offset " + std::to_string(i));
          if (open != *label)
            throw OverlappingTags("</" + std::string(name) + "> closes <" +
                                  std::string(to_string(open)) + "> at offset " +
                                  std::to_string(i));
          const CharSpan span = trimmed(out.text, {open_at, out.text.size()});
          if (!span.empty()) out.gold.push_back({*label, span});
          open = Label::O;
        }
        i += len;
        continue;
      }
    }
    out.text.push_back(annotated[i]);
    ++i;
  }
  if (open != Label::O)
    throw UnbalancedTag("tag <" + std::string(to_string(open)) + "> is never closed");
  return out;
}

Abstract parse_annotated(std::string_view annotated) {
  StrippedText s = strip_annotations(annotated);
  return make_abstract("", "", {{"", std::move(s.text)}}, std::move(s.gold));
}

Abstract parse_annotated(std::string id, std::string title,
                         const std::vector<ParagraphInput>& annotated) {
  std::vector<ParagraphInput> plain;
  std::vector<GoldSpan> gold;
  std::size_t offset = 0;
  for (std::size_t i = 0; i < annotated.size(); ++i) {
    if (i > 0) ++offset;  // '\n' separator
    StrippedText s = strip_annotations(annotated[i].text);
    for (GoldSpan g : s.gold) {
      g.span.begin += offset;
      g.span.end += offset;
      gold.push_back(g);
    }
    offset += s.text.size();
    plain.push_back({annotated[i].heading, std::move(s.text)});
  }
  return make_abstract(std::move(id), std::move(title), plain, std::move(gold));
}

std::string render_annotated(const Abstract& abstract) {
  std::vector<GoldSpan> gold = abstract.gold;
  std::sort(gold.begin(), gold.end(),
            [](const GoldSpan& a, const GoldSpan& b) { return a.span.begin < b.span.begin; });
  std::string out;
  std::size_t pos = 0;
  for (const GoldSpan& g : gold) {
    out.append(abstract.text, pos, g.span.begin - pos);
    const std::string name(to_string(g.label));
    out += "<" + name + ">";
    out.append(abstract.text, g.span.begin, g.span.size());
    out += "</" + name + ">";
    pos = g.span.end;
  }
  out.append(abstract.text, pos, std::string::npos);
  return out;
}

// ---------------------------------------------------------------------------
// Corpus file I/O

namespace {

json encode_abstract(const Abstract& a) {
  json j;
  j["id"] = a.id;
  j["title"] = a.title;
  j["structured"] = a.structured;
  json paragraphs = json::array();
  for (const auto& p : a.paragraphs) {
    paragraphs.push_back({{"heading", p.heading},
                          {"section", to_string(p.section)},
                          {"text", a.text.substr(p.span.begin, p.span.size())}});
  }
  j["paragraphs"] = std::move(paragraphs);
  json gold = json::array();
  for (const auto& g : a.gold) gold.push_back({to_string(g.label), g.span.begin, g.span.end});
  j["gold"] = std::move(gold);
  j["abbrev"] = a.abbrev_map;
  j["preprocessed"] = a.preprocessed;
  if (!a.preprocessed) return j;

  j["title_words"] = a.title_words;
  json sentences = json::array();
  for (const auto& s : a.sentences) {
    sentences.push_back({s.paragraph, s.index_in_paragraph, s.span.begin, s.span.end,
                         s.first_token, s.end_token});
  }
  j["sentences"] = std::move(sentences);
  json chunks = json::array();
  for (const auto& c : a.chunks) {
    chunks.push_back({c.begin, c.end, to_string(c.type), to_string(c.semantic)});
  }
  j["chunks"] = std::move(chunks);
  json tokens = json::array();
  for (const auto& t : a.tokens) {
    tokens.push_back({t.surface, t.normalized, t.pos, t.chunk_id, t.span.begin, t.span.end,
                      t.sentence, t.sentence_index, t.paragraph, to_string(t.section),
                      to_string(t.gold), to_string(t.semantic), t.in_brackets});
  }
  j["tokens"] = std::move(tokens);
  return j;
}

template <typename Enum, typename Fn>
Enum parse_enum(const json& v, Fn fn, const char* what) {
  const auto parsed = fn(v.get<std::string>());
  if (!parsed) throw std::invalid_argument(std::string("bad ") + what + ": " + v.dump());
  return *parsed;
}

void check_span(const CharSpan& s, std::size_t limit, const char* what) {
  if (s.begin > s.end || s.end > limit)
    throw std::invalid_argument(std::string(what) + " span out of range");
}

Abstract decode_abstract(const json& j) {
  std::vector<ParagraphInput> paragraphs;
  std::vector<SectionClass> sections;
  for (const auto& p : j.at("paragraphs")) {
    paragraphs.push_back({p.at("heading").get<std::string>(), p.at("text").get<std::string>()});
    sections.push_back(parse_enum<SectionClass>(
        p.at("section"), [](std::string_view s) { return section_from_string(s); }, "section"));
  }
  std::vector<GoldSpan> gold;
  for (const auto& g : j.at("gold")) {
    GoldSpan s;
    s.label = parse_enum<Label>(g.at(0), [](std::string_view x) { return label_from_string(x); },
                                "label");
    if (s.label == Label::O) throw std::invalid_argument("gold span labelled O");
    s.span = {g.at(1).get<std::size_t>(), g.at(2).get<std::size_t>()};
    gold.push_back(s);
  }

  Abstract a = make_abstract(j.at("id").get<std::string>(), j.at("title").get<std::string>(),
                             paragraphs, std::move(gold), j.at("structured").get<bool>());
  for (const auto& g : a.gold) check_span(g.span, a.text.size(), "gold");
  for (std::size_t i = 0; i < sections.size(); ++i) a.paragraphs[i].section = sections[i];
  for (auto& t : a.tokens) t.section = a.paragraphs[t.paragraph].section;
  a.abbrev_map = j.value("abbrev", std::map<std::string, std::string>{});
  a.preprocessed = j.value("preprocessed", false);
  if (!a.preprocessed) return a;

  a.title_words = j.at("title_words").get<std::vector<std::string>>();
  a.sentences.clear();
  for (const auto& s : j.at("sentences")) {
    Sentence x;
    x.paragraph = s.at(0).get<std::size_t>();
    x.index_in_paragraph = s.at(1).get<std::size_t>();
    x.span = {s.at(2).get<std::size_t>(), s.at(3).get<std::size_t>()};
    x.first_token = s.at(4).get<std::size_t>();
    x.end_token = s.at(5).get<std::size_t>();
    check_span(x.span, a.text.size(), "sentence");
    a.sentences.push_back(x);
  }
  a.chunks.clear();
  for (const auto& c : j.at("chunks")) {
    Chunk x;
    x.begin = c.at(0).get<std::size_t>();
    x.end = c.at(1).get<std::size_t>();
    x.type = parse_enum<ChunkType>(
        c.at(2), [](std::string_view s) { return chunk_type_from_string(s); }, "chunk type");
    x.semantic = parse_enum<SemanticClass>(
        c.at(3), [](std::string_view s) { return semantic_from_string(s); }, "semantic class");
    a.chunks.push_back(x);
  }
  a.tokens.clear();
  for (const auto& t : j.at("tokens")) {
    Token x;
    x.surface = t.at(0).get<std::string>();
    x.normalized = t.at(1).get<std::string>();
    x.pos = t.at(2).get<std::string>();
    x.chunk_id = t.at(3).get<std::size_t>();
    x.span = {t.at(4).get<std::size_t>(), t.at(5).get<std::size_t>()};
    x.sentence = t.at(6).get<std::size_t>();
    x.sentence_index = t.at(7).get<std::size_t>();
    x.paragraph = t.at(8).get<std::size_t>();
    x.section = parse_enum<SectionClass>(
        t.at(9), [](std::string_view s) { return section_from_string(s); }, "section");
    x.gold = parse_enum<Label>(t.at(10), [](std::string_view s) { return label_from_string(s); },
                               "label");
    x.semantic = parse_enum<SemanticClass>(
        t.at(11), [](std::string_view s) { return semantic_from_string(s); }, "semantic class");
    x.in_brackets = t.at(12).get<bool>();
    check_span(x.span, a.text.size(), "token");
    if (x.paragraph >= a.paragraphs.size()) throw std::invalid_argument("token paragraph");
    if (x.sentence >= a.sentences.size()) throw std::invalid_argument("token sentence");
    a.tokens.push_back(std::move(x));
  }
  for (const auto& s : a.sentences) {
    if (s.first_token > s.end_token || s.end_token > a.tokens.size())
      throw std::invalid_argument("sentence token range");
  }
  for (const auto& c : a.chunks) {
    if (c.begin > c.end || c.end > a.tokens.size())
      throw std::invalid_argument("chunk token range");
  }
  return a;
}

}  // namespace

void write_corpus(std::ostream& out, std::span<const Abstract> corpus) {
  json header = {{"format", kCorpusFormat}, {"version", kCorpusVersion}, {"count", corpus.size()}};
  out << header.dump() << '\n';
  for (const Abstract& a : corpus) out << encode_abstract(a).dump() << '\n';
}

std::vector<Abstract> read_corpus(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DecodeError(0, 1, "missing corpus header");
  ++line_no;
  std::size_t expected = 0;
  try {
    const json header = json::parse(line);
    if (header.at("format").get<std::string>() != kCorpusFormat)
      throw DecodeError(0, 1, "not an evtab corpus");
    if (header.at("version").get<int>() != kCorpusVersion)
      throw DecodeError(0, 1, "unsupported corpus version");
    expected = header.value("count", std::size_t{0});
  } catch (const json::exception& e) {
    throw DecodeError(0, 1, std::string("bad header: ") + e.what());
  }

  std::vector<Abstract> corpus;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim_copy(line).empty()) continue;
    const std::size_t record = corpus.size() + 1;
    try {
      corpus.push_back(decode_abstract(json::parse(line)));
    } catch (const json::exception& e) {
      throw DecodeError(record, line_no, e.what());
    } catch (const std::invalid_argument& e) {
      throw DecodeError(record, line_no, e.what());
    }
  }
  if (expected != corpus.size())
    throw DecodeError(corpus.size() + 1, line_no + 1,
                      "header announces " + std::to_string(expected) + " records, found " +
                          std::to_string(corpus.size()));
  return corpus;
}

std::string encode_corpus(std::span<const Abstract> corpus) {
  std::ostringstream out;
  write_corpus(out, corpus);
  return out.str();
}

std::vector<Abstract> decode_corpus(std::string_view bytes) {
  std::istringstream in{std::string(bytes)};
  return read_corpus(in);
}

void save_corpus(const std::string& path, std::span<const Abstract> corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write corpus file " + path);
  write_corpus(out, corpus);
}

std::vector<Abstract> load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read corpus file " + path);
  return read_corpus(in);
}

}  // namespace evtab

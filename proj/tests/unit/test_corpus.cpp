#include <doctest.h>

#include <sstream>

#include "../support/worked_example.hpp"
#include "evtab/corpus.hpp"
#include "evtab/errors.hpp"
#include "evtab/synthetic.hpp"

using namespace evtab;

TEST_CASE("section headings map to their classes") {
  const std::vector<std::pair<SectionClass, std::vector<std::string>>> table = {
      {SectionClass::Background,
       {"INTRODUCTION", "TRIAL REGISTRATION", "BACKGROUND", "FINANCIAL DISCLOSURE",
        "FINANCIAL DISCLOSURES", "CLINICAL TRIAL REGISTRATION"}},
      {SectionClass::Objective,
       {"AIMS", "BACKGROUND/AIMS", "AIM", "PURPOSE", "OBJECTIVE", "INTRODUCTION AND PURPOSE"}},
      {SectionClass::Methods,
       {"SETTING", "PATIENTS AND METHODS", "METHODS", "STUDY DESIGN AND METHODS",
        "RESEARCH DESIGN AND METHODS", "STATISTICS", "SUBJECTS AND METHODS", "METHOD",
        "PARTICIPANTS", "MAIN OUTCOME MEASURES", "DESIGN", "OUTCOME MEASUREMENT", "INTERVENTIONS",
        "MATERIALS AND METHODS", "INTERVENTION"}},
      {SectionClass::Results, {"RESULTS", "FINDINGS", "MAIN RESULTS"}},
      {SectionClass::Conclusions,
       {"APPLICATION TO CLINICAL PRACTICE", "CONCLUSION", "CONCLUSIONS", "DISCUSSION"}}};
  for (const auto& [cls, headings] : table) {
    for (const auto& h : headings) {
      CAPTURE(h);
      CHECK(section_class(h) == cls);
      CHECK(section_class(to_lower(h)) == cls);
      CHECK(section_class(" " + h + ": ") == cls);
    }
  }
  CHECK(section_class("ACKNOWLEDGEMENTS") == SectionClass::None);
  CHECK(section_class("") == SectionClass::None);
}

TEST_CASE("sentence splitting") {
  CHECK(split_sentences("vs. placebo was used.").size() == 1);
  CHECK(split_sentences("Timolol was given. Latanoprost was not.").size() == 2);
  CHECK(split_sentences("Mean IOP was 15.2 mmHg. It fell.").size() == 2);
  CHECK(split_sentences("See e.g. Smith et al. for details.").size() == 1);
  CHECK(split_sentences("").empty());
  const std::string text = "  First one.   Second one!\nThird?  ";
  const auto spans = split_sentences(text);
  REQUIRE(spans.size() == 3);
  CHECK(text.substr(spans[0].begin, spans[0].size()) == "First one.");
  CHECK(text.substr(spans[2].begin, spans[2].size()) == "Third?");
}

TEST_CASE("tokens split off brackets and trailing punctuation") {
  const std::string s = "(P<0.001), IOP-lowering 15%.";
  std::vector<std::string> words;
  for (const auto& t : tokenize(s, {0, s.size()})) words.push_back(s.substr(t.begin, t.size()));
  CHECK(words == std::vector<std::string>{"(", "P<0.001", ")", ",", "IOP-lowering", "15%", "."});
}

TEST_CASE("annotated text projects gold labels onto heads") {
  const Abstract a = parse_annotated(
      "<P>Patients</P> with Normal Tension Glaucoma were randomly assigned to either "
      "<A1>Tafluprost</A1> or <A2>Placebo</A2>");
  std::map<std::string, Label> gold;
  for (const Token& t : a.tokens) gold[t.surface] = t.gold;
  CHECK(gold["Patients"] == Label::P);
  CHECK(gold["Tafluprost"] == Label::A1);
  CHECK(gold["Placebo"] == Label::A2);
  std::size_t non_o = 0;
  for (const Token& t : a.tokens) non_o += t.gold != Label::O;
  CHECK(non_o == 3);
}

TEST_CASE("annotation errors") {
  CHECK_THROWS_AS(strip_annotations("<P>patients"), UnbalancedTag);
  CHECK_THROWS_AS(strip_annotations("patients</P>"), UnbalancedTag);
  CHECK_THROWS_AS(strip_annotations("<P>a <A1>b</P> c</A1>"), OverlappingTags);
  CHECK_THROWS_AS(strip_annotations("<X>patients</X>"), UnknownTag);
}

TEST_CASE("render_annotated inverts parse_annotated") {
  const std::string text =
      "<OC>changes</OC> were <R1>-4.0 +/-1.7 mmHg</R1> and <R2>-1.4 +/-1.8 mmHg</R2> (p<0.001).";
  CHECK(render_annotated(parse_annotated(text)) == text);

  for (const Abstract& a : generate_synthetic(20, 11, NoiseConfig::preset(NoiseLevel::High))) {
    const std::string rendered = render_annotated(a);
    const StrippedText s = strip_annotations(rendered);
    CHECK(s.text == a.text);
    CHECK(s.gold == a.gold);
  }
}

TEST_CASE("token spans increase and never overlap") {
  for (const Abstract& a : generate_synthetic(10, 4, NoiseConfig::preset(NoiseLevel::Medium))) {
    for (std::size_t i = 0; i < a.tokens.size(); ++i) {
      const CharSpan& s = a.tokens[i].span;
      CHECK(s.begin < s.end);
      CHECK(a.original(a.tokens[i]) == a.tokens[i].surface);
      if (i > 0) CHECK(a.tokens[i - 1].span.end <= s.begin);
    }
  }
}

TEST_CASE("structured flag and paragraph classes") {
  const Abstract t = worked::annotated();
  CHECK(t.structured);
  REQUIRE(t.paragraphs.size() == 4);
  CHECK(t.paragraphs[0].section == SectionClass::Objective);
  CHECK(t.paragraphs[1].section == SectionClass::Methods);
  CHECK(t.paragraphs[2].section == SectionClass::Methods);
  CHECK(t.paragraphs[3].section == SectionClass::Results);

  const Abstract u = make_abstract("u", "", {{"", "One body. Two sentences."}});
  CHECK_FALSE(u.structured);
  CHECK(u.paragraphs[0].section == SectionClass::None);
}

TEST_CASE("corpus files round-trip") {
  auto corpus = generate_synthetic(5, 2, NoiseConfig::preset(NoiseLevel::Low));
  corpus.push_back(worked::annotated());
  const std::string bytes = encode_corpus(corpus);
  const auto back = decode_corpus(bytes);
  CHECK(back == corpus);
  CHECK(encode_corpus(back) == bytes);

  std::stringstream s;
  write_corpus(s, corpus);
  CHECK(read_corpus(s) == corpus);
}

TEST_CASE("corpus decoding reports the failing record") {
  auto corpus = generate_synthetic(2, 2);
  std::string bytes = encode_corpus(corpus);
  bytes.insert(bytes.rfind('{'), "{not json}\n");
  try {
    decode_corpus(bytes);
    FAIL("expected DecodeError");
  } catch (const DecodeError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(decode_corpus("garbage\n"), DecodeError);
}

#include <doctest.h>

#include <algorithm>

#include "../support/worked_example.hpp"
#include "evtab/preprocess.hpp"
#include "evtab/synthetic.hpp"

using namespace evtab;

namespace {

std::vector<std::string> words_of(const Abstract& a) {
  std::vector<std::string> out;
  for (const Token& t : a.tokens) out.push_back(t.normalized);
  return out;
}

}  // namespace

TEST_CASE("abbreviation definitions") {
  const auto iop = guess_abbreviations("Mean intraocular pressure (IOP) fell.");
  REQUIRE(iop.contains("IOP"));
  CHECK(iop.at("IOP") == "intraocular pressure");
  CHECK(guess_abbreviations("This Is An Example (TIAE).").at("TIAE") == "This Is An Example");
  CHECK(guess_abbreviations("in normal tension glaucoma (NTG).").at("NTG") ==
        "normal tension glaucoma");
  CHECK(guess_abbreviations("mean intraocular pressures (IOPs) fell").empty());
  CHECK(guess_abbreviations("the mean (SD) value").empty());
}

TEST_CASE("abbreviation expansion") {
  Abstract a = make_abstract("x", "", {{"", "IOP fell but IOPs did not."}});
  expand_abbreviations(a, {{"IOP", "Intraocular Pressure"}}, {});
  CHECK(words_of(a) == std::vector<std::string>{"Intraocular", "Pressure", "fell", "but", "IOPs",
                                                "did", "not", "."});
  CHECK(a.abbrev_map.at("IOP") == "Intraocular Pressure");
  // Guessed definitions take precedence over the dictionary.
  Abstract b = make_abstract("x", "", {{"", "IOP fell."}});
  expand_abbreviations(b, {{"IOP", "Dictionary Form"}}, {{"IOP", "guessed form"}});
  CHECK(b.tokens[0].normalized == "guessed");

  const auto tsv = parse_abbreviations("# comment\nIOP\tintraocular   pressure\nbad line\n");
  CHECK(tsv.size() == 1);
  CHECK(tsv.at("IOP") == "intraocular pressure");
  CHECK(default_abbreviations().contains("IOP"));
}

TEST_CASE("numeric normalization") {
  CHECK(normalize_sentence("10, 20 and 30 mmHg") == "_MEAS_ , _MEAS_ and _MEAS_");
  CHECK(normalize_sentence("reduced by 25%") == "reduced by _PERC_");
  CHECK(normalize_sentence("were -4.0 +/-1.7 mmHg in") == "were _MEAS_ in");
  CHECK(normalize_sentence("(p<0.001)") == "( _PVAL_ )");
  CHECK(normalize_sentence("12 of 40 eyes") == "_FRAC_ eyes");
  CHECK(normalize_sentence("after 4 weeks") == "after _NUM_ weeks");
  CHECK(normalize_sentence("95% CI 1.2 to 3.4") == "_CONFINT_");
  CHECK(normalize_sentence("95% CI 1.2 to 3.4 mmHg") == "_CONFINTM_");
  CHECK(normalize_sentence("ranged 10-20%") == "ranged _PERCRANGE_");
  CHECK(normalize_sentence("from 10 to 20 mmHg") == "from _MEASRANGE_");
  CHECK(normalize_sentence("n = 45") == "_COUNT_");
  CHECK(normalize_sentence("in group 1 only") == "in _GONE_ only");
}

TEST_CASE("normalization is idempotent") {
  for (const char* s : {"10, 20 and 30 mmHg", "reduced by 25% (95% CI 1.2 to 3.4)",
                        "-4.0 +/-1.7 mmHg vs. 1.4 +/- 1.8 mmHg at 4 weeks (P = 0.02)",
                        "12 of 40 eyes and 3/4 of them", "January 2010 with n = 4"}) {
    const std::string once = normalize_sentence(s);
    CHECK(normalize_sentence(once) == once);
  }
}

TEST_CASE("tag types") {
  CHECK(type_id(NormTag::Meas) == type_id(NormTag::Num));
  CHECK(type_id(NormTag::Count) == type_id(NormTag::Num));
  CHECK(type_id(NormTag::Dose) == type_id(NormTag::Num));
  CHECK(type_id(NormTag::PercRange) == type_id(NormTag::Perc));
  CHECK(type_id(NormTag::ConfIntM) == type_id(NormTag::ConfInt));
  CHECK(type_id(NormTag::MeasRange) == type_id(NormTag::Range));
  CHECK(type_id(NormTag::Perc) != type_id(NormTag::Meas));
  for (std::size_t t = 0; t < kNumNormTags; ++t) {
    const int id = type_id(static_cast<NormTag>(t));
    CHECK(id >= 0);
    CHECK(id <= 15);
    CHECK(norm_tag_from_text(tag_text(static_cast<NormTag>(t))) == static_cast<NormTag>(t));
  }
  CHECK(word_type("patients") == kNonTagType);
  CHECK(word_type("_MEAS_") == type_id(NormTag::Num));
}

TEST_CASE("normalized tokens keep their original text") {
  for (Abstract a : generate_synthetic(15, 8, NoiseConfig::preset(NoiseLevel::High))) {
    const Abstract before = a;
    preprocess(a);
    for (const Token& t : a.tokens) {
      if (norm_tag_from_text(t.normalized)) {
        CHECK(denormalize(a, t) == t.surface);
        CHECK(a.text.find(t.surface) != std::string::npos);
      }
    }
    // Gold heads survive normalization with their labels.
    std::vector<Label> gold_before, gold_after;
    for (const Token& t : before.tokens) if (t.gold != Label::O) gold_before.push_back(t.gold);
    for (const Token& t : a.tokens) if (t.gold != Label::O) gold_after.push_back(t.gold);
    std::sort(gold_before.begin(), gold_before.end());
    gold_before.erase(std::unique(gold_before.begin(), gold_before.end()), gold_before.end());
    std::sort(gold_after.begin(), gold_after.end());
    gold_after.erase(std::unique(gold_after.begin(), gold_after.end()), gold_after.end());
    CHECK(gold_after == gold_before);
  }
}

TEST_CASE("fallback tagger") {
  CHECK(fallback_pos("the", false) == "DT");
  CHECK(fallback_pos("_MEAS_", false) == "CD");
  CHECK(fallback_pos("(", false) == "(");
  CHECK(fallback_pos("patients", false) == "NNS");
  CHECK(fallback_pos("Timolol", false) == "NNP");
  CHECK(fallback_pos("Timolol", true) == "NN");
  CHECK(fallback_pos("randomly", false) == "RB");
  CHECK(fallback_pos("glaucoma", false) == "NN");
}

TEST_CASE("chunks partition every sentence") {
  for (Abstract a : generate_synthetic(5, 3, NoiseConfig::preset(NoiseLevel::Medium))) {
    preprocess(a);
    std::size_t covered = 0;
    for (const Chunk& c : a.chunks) {
      CHECK(c.begin < c.end);
      CHECK(a.tokens[c.begin].sentence == a.tokens[c.end - 1].sentence);
      covered += c.end - c.begin;
    }
    CHECK(covered == a.tokens.size());
  }
}

TEST_CASE("semantic classes") {
  const Gazetteer& g = Gazetteer::builtin();
  auto cls = [&](std::vector<std::string> words) { return classify_chunk(words, g); };
  CHECK(cls({"the", "timolol", "group"}) == SemanticClass::Arm);
  CHECK(cls({"Primary", "open-angle", "Glaucoma"}) == SemanticClass::DiseaseOrMedicalCondition);
  CHECK(cls({"268", "patients"}) == SemanticClass::Patients);
  CHECK(cls({"latanoprost"}) == SemanticClass::MedicalTreatment);
  CHECK(cls({"qwerty"}) == SemanticClass::None);

  // Rules outrank the gazetteer whatever it contains.
  Gazetteer odd;
  odd.add("timolol group", SemanticClass::Patients);
  odd.add("treatment arm", SemanticClass::DiagnosticTest);
  CHECK(classify_chunk(std::vector<std::string>{"timolol", "group"}, odd) == SemanticClass::Arm);
  CHECK(classify_chunk(std::vector<std::string>{"treatment", "arm"}, odd) == SemanticClass::Arm);

  const std::vector<std::string> chunk = {"the", "timolol", "group"};
  CHECK(propagate_semantics(SemanticClass::Arm, chunk) ==
        std::vector<SemanticClass>{SemanticClass::None, SemanticClass::Arm, SemanticClass::Arm});
  const std::vector<std::string> coord = {"timolol", "or", "latanoprost"};
  CHECK(propagate_semantics(SemanticClass::MedicalTreatment, coord)[1] == SemanticClass::None);
}

TEST_CASE("candidate filtering") {
  CHECK(is_blacklisted_pos("DT"));
  CHECK(is_blacklisted_pos("IN"));
  CHECK_FALSE(is_blacklisted_pos("NN"));
  Abstract a = make_abstract(
      "x", "", {{"METHODS", "The patients were treated."}, {"CONCLUSIONS", "Timolol works."}});
  preprocess(a);
  const auto candidates = filter_candidates(a);
  for (const Candidate& c : candidates) {
    const Token& t = a.tokens[c.token_index];
    CHECK(t.normalized != "The");
    CHECK(t.section != SectionClass::Conclusions);
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) CHECK(candidates[i].index == i + 1);
}

TEST_CASE("synthetic gold heads are never filtered") {
  for (Abstract a : generate_synthetic(40, 21, NoiseConfig::preset(NoiseLevel::High))) {
    preprocess(a);
    CHECK(audit_filtered_gold(a).empty());
  }
}

TEST_CASE("section blocks for unstructured abstracts") {
  using B = std::array<std::size_t, 5>;
  CHECK(section_block_sizes(10) == B{2, 2, 2, 2, 2});
  CHECK(section_block_sizes(7) == B{2, 2, 1, 1, 1});
  CHECK(section_block_sizes(3) == B{1, 1, 1, 0, 0});
  for (std::size_t n = 0; n < 40; ++n) {
    const auto b = section_block_sizes(n);
    std::size_t sum = 0;
    for (std::size_t k = 0; k < 5; ++k) {
      sum += b[k];
      if (k > 0) CHECK(b[k] <= b[k - 1]);
      CHECK(b[0] - b[k] <= 1);
    }
    CHECK(sum == n);
  }

  std::string body;
  for (int i = 0; i < 7; ++i) body += "Sentence number " + std::string(1, char('a' + i)) + " here. ";
  Abstract a = make_abstract("u", "", {{"", body}});
  preprocess(a);
  std::vector<SectionClass> per_sentence(a.sentences.size(), SectionClass::None);
  for (const Token& t : a.tokens) per_sentence[t.sentence] = t.section;
  CHECK(per_sentence == std::vector<SectionClass>{
                            SectionClass::Background, SectionClass::Background,
                            SectionClass::Objective, SectionClass::Objective,
                            SectionClass::Methods, SectionClass::Results,
                            SectionClass::Conclusions});
}

TEST_CASE("preprocessing the worked example") {
  Abstract a = worked::annotated();
  preprocess(a);
  CHECK(a.abbrev_map.at("IOP") == "intraocular pressure");
  std::vector<const Token*> r;
  for (const Token& t : a.tokens)
    if (t.gold == Label::R1 || t.gold == Label::R2) r.push_back(&t);
  REQUIRE(r.size() == 2);
  CHECK(r[0]->normalized == "_MEAS_");
  CHECK(r[1]->normalized == "_MEAS_");
  CHECK(word_type(r[0]->normalized) == word_type(r[1]->normalized));
  CHECK(r[0]->surface == "-4.0 +/-1.7 mmHg");
  CHECK(r[1]->surface == "-1.4 +/-1.8 mmHg");
  CHECK(audit_filtered_gold(a).empty());
  // Preprocessing twice changes nothing.
  Abstract again = a;
  preprocess(again);
  CHECK(again == a);
}

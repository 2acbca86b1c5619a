#include <doctest.h>

#include "../support/gold.hpp"
#include "../support/oracles.hpp"
#include "evtab/errors.hpp"
#include "evtab/evidence.hpp"
#include "evtab/pipeline.hpp"
#include "evtab/synthetic.hpp"

using namespace evtab;

namespace {

std::vector<Abstract> prepared(std::size_t n, std::uint64_t seed, NoiseLevel level) {
  auto corpus = generate_synthetic(n, seed, NoiseConfig::preset(level));
  for (Abstract& a : corpus) preprocess(a);
  return corpus;
}

TrainConfig quick() {
  TrainConfig c;
  c.max_iterations = 60;
  return c;
}

}  // namespace

TEST_CASE("synthetic corpus is deterministic") {
  const auto a = generate_synthetic(20, 3, NoiseConfig::preset(NoiseLevel::Medium));
  CHECK(a == generate_synthetic(20, 3, NoiseConfig::preset(NoiseLevel::Medium)));
  CHECK(a != generate_synthetic(20, 4, NoiseConfig::preset(NoiseLevel::Medium)));
  for (NoiseLevel l : {NoiseLevel::Zero, NoiseLevel::Low, NoiseLevel::Medium, NoiseLevel::High})
    CHECK(noise_from_string(to_string(l)) == l);
}

TEST_CASE("every synthetic gold labelling is feasible") {
  for (NoiseLevel level : {NoiseLevel::Zero, NoiseLevel::Medium, NoiseLevel::High}) {
    for (const Abstract& a : prepared(80, 21, level)) {
      CHECK(a.structured);
      const auto candidates = filter_candidates(a);
      Probabilities row;
      row.fill(-2.0);
      const LabelingProblem p =
          build_problem(a, candidates, std::vector<Probabilities>(candidates.size(), row));
      CHECK_MESSAGE(goldsol::assignment(a, candidates), a.id);
      const auto z = goldsol::assignment(
          a, candidates, [&](const Assignment& x) { return oracle::violations(p, x).empty(); });
      CHECK_MESSAGE(z, a.id);
      CHECK(audit_filtered_gold(a).empty());
    }
  }
}

TEST_CASE("noise places numerics outside the results") {
  std::size_t outside = 0;
  for (const Abstract& a : prepared(40, 5, NoiseLevel::High)) {
    for (const Token& t : a.tokens) {
      if (t.section != SectionClass::Results && word_type(t.normalized) != kNonTagType) ++outside;
    }
  }
  CHECK(outside > 40);
  for (const Abstract& a : prepared(20, 5, NoiseLevel::Zero)) {
    std::size_t results_numerics = 0;
    for (const Token& t : a.tokens)
      if (t.section == SectionClass::Results && word_type(t.normalized) != kNonTagType)
        ++results_numerics;
    CHECK(results_numerics >= 2);
  }
}

TEST_CASE("training and prediction are deterministic") {
  const auto corpus = prepared(30, 8, NoiseLevel::Low);
  const MaxEntModel m1 = train(corpus, quick());
  const MaxEntModel m2 = train(corpus, quick());
  CHECK(encode_model(m1) == encode_model(m2));
  CHECK(decode_model(encode_model(m1)).weights == m1.weights);

  const auto test = prepared(12, 9, NoiseLevel::Low);
  for (Mode mode : {Mode::Zero, Mode::Vanilla, Mode::Full}) {
    const auto serial = predict_corpus(m1, test, mode, {}, 1);
    const auto parallel = predict_corpus(m1, test, mode, {}, 3);
    REQUIRE(serial.size() == test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
      CHECK(serial[i].solution == parallel[i].solution);
      CHECK(serial[i].solution == predict(m1, test[i], mode).solution);
      CHECK(serial[i].solution.labels.size() == test[i].tokens.size());
    }
  }
}

TEST_CASE("full-mode predictions satisfy the constraints") {
  const auto corpus = prepared(30, 12, NoiseLevel::Medium);
  const MaxEntModel m = train(corpus, quick());
  for (const Abstract& a : prepared(20, 13, NoiseLevel::High)) {
    const Prediction pr = predict(m, a, Mode::Full);
    REQUIRE(pr.solution.feasible);
    CHECK_FALSE(pr.fell_back);
    const LabelingProblem p = problem_for(m, a);
    CHECK(oracle::violations(p, *pr.solution.assignment).empty());
    CHECK(pr.solution.objective == doctest::Approx(oracle::objective_value(p, *pr.solution.assignment, Mode::Full)).epsilon(1e-12));
    const EvidenceRow row = emit_evidence_table(a, pr.solution);
    for (const std::string* cell : {&row.patients, &row.arm1, &row.arm2, &row.outcome,
                                    &row.result1, &row.result2})
      CHECK(a.text.find(*cell) != std::string::npos);
  }
}

TEST_CASE("degenerate abstracts degrade to warnings") {
  const auto corpus = prepared(20, 2, NoiseLevel::Low);
  const MaxEntModel m = train(corpus, quick());
  Abstract tiny = make_abstract("tiny", "T", {{"", "Three words only."}});
  preprocess(tiny);
  const Prediction full = predict(m, tiny, Mode::Full);
  CHECK_FALSE(full.solution.feasible);
  CHECK_FALSE(full.warning.empty());
  CHECK(emit_evidence_table(tiny, full.solution).status == "INFEASIBLE");
  Abstract raw = corpus[0];
  raw.preprocessed = false;
  CHECK_THROWS_AS(predict(m, raw, Mode::Full), Error);
}

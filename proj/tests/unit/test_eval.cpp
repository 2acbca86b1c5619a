#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "../support/oracles.hpp"
#include "evtab/errors.hpp"
#include "evtab/eval.hpp"
#include "evtab/synthetic.hpp"

using namespace evtab;

TEST_CASE("precision and recall counts") {
  const std::vector<Label> gold = {Label::P, Label::O, Label::A1, Label::A1, Label::O, Label::R1};
  const std::vector<Label> pred = {Label::P, Label::A1, Label::A1, Label::O, Label::O, Label::R2};
  const LabelMetrics m = score(pred, gold);
  CHECK(m[Label::P] == LabelCounts{1, 1, 1});
  CHECK(m[Label::A1] == LabelCounts{1, 2, 2});
  CHECK(m[Label::R1] == LabelCounts{0, 0, 1});
  CHECK(m[Label::R2] == LabelCounts{0, 1, 0});
  CHECK(m[Label::A1].precision() == 0.5);
  CHECK_FALSE(m[Label::R1].precision());
  CHECK(m[Label::R1].recall() == 0.0);
  CHECK_FALSE(m[Label::OC].recall());
  CHECK(m.pooled() == LabelCounts{2, 4, 4});
  const std::array<Label, 2> subset = {Label::P, Label::A1};
  CHECK(m.pooled(subset) == LabelCounts{2, 3, 3});
  CHECK_THROWS_AS(score(pred, std::vector<Label>(3, Label::O)), LengthMismatch);
}

TEST_CASE("one head per label over 25 abstracts") {
  LabelMetrics total;
  for (int i = 0; i < 25; ++i) {
    const std::vector<Label> gold = {Label::A1, Label::O};
    const std::vector<Label> pred = i < 18 ? gold : std::vector<Label>{Label::O, Label::A1};
    total += score(pred, gold);
  }
  CHECK(*total[Label::A1].precision() == doctest::Approx(0.72));
}

TEST_CASE("scores are permutation invariant and perfect on gold") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Label> gold(20), pred(20);
    for (auto& l : gold) l = kAllLabels[rng() % 7];
    for (auto& l : pred) l = kAllLabels[rng() % 7];
    std::vector<std::size_t> perm(20);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Label> pg(20), pp(20);
    for (std::size_t i = 0; i < 20; ++i) {
      pg[i] = gold[perm[i]];
      pp[i] = pred[perm[i]];
    }
    CHECK(score(pp, pg) == score(pred, gold));
    const LabelMetrics self = score(gold, gold);
    for (Label l : kTargetLabels) {
      if (auto p = self[l].precision()) CHECK(*p == 1.0);
      if (auto r = self[l].recall()) CHECK(*r == 1.0);
    }
  }
}

TEST_CASE("signed-rank test against full enumeration") {
  std::mt19937_64 rng(123);
  int checked = 0;
  for (int sample = 0; sample < 200; ++sample) {
    const std::size_t len = 5 + rng() % 8;
    std::vector<double> a(len), b(len);
    for (std::size_t i = 0; i < len; ++i) {
      a[i] = static_cast<double>(rng() % 9);  // small integers: ties and zeros
      b[i] = static_cast<double>(rng() % 9);
    }
    const auto expected = oracle::enumerate_signed_rank(a, b);
    if (expected.n < 5) {
      CHECK_THROWS_AS(wilcoxon_signed_rank(a, b), TooFewPairs);
      continue;
    }
    const WilcoxonResult r = wilcoxon_signed_rank(a, b);
    CHECK(r.exact);
    CHECK(r.n == expected.n);
    CHECK(r.w_plus == expected.w_plus);
    CHECK(r.w_plus + r.w_minus == doctest::Approx(expected.n * (expected.n + 1) / 2.0));
    CHECK(r.p_greater == expected.p_greater);
    CHECK(r.p_less == expected.p_less);
    CHECK(r.p_two_sided == std::min(1.0, 2 * std::min(expected.p_greater, expected.p_less)));
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("signed-rank special cases") {
  const std::vector<double> a = {1, 2, 3, 4, 5}, zero(5, 0.0);
  const WilcoxonResult r = wilcoxon_signed_rank(a, zero);
  CHECK(r.w_plus == 15);
  CHECK(r.p_greater == 1.0 / 32);
  CHECK(r.p_two_sided == 2.0 / 32);
  CHECK_THROWS_AS(wilcoxon_signed_rank(a, a), TooFewPairs);
  CHECK_THROWS_AS(wilcoxon_signed_rank(a, std::vector<double>(4, 0.0)), LengthMismatch);

  // Swapping the samples mirrors W+ about n(n+1)/4.
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 6 + rng() % 30;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng() % 20);
      y[i] = static_cast<double>(rng() % 20) + 0.5;
    }
    const WilcoxonResult f = wilcoxon_signed_rank(x, y), g = wilcoxon_signed_rank(y, x);
    CHECK(f.w_plus + g.w_plus == doctest::Approx(f.n * (f.n + 1) / 2.0));
    CHECK(f.w_plus - f.n * (f.n + 1) / 4.0 == doctest::Approx(f.n * (f.n + 1) / 4.0 - g.w_plus));
    CHECK(f.p_two_sided == doctest::Approx(g.p_two_sided).epsilon(1e-12));
    CHECK(f.p_greater == doctest::Approx(g.p_less).epsilon(1e-12));
  }
}

TEST_CASE("signed-rank normal approximation") {
  // n = 20 distinct positive differences: W+ = 210; z from the textbook formula.
  std::vector<double> a(20), b(20, 0.0);
  std::iota(a.begin(), a.end(), 1.0);
  const WilcoxonResult r = wilcoxon_signed_rank(a, b);
  CHECK_FALSE(r.exact);
  const double mean = 20 * 21 / 4.0, sd = std::sqrt(20 * 21 * 41 / 24.0);
  const double upper = (210 - mean - 0.5) / sd, lower = (210 - mean + 0.5) / sd;
  CHECK(r.p_greater == doctest::Approx(0.5 * std::erfc(upper / std::sqrt(2.0))).epsilon(1e-12));
  CHECK(r.p_less == doctest::Approx(0.5 * std::erfc(-lower / std::sqrt(2.0))).epsilon(1e-12));
}

TEST_CASE("bootstrap interval") {
  std::vector<double> half(100, 0.0);
  std::fill(half.begin(), half.begin() + 50, 1.0);
  const Interval ci = bootstrap_ci(half, 0.95, 2000, 7);
  CHECK(ci.lo <= 0.5);
  CHECK(ci.hi >= 0.5);
  const double binomial_width = 2 * 1.959964 * std::sqrt(0.25 / 100);
  CHECK(ci.hi - ci.lo == doctest::Approx(binomial_width).epsilon(0.15));
  CHECK(bootstrap_ci(half, 0.95, 2000, 7) == ci);
  const std::vector<double> constant(10, 0.3);
  const Interval flat = bootstrap_ci(constant, 0.9, 1000, 1);
  CHECK(flat.lo == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(flat.hi == doctest::Approx(0.3).epsilon(1e-12));
  CHECK_THROWS_AS(bootstrap_ci({}, 0.95, 1000, 1), EmptyInput);
  CHECK_THROWS_AS(bootstrap_ci(half, 1.0, 1000, 1), Error);
  CHECK_THROWS_AS(bootstrap_ci(half, 0.95, 999, 1), Error);
}

TEST_CASE("fold assignment") {
  for (std::size_t n : {10, 11, 37, 100}) {
    for (std::size_t k : {2, 5, 10}) {
      const auto folds = fold_assignment(n, k, 42);
      REQUIRE(folds.size() == n);
      std::vector<std::size_t> sizes(k, 0);
      for (int f : folds) {
        REQUIRE(f >= 0);
        REQUIRE(static_cast<std::size_t>(f) < k);
        ++sizes[static_cast<std::size_t>(f)];
      }
      const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
      CHECK(*hi - *lo <= 1);
      CHECK(std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}) == n);
      CHECK(fold_assignment(n, k, 42) == folds);
    }
  }
  const auto loo = fold_assignment(10, 10, 3);
  CHECK(std::set<int>(loo.begin(), loo.end()).size() == 10);
  CHECK(fold_assignment(50, 5, 1) != fold_assignment(50, 5, 2));
}

TEST_CASE("cross-validation report") {
  const auto corpus = generate_synthetic(12, 5, NoiseConfig::preset(NoiseLevel::Low));
  EvalConfig config;
  config.train.max_iterations = 40;
  const EvalReport r = kfold(corpus, 4, 3, config);
  CHECK(r.protocol == "cv");
  CHECK(r.fold_of == fold_assignment(12, 4, 3));
  REQUIRE(r.models.size() == 3);
  for (const ModelEval& m : r.models) {
    CHECK(m.per_fold.size() == 4);
    CHECK(m.per_abstract.size() == 12);
    LabelMetrics sum, sum_abs;
    for (const auto& f : m.per_fold) sum += f;
    for (const auto& a : m.per_abstract) sum_abs += a;
    CHECK(sum == m.pooled);
    CHECK(sum_abs == m.pooled);
    if (m.mode != Mode::Zero) {
      for (Label l : kTargetLabels) CHECK(m.pooled[l].cp + m.infeasible == 12);
    }
  }
  CHECK(kfold(corpus, 4, 3, config).models[2].pooled == r.models[2].pooled);
  CHECK(render_table(r).find("Precision") != std::string::npos);
  CHECK(report_json(r) == report_json(kfold(corpus, 4, 3, config)));
  CHECK_THROWS_AS(kfold(corpus, 13, 1, config), CorpusTooSmall);
  CHECK_THROWS_AS(kfold(corpus, 1, 1, config), CorpusTooSmall);

  const std::vector<Abstract> train(corpus.begin(), corpus.begin() + 9), test(corpus.begin() + 9, corpus.end());
  const EvalReport h = holdout(train, test, config);
  CHECK(h.protocol == "holdout");
  CHECK(h.ids.size() == 3);
  CHECK_THROWS_AS(holdout(train, {}, config), CorpusTooSmall);
}

// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <numeric>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../support/gold.hpp"
#include "../support/oracles.hpp"
#include "../support/random_models.hpp"
#include "../support/worked_example.hpp"
#include "evtab/errors.hpp"
#include "evtab/eval.hpp"
#include "evtab/evidence.hpp"
#include "evtab/pipeline.hpp"
#include "evtab/synthetic.hpp"

using namespace evtab;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Problems and full-mode solutions of criterion 1, reused by criterion 2.
std::vector<LabelingProblem> c1_problems;
std::vector<Solution> c1_full;

std::optional<Solution> try_solve(const std::function<Solution()>& f, std::string& error) {
  try {
    return f();
  } catch (const Infeasible&) {
    error = "Infeasible";
  }
  return std::nullopt;
}

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  std::size_t agree = 0, total = 0, feasible = 0;
  for (int i = 0; i < 1000; ++i) {
    // One problem in ten may be too small for any assignment.
    LabelingProblem p = oracle::random_problem(rng, 14, i % 10 == 0 ? 1 : 6);
    for (Mode mode : {Mode::Vanilla, Mode::Full}) {
      std::string e1, e2;
      const auto fast = try_solve([&] { return solve(p, mode); }, e1);
      const auto slow = try_solve([&] { return brute_force(p, mode); }, e2);
      ++total;
      if (fast.has_value() == slow.has_value() && (!fast || *fast == *slow) && e1 == e2) ++agree;
      if (mode == Mode::Full && fast) {
        ++feasible;
        c1_full.push_back(*fast);
        c1_problems.push_back(p);
      }
    }
  }
  const double s = seconds_since(t0);
  return {agree == total && s < 60,
          fmt("%zu/%zu agree (%zu feasible full), %.1f s", agree, total, feasible, s)};
}

Outcome constraint_soundness() {
  std::size_t bad = 0, checked = 0;
  for (std::size_t i = 0; i < c1_full.size(); ++i) {
    ++checked;
    if (!c1_full[i].assignment || !oracle::violations(c1_problems[i], *c1_full[i].assignment).empty())
      ++bad;
  }
  auto train_set = generate_synthetic(100, 101, NoiseConfig::preset(NoiseLevel::Medium));
  auto test_set = generate_synthetic(200, 202, NoiseConfig::preset(NoiseLevel::High));
  for (Abstract& a : train_set) preprocess(a);
  for (Abstract& a : test_set) preprocess(a);
  const MaxEntModel m = train(train_set);
  const auto predictions = predict_corpus(m, test_set, Mode::Full);
  std::size_t corpus_full = 0;
  for (std::size_t i = 0; i < test_set.size(); ++i) {
    const Solution& s = predictions[i].solution;
    if (!s.feasible || predictions[i].fell_back) continue;
    ++corpus_full;
    ++checked;
    if (!oracle::violations(problem_for(m, test_set[i]), *s.assignment).empty()) ++bad;
  }
  return {bad == 0 && corpus_full == test_set.size(),
          fmt("%zu solutions checked, %zu with violations; %zu/%zu corpus abstracts decoded in full mode",
              checked, bad, corpus_full, test_set.size())};
}

Outcome objective_fidelity() {
  std::mt19937_64 rng(77);
  double worst = 0;
  std::size_t n = 0;
  while (n < 2000) {
    LabelingProblem p = oracle::random_problem(rng, 14);
    if (p.n < 6) continue;
    p.delta_a = p.delta_r = 1e-5;
    std::vector<std::size_t> perm(p.n);
    std::iota(perm.begin(), perm.end(), 1);
    std::shuffle(perm.begin(), perm.end(), rng);
    Assignment a;
    std::copy_n(perm.begin(), 6, a.z.begin());
    for (Mode mode : {Mode::Vanilla, Mode::Full}) {
      worst = std::max(worst, std::fabs(objective(p, a, mode) - oracle::objective_value(p, a, mode)));
      const Solution s = make_solution(p, a, mode);
      worst = std::max(worst, std::fabs(objective(p, s.candidate_labels, mode) - oracle::objective_value(p, a, mode)));
    }
    ++n;
  }
  return {worst <= 1e-12, fmt("%zu assignments, max |difference| %.3g", n, worst)};
}

Outcome gradient_correctness() {
  std::mt19937_64 rng(4242);
  double worst_grad = 0, worst_sum = 0;
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 2 + rng() % 8;
    const auto batch = randgen::examples(rng, 2 + rng() % 8, d);
    MaxEntModel m = randgen::model(rng, d, 0.7);
    const LossAndGradient lg = loss_and_gradient(m, batch);
    const std::array<double, 7> ones = {1, 1, 1, 1, 1, 1, 1};
    auto rel = [](double a, double b) {
      return std::fabs(a - b) / std::max(1.0, std::max(std::fabs(a), std::fabs(b)));
    };
    auto probe = [&](double& param, double analytic) {
      const double v = param;
      param = v + h;
      const double up = oracle::maxent_loss(m, batch, ones);
      param = v - h;
      const double down = oracle::maxent_loss(m, batch, ones);
      param = v;
      worst_grad = std::max(worst_grad, rel(analytic, (up - down) / (2 * h)));
    };
    for (std::size_t k = 0; k < m.weights.size(); ++k) probe(m.weights[k], lg.grad_weights[k]);
    for (std::size_t k = 0; k < kNumLabels; ++k) probe(m.bias[k], lg.grad_bias[k]);
    for (const Example& ex : batch) {
      const Probabilities pr = predict_proba(m, ex.x);
      double sum = 0;
      for (double v : pr) sum += v;
      worst_sum = std::max(worst_sum, std::fabs(sum - 1));
    }
  }
  return {worst_grad < 1e-5 && worst_sum <= 1e-12,
          fmt("max relative gradient error %.3g, max |sum - 1| %.3g", worst_grad, worst_sum)};
}

Outcome model_ordering() {
  const auto t0 = Clock::now();
  const auto corpus = generate_synthetic(100, 1, NoiseConfig::preset(NoiseLevel::Medium));
  const EvalReport r = kfold(corpus, 10, 1);
  const std::array<Label, 3> subset = {Label::OC, Label::R1, Label::R2};
  auto precision = [&](Mode m) { return r.model(m).pooled.pooled(subset).precision().value_or(0.0); };
  const double zero = precision(Mode::Zero), vanilla = precision(Mode::Vanilla), full = precision(Mode::Full);
  const double s = seconds_since(t0);
  return {full >= vanilla && vanilla >= zero && full - zero >= 0.10 && s < 300,
          fmt("pooled OC/R1/R2 precision zero %.3f, vanilla %.3f, full %.3f; %.1f s", zero, vanilla,
              full, s)};
}

Outcome normalization_round_trip() {
  const bool golden = normalize_sentence("10, 20 and 30 mmHg") == "_MEAS_ , _MEAS_ and _MEAS_";
  auto train_set = generate_synthetic(60, 31, NoiseConfig::preset(NoiseLevel::Medium));
  for (Abstract& a : train_set) preprocess(a);
  const MaxEntModel m = train(train_set);
  std::size_t cells = 0, bad = 0, abstracts = 0;
  for (NoiseLevel level : {NoiseLevel::Zero, NoiseLevel::Low, NoiseLevel::Medium, NoiseLevel::High}) {
    auto corpus = generate_synthetic(100, 32, NoiseConfig::preset(level));
    for (Abstract& a : corpus) {
      preprocess(a);
      ++abstracts;
      std::vector<Solution> solutions;
      for (Mode mode : {Mode::Vanilla, Mode::Full}) solutions.push_back(predict(m, a, mode).solution);
      const auto candidates = filter_candidates(a);
      Probabilities flat;
      flat.fill(-2.0);
      const LabelingProblem p =
          build_problem(a, candidates, std::vector<Probabilities>(candidates.size(), flat));
      if (const auto z = goldsol::assignment(
              a, candidates, [&](const Assignment& x) { return oracle::violations(p, x).empty(); })) {
        solutions.push_back(make_solution(p, *z, Mode::Full));
      } else {
        ++bad;
      }
      for (const Solution& s : solutions) {
        const EvidenceRow row = emit_evidence_table(a, s);
        for (std::size_t i = 0; i < a.tokens.size(); ++i) {
          if (s.labels[i] == Label::O) continue;
          ++cells;
          const std::string cell = denormalize(a, a.tokens[i]);
          const std::string* emitted[] = {&row.patients, &row.arm1, &row.arm2,
                                          &row.outcome,  &row.result1, &row.result2};
          if (cell.empty() || a.text.find(cell) == std::string::npos ||
              *emitted[index_of(s.labels[i])] != cell)
            ++bad;
        }
      }
    }
  }
  return {golden && bad == 0,
          fmt("golden %s; %zu cells from %zu abstracts, %zu not exact substrings",
              golden ? "ok" : "wrong", cells, abstracts, bad)};
}

Outcome wilcoxon_exactness() {
  std::mt19937_64 rng(99);
  std::size_t samples = 0, mismatches = 0, skipped = 0;
  while (samples < 200) {
    const std::size_t len = 5 + rng() % 6;
    std::vector<double> a(len), b(len);
    for (std::size_t i = 0; i < len; ++i) {
      a[i] = static_cast<double>(rng() % 7);
      b[i] = static_cast<double>(rng() % 7);
    }
    const auto want = oracle::enumerate_signed_rank(a, b);
    if (want.n < 5) {
      ++skipped;
      continue;
    }
    const WilcoxonResult got = wilcoxon_signed_rank(a, b);
    if (!got.exact || got.n != want.n || got.w_plus != want.w_plus ||
        got.p_greater != want.p_greater || got.p_less != want.p_less)
      ++mismatches;
    ++samples;
  }
  const std::vector<double> pos = {1, 2, 3, 4, 5}, zero(5, 0.0);
  const double p = wilcoxon_signed_rank(pos, zero).p_greater;
  return {mismatches == 0 && p == 1.0 / 32,
          fmt("%zu samples (n 5..10), %zu mismatches, %zu with too few pairs skipped; n=5 one-sided p = %.17g",
              samples, mismatches, skipped, p)};
}

struct RunBytes {
  std::string model;
  std::vector<int> folds;
  std::string table;
  std::string report;
};

RunBytes full_run() {
  auto corpus = generate_synthetic(40, 5, NoiseConfig::preset(NoiseLevel::Medium));
  for (Abstract& a : corpus) preprocess(a);
  RunBytes out;
  const MaxEntModel m = train(corpus);
  out.model = encode_model(m);
  out.folds = fold_assignment(corpus.size(), 10, 5);
  std::vector<EvidenceRow> rows;
  const auto predictions = predict_corpus(m, corpus, Mode::Full, {}, 2);
  for (std::size_t i = 0; i < corpus.size(); ++i)
    rows.push_back(emit_evidence_table(corpus[i], predictions[i].solution));
  out.table = format_evidence_table(rows, TableFormat::Tsv);
  EvalConfig c;
  c.train.max_iterations = 100;
  c.workers = 2;
  out.report = report_json(kfold(corpus, 5, 5, c));
  return out;
}

Outcome determinism() {
  const RunBytes a = full_run(), b = full_run();
  const bool model = a.model == b.model, folds = a.folds == b.folds, table = a.table == b.table,
             report = a.report == b.report;
  return {model && folds && table && report,
          fmt("model %s, folds %s, evidence table %s, evaluation report %s",
              model ? "identical" : "differ", folds ? "identical" : "differ",
              table ? "identical" : "differ", report ? "identical" : "differ")};
}

Outcome pipeline_fidelity() {
  Abstract a = worked::annotated();
  const Abstract reparsed = parse_annotated(a.id, a.title, [&] {
    std::vector<ParagraphInput> ps;
    std::istringstream lines(render_annotated(a));
    std::size_t k = 0;
    for (std::string line; std::getline(lines, line); ++k) ps.push_back({a.paragraphs[k].heading, line});
    return ps;
  }());
  const bool round_trip = reparsed == a;
  preprocess(a);
  bool expanded = a.abbrev_map.count("IOP") && a.abbrev_map.at("IOP") == "intraocular pressure";
  for (const Token& t : a.tokens)
    if (t.surface == "IOP") expanded = false;
  const auto candidates = filter_candidates(a);
  const auto z = goldsol::assignment(a, candidates);
  bool same_type = false;
  EvidenceRow row;
  if (z) {
    const Token& r1 = a.tokens[candidates[z->at(Label::R1) - 1].token_index];
    const Token& r2 = a.tokens[candidates[z->at(Label::R2) - 1].token_index];
    same_type = r1.normalized == "_MEAS_" && word_type(r1.normalized) == word_type(r2.normalized);
    Probabilities flat;
    flat.fill(std::log(1.0 / kNumLabels));
    const LabelingProblem p =
        build_problem(a, candidates, std::vector<Probabilities>(candidates.size(), flat));
    same_type = same_type && oracle::violations(p, *z).empty();
    row = emit_evidence_table(a, make_solution(p, *z, Mode::Full));
  }
  const EvidenceRow want{"worked", "Patients", "Tafluprost", "Placebo", "changes",
                         "-4.0 +/-1.7 mmHg", "-1.4 +/-1.8 mmHg", "OK"};
  const bool heads = row == want;
  return {round_trip && expanded && same_type && heads,
          fmt("annotation round trip %s, IOP expanded %s, results share a tag type %s, heads %s",
              round_trip ? "yes" : "no", expanded ? "yes" : "no", same_type ? "yes" : "no",
              heads ? "reproduced" : "differ")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
      {"1 oracle equivalence", oracle_equivalence},
      {"2 constraint soundness", constraint_soundness},
      {"3 objective fidelity", objective_fidelity},
      {"4 gradient correctness", gradient_correctness},
      {"5 model ordering", model_ordering},
      {"6 normalization round trip", normalization_round_trip},
      {"7 wilcoxon exactness", wilcoxon_exactness},
      {"8 determinism", determinism},
      {"9 pipeline fidelity", pipeline_fidelity},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}

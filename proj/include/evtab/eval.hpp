#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evtab/corpus.hpp"
#include "evtab/inference.hpp"
#include "evtab/maxent.hpp"
#include "evtab/pipeline.hpp"

namespace evtab {

struct LabelCounts {
  std::size_t tp = 0;  // labelled l by the system and annotated l
  std::size_t cp = 0;  // labelled l by the system
  std::size_t ap = 0;  // annotated l

  // nullopt when the denominator is zero.
  std::optional<double> precision() const;
  std::optional<double> recall() const;

  LabelCounts& operator+=(const LabelCounts& o) {
    tp += o.tp;
    cp += o.cp;
    ap += o.ap;
    return *this;
  }
  friend bool operator==(const LabelCounts&, const LabelCounts&) = default;
};

// Counts for the six target labels; O is never scored.
struct LabelMetrics {
  std::array<LabelCounts, kNumTargets> labels{};

  const LabelCounts& operator[](Label l) const { return labels.at(index_of(l)); }
  LabelCounts& operator[](Label l) { return labels.at(index_of(l)); }
  // Sum of counts over `subset` (all six by default): the micro-average.
  LabelCounts pooled(std::span<const Label> subset = kTargetLabels) const;

  LabelMetrics& operator+=(const LabelMetrics& o) {
    for (std::size_t k = 0; k < kNumTargets; ++k) labels[k] += o.labels[k];
    return *this;
  }
  friend bool operator==(const LabelMetrics&, const LabelMetrics&) = default;
};

// Throws LengthMismatch unless the sequences align.
LabelMetrics score(std::span<const Label> predicted, std::span<const Label> gold);

struct WilcoxonResult {
  std::size_t n = 0;    // pairs left after dropping zero differences
  double w_plus = 0;    // sum of ranks of positive differences a - b
  double w_minus = 0;
  double p_greater = 0; // P(W+ >= observed) under the null
  double p_less = 0;    // P(W+ <= observed)
  double p_two_sided = 0;
  bool exact = false;
};

// Exact distribution for n <= 12, normal approximation with continuity and
// tie correction above. Throws LengthMismatch, or TooFewPairs when fewer than
// five non-zero differences remain.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

struct Interval {
  double lo = 0;
  double hi = 0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

// Percentile bootstrap of the mean. Throws EmptyInput; level must be in
// (0, 1) and resamples at least 1000.
Interval bootstrap_ci(std::span<const double> values, double level, std::size_t resamples,
                      std::uint64_t seed);

// Seeded shuffle, then k contiguous folds. Entry i is the fold of item i.
std::vector<int> fold_assignment(std::size_t n, std::size_t k, std::uint64_t seed);

struct EvalConfig {
  TrainConfig train;
  InferenceOptions inference;
  std::vector<Mode> modes = {Mode::Zero, Mode::Vanilla, Mode::Full};
  bool fold_average = false;  // headline CV metrics average per-fold values instead of pooling
  double ci_level = 0.95;
  std::size_t resamples = 1000;
  std::uint64_t bootstrap_seed = 7;
  unsigned workers = 1;
};

struct ModelEval {
  Mode mode = Mode::Full;
  LabelMetrics pooled;
  std::vector<LabelMetrics> per_fold;      // CV only
  std::vector<LabelMetrics> per_abstract;  // in corpus (or test set) order
  // Mean of defined per-fold values; index kNumTargets is the micro-average.
  std::array<std::optional<double>, kNumTargets + 1> fold_avg_precision{};
  std::array<std::optional<double>, kNumTargets + 1> fold_avg_recall{};
  // Bootstrap interval of per-abstract precision; same indexing.
  std::array<std::optional<Interval>, kNumTargets + 1> precision_ci{};
  std::size_t fallbacks = 0;
  std::size_t infeasible = 0;
};

struct Comparison {
  Mode a = Mode::Full;
  Mode b = Mode::Vanilla;
  std::string label;  // "P" ... "R2" or "overall"
  std::optional<WilcoxonResult> test;
  std::string note;   // why the test is missing
};

struct EvalReport {
  std::string protocol;  // "cv" or "holdout"
  std::size_t k = 0;
  std::uint64_t seed = 0;
  bool fold_average = false;
  double ci_level = 0.95;
  std::vector<std::string> ids;  // evaluated abstracts, in order
  std::vector<int> fold_of;      // CV only, parallel to ids
  std::vector<ModelEval> models;
  std::vector<Comparison> comparisons;
  std::vector<std::string> warnings;

  const ModelEval& model(Mode m) const;
};

// Throws CorpusTooSmall when k < 2 or the corpus has fewer than k abstracts.
// Abstracts are preprocessed (with default resources) if they are not yet.
EvalReport kfold(std::span<const Abstract> corpus, std::size_t k, std::uint64_t seed,
                 const EvalConfig& config = {});

EvalReport holdout(std::span<const Abstract> train_set, std::span<const Abstract> test_set,
                   const EvalConfig& config = {});

// Aligned text in the results-table layout: one row per model, one column per
// label plus the micro-average, for precision then recall.
std::string render_table(const EvalReport& report);
std::string report_json(const EvalReport& report);

}  // namespace evtab

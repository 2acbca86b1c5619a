#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evtab/corpus.hpp"
#include "evtab/labels.hpp"
#include "evtab/maxent.hpp"
#include "evtab/preprocess.hpp"

namespace evtab {

enum class Mode { Zero, Vanilla, Full };

std::string_view to_string(Mode m);
std::optional<Mode> mode_from_string(std::string_view s);

inline constexpr double kDefaultDelta = 1e-5;

// Candidate i (0-based here, 1-based in positions) carries its log-probability
// row and the metadata the constraints read.
struct LabelingProblem {
  std::size_t n = 0;
  std::vector<Probabilities> logp;
  std::vector<SectionClass> section;
  std::vector<int> sent_pos;   // sentence index within paragraph, capped at 9
  std::vector<int> norm_type;  // [0, 15] or kNonTagType
  double delta_a = kDefaultDelta;
  double delta_r = kDefaultDelta;
  // q_OC must equal both q_R1 and q_R2 instead of covering one of them.
  bool strict_same_sentence = false;

  // Token index of each candidate and the abstract's token count, used to
  // spread candidate labels back over all tokens. Empty means identity.
  std::vector<std::size_t> token_index;
  std::size_t token_count = 0;

  // Throws EmptyProblem for n = 0 and Error for inconsistent sizes, non-finite
  // log-probabilities or out-of-range metadata.
  void validate() const;

  friend bool operator==(const LabelingProblem&, const LabelingProblem&) = default;
};

// 1-based candidate positions z for P, A1, A2, OC, R1, R2.
struct Assignment {
  std::array<std::size_t, kNumTargets> z{};

  std::size_t at(Label l) const { return z[index_of(l)]; }
  friend bool operator==(const Assignment&, const Assignment&) = default;
  friend auto operator<=>(const Assignment&, const Assignment&) = default;
};

struct Solution {
  Mode mode = Mode::Full;
  bool feasible = false;
  double objective = 0;
  std::optional<Assignment> assignment;  // vanilla and full only
  std::vector<Label> candidate_labels;   // one per candidate
  std::vector<Label> labels;             // one per token; filtered tokens are O

  friend bool operator==(const Solution&, const Solution&) = default;
};

// Log-probabilities are floored at log(DBL_MIN). Throws EmptyProblem when
// there are no candidates.
LabelingProblem build_problem(const Abstract& abstract, std::span<const Candidate> candidates,
                              std::span<const Probabilities> probabilities);

// Objective of a vanilla/full assignment: sum_i logp(i, O) plus the label gains
// logp(z, l) - logp(z, O) in label order, minus delta_a d_A + delta_r d_R in
// full mode.
double objective(const LabelingProblem& problem, const Assignment& assignment, Mode mode);

// Sum over candidates of logp at the given labels; in full mode the distance
// terms are subtracted. Vanilla/full require exactly one candidate per target
// label and defer to the assignment form.
double objective(const LabelingProblem& problem, std::span<const Label> candidate_labels, Mode mode);

// Constraint numbers (1-10) the assignment violates. Constraint 3 covers both
// A1 <= A2 and R1 <= R2. Vanilla mode checks 1 and 2 only.
std::vector<int> violated_constraints(const LabelingProblem& problem, const Assignment& assignment,
                                      Mode mode);

// Exact optimum; ties go to the lexicographically smallest assignment.
// Throws Infeasible or EmptyProblem.
Solution solve(const LabelingProblem& problem, Mode mode);

// Exhaustive reference for solve(); throws ProblemTooLarge for n > 16.
Solution brute_force(const LabelingProblem& problem, Mode mode);

// Solution for an assignment chosen elsewhere (gold, replay).
Solution make_solution(const LabelingProblem& problem, const Assignment& assignment, Mode mode);

// All-O solution flagged infeasible.
Solution infeasible_solution(const LabelingProblem& problem, Mode mode);

}  // namespace evtab

#include "evtab/inference.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numeric>

#include "evtab/errors.hpp"

namespace evtab {

namespace {

constexpr std::size_t kP = 0, kA1 = 1, kA2 = 2, kOC = 3, kR1 = 4, kR2 = 5;
constexpr std::size_t kO = index_of(Label::O);
constexpr int kMaxNumericType = 100;

double base_score(const LabelingProblem& p) {
  double base = 0;
  for (const auto& row : p.logp) base += row[kO];
  return base;
}

double gain(const LabelingProblem& p, std::size_t candidate, std::size_t label) {
  return p.logp[candidate][label] - p.logp[candidate][kO];
}

// Subtracts the distance terms. z is 1-based.
double finish(double sum, const std::array<std::size_t, kNumTargets>& z,
              const LabelingProblem& p, Mode mode) {
  if (mode != Mode::Full) return sum;
  sum -= p.delta_a * (static_cast<double>(z[kA2]) - static_cast<double>(z[kA1]));
  sum -= p.delta_r * (static_cast<double>(z[kR2]) - static_cast<double>(z[kR1]));
  return sum;
}

// The single evaluation order every caller shares, so values compare exactly.
double score_of(const LabelingProblem& p, double base, const std::array<std::size_t, kNumTargets>& z,
           Mode mode) {
  double sum = base;
  for (std::size_t l = 0; l < kNumTargets; ++l) sum += gain(p, z[l] - 1, l);
  return finish(sum, z, p, mode);
}

bool results_or_none(SectionClass s) { return s == SectionClass::Results || s == SectionClass::None; }

std::vector<Label> spread(const LabelingProblem& p, const std::vector<Label>& candidate_labels) {
  if (p.token_index.empty()) return candidate_labels;
  std::vector<Label> labels(p.token_count, Label::O);
  for (std::size_t i = 0; i < p.n; ++i) labels[p.token_index[i]] = candidate_labels[i];
  return labels;
}

Solution solve_zero(const LabelingProblem& p) {
  Solution s;
  s.mode = Mode::Zero;
  s.feasible = true;
  s.candidate_labels.resize(p.n);
  for (std::size_t i = 0; i < p.n; ++i) {
    // Ties go to O, then to the earlier label.
    Label best = Label::O;
    for (Label l : kTargetLabels) {
      if (p.logp[i][index_of(l)] > p.logp[i][index_of(best)]) best = l;
    }
    s.candidate_labels[i] = best;
  }
  s.objective = objective(p, s.candidate_labels, Mode::Zero);
  s.labels = spread(p, s.candidate_labels);
  return s;
}

// Depth-first branch and bound over label positions in the order
// P, A1, A2, OC, R1, R2. All indices are 0-based internally.
class BranchAndBound {
 public:
  BranchAndBound(const LabelingProblem& p, Mode mode) : p_(p), full_(mode == Mode::Full), mode_(mode) {
    base_ = base_score(p);
    gains_.resize(p.n);
    for (std::size_t i = 0; i < p.n; ++i) {
      for (std::size_t l = 0; l < kNumTargets; ++l) gains_[i][l] = gain(p, i, l);
    }
    for (std::size_t l = 0; l < kNumTargets; ++l) {
      auto& order = order_[l];
      for (std::size_t i = 0; i < p.n; ++i) {
        if (!full_ || statically_allowed(i, l)) order.push_back(i);
      }
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return gains_[a][l] > gains_[b][l];
      });
    }
    used_.assign(p.n, false);
  }

  std::optional<Assignment> run() {
    if (p_.n < kNumTargets) return std::nullopt;
    search(0, base_);
    if (!found_) return std::nullopt;
    Assignment a;
    for (std::size_t l = 0; l < kNumTargets; ++l) a.z[l] = best_z_[l] + 1;
    return a;
  }

 private:
  bool statically_allowed(std::size_t i, std::size_t l) const {
    switch (l) {
      case kP:
      case kA1:
      case kA2:
        return p_.section[i] != SectionClass::Results;
      case kR1:
      case kR2:
        return results_or_none(p_.section[i]) && p_.norm_type[i] <= kMaxNumericType;
      default:
        return true;
    }
  }

  std::size_t after_setting() const {  // first position allowed for OC/R1/R2
    std::size_t lo = 0;
    for (std::size_t l : {kP, kA1, kA2}) {
      if (l < depth_) lo = std::max(lo, z_[l] + 1);
    }
    return lo;
  }

  // Positions are already distinct and statically allowed.
  bool dynamically_allowed(std::size_t c, std::size_t l) const {
    if (!full_) return true;
    switch (l) {
      case kA2:
        if (c < z_[kA1]) return false;
        // P outside [A1, A2].
        return z_[kP] < z_[kA1] || z_[kP] > c;
      case kOC:
        return c >= after_setting();
      case kR1:
        if (c < after_setting()) return false;
        return !p_.strict_same_sentence || p_.sent_pos[c] == p_.sent_pos[z_[kOC]];
      case kR2: {
        if (c < after_setting() || c < z_[kR1]) return false;
        if (p_.norm_type[c] != p_.norm_type[z_[kR1]]) return false;
        const int q_oc = p_.sent_pos[z_[kOC]];
        if (p_.strict_same_sentence) return p_.sent_pos[c] == q_oc;
        return q_oc >= p_.sent_pos[z_[kR1]] || q_oc >= p_.sent_pos[c];
      }
      default:
        return true;
    }
  }

  // Largest gain label l can still collect given the labels fixed so far.
  double best_remaining(std::size_t l) const {
    std::size_t lo = 0;
    if (full_) {
      if (l == kA2 && depth_ > kA1) lo = z_[kA1];
      if (l >= kOC) lo = after_setting();
      if (l == kR2 && depth_ > kR1) lo = std::max(lo, z_[kR1]);
    }
    for (std::size_t c : order_[l]) {
      if (used_[c] || c < lo) continue;
      if (full_ && l == kR2 && depth_ > kR1 && p_.norm_type[c] != p_.norm_type[z_[kR1]]) continue;
      return gains_[c][l];
    }
    return -std::numeric_limits<double>::infinity();
  }

  // True when every completion of the current prefix is lexicographically
  // larger than the incumbent.
  bool prefix_after_incumbent() const {
    for (std::size_t l = 0; l < depth_; ++l) {
      if (z_[l] != best_z_[l]) return z_[l] > best_z_[l];
    }
    return false;
  }

  void search(std::size_t depth, double prefix) {
    depth_ = depth;
    if (depth == kNumTargets) {
      const double value = finish(prefix, one_based(z_), p_, mode_);
      if (!found_ || value > best_ || (value == best_ && z_ < best_z_)) {
        found_ = true;
        best_ = value;
        best_z_ = z_;
      }
      return;
    }
    for (std::size_t c : order_[depth]) {
      if (used_[c]) continue;
      depth_ = depth;
      if (!dynamically_allowed(c, depth)) continue;
      const double next = prefix + gains_[c][depth];
      z_[depth] = c;
      used_[c] = true;
      depth_ = depth + 1;
      // Summing upper bounds in the same order as the objective keeps the
      // bound above every reachable value under rounding.
      double bound = next;
      for (std::size_t l = depth + 1; l < kNumTargets && bound > -HUGE_VAL; ++l)
        bound += best_remaining(l);
      const bool prune =
          found_ && (bound < best_ || (bound == best_ && prefix_after_incumbent()));
      if (!prune && bound > -HUGE_VAL) search(depth + 1, next);
      used_[c] = false;
    }
    depth_ = depth;
  }

  static std::array<std::size_t, kNumTargets> one_based(std::array<std::size_t, kNumTargets> z) {
    for (auto& v : z) ++v;
    return z;
  }

  const LabelingProblem& p_;
  bool full_;
  Mode mode_;
  double base_ = 0;
  std::vector<std::array<double, kNumTargets>> gains_;
  std::array<std::vector<std::size_t>, kNumTargets> order_;
  std::vector<bool> used_;
  std::array<std::size_t, kNumTargets> z_{};
  std::size_t depth_ = 0;
  bool found_ = false;
  double best_ = 0;
  std::array<std::size_t, kNumTargets> best_z_{};
};

// Plain reading of the constraints, shared by the validator and the
// exhaustive oracle; deliberately independent of the search above.
struct ConstraintCheck {
  const LabelingProblem& p;
  const std::array<std::size_t, kNumTargets>& z;  // 1-based

  SectionClass sec(std::size_t l) const { return p.section[z[l] - 1]; }
  int w(std::size_t l) const { return p.norm_type[z[l] - 1]; }
  int q(std::size_t l) const { return p.sent_pos[z[l] - 1]; }

  bool c1() const {
    for (std::size_t a = 0; a < kNumTargets; ++a)
      for (std::size_t b = a + 1; b < kNumTargets; ++b)
        if (z[a] == z[b]) return false;
    return true;
  }
  bool c2() const {
    return std::all_of(z.begin(), z.end(), [&](std::size_t v) { return v >= 1 && v <= p.n; });
  }
  bool c3() const { return z[kA2] >= z[kA1] && z[kR2] >= z[kR1]; }
  bool c4() const {
    for (std::size_t late : {kOC, kR1, kR2})
      for (std::size_t early : {kA1, kA2, kP})
        if (z[late] < z[early]) return false;
    return true;
  }
  bool c5() const { return results_or_none(sec(kR1)) && results_or_none(sec(kR2)); }
  bool c6() const {
    return sec(kP) != SectionClass::Results && sec(kA1) != SectionClass::Results &&
           sec(kA2) != SectionClass::Results;
  }
  bool c7() const { return z[kA1] >= z[kP] || z[kP] >= z[kA2]; }
  bool c8() const { return w(kR1) <= kMaxNumericType && w(kR2) <= kMaxNumericType; }
  bool c9() const { return w(kR1) == w(kR2); }
  bool c10() const {
    if (p.strict_same_sentence) return q(kOC) == q(kR1) && q(kOC) == q(kR2);
    return q(kOC) >= q(kR1) || q(kOC) >= q(kR2);
  }

  bool all(Mode mode) const {
    if (!c2() || !c1()) return false;
    if (mode != Mode::Full) return true;
    return c3() && c4() && c5() && c6() && c7() && c8() && c9() && c10();
  }
};

}  // namespace

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::Zero: return "zero";
    case Mode::Vanilla: return "vanilla";
    case Mode::Full: return "full";
  }
  return "full";
}

std::optional<Mode> mode_from_string(std::string_view s) {
  for (Mode m : {Mode::Zero, Mode::Vanilla, Mode::Full}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

void LabelingProblem::validate() const {
  if (n == 0) throw EmptyProblem("labeling problem has no candidates");
  if (logp.size() != n || section.size() != n || sent_pos.size() != n || norm_type.size() != n)
    throw Error("labeling problem arrays do not have n entries");
  if (!token_index.empty() && token_index.size() != n)
    throw Error("token_index must be empty or have n entries");
  for (std::size_t i = 0; i < n; ++i) {
    for (double v : logp[i]) {
      if (!std::isfinite(v)) throw Error("non-finite log-probability at candidate " + std::to_string(i + 1));
    }
    if (sent_pos[i] < 0 || sent_pos[i] > 9) throw Error("sent_pos out of [0, 9]");
    if (norm_type[i] != kNonTagType && (norm_type[i] < 0 || norm_type[i] > 15))
      throw Error("norm_type out of [0, 15] and not 101");
    if (!token_index.empty() && token_index[i] >= token_count)
      throw Error("token_index out of range");
  }
  if (!(delta_a >= 0) || !(delta_r >= 0)) throw Error("distance weights must be non-negative");
}

LabelingProblem build_problem(const Abstract& abstract, std::span<const Candidate> candidates,
                              std::span<const Probabilities> probabilities) {
  if (candidates.empty()) throw EmptyProblem("abstract " + abstract.id + " has no candidates");
  if (candidates.size() != probabilities.size())
    throw DimensionMismatch("one probability vector per candidate required");
  LabelingProblem p;
  p.n = candidates.size();
  p.token_count = abstract.tokens.size();
  const double floor_log = std::log(DBL_MIN);
  for (std::size_t i = 0; i < p.n; ++i) {
    const Token& t = abstract.tokens.at(candidates[i].token_index);
    Probabilities row{};
    for (std::size_t k = 0; k < kNumLabels; ++k) {
      const double v = probabilities[i][k];
      row[k] = v >= DBL_MIN ? std::log(v) : floor_log;
    }
    p.logp.push_back(row);
    p.section.push_back(t.section);
    p.sent_pos.push_back(static_cast<int>(std::min<std::size_t>(t.sentence_index, 9)));
    p.norm_type.push_back(word_type(t.normalized));
    p.token_index.push_back(candidates[i].token_index);
  }
  return p;
}

double objective(const LabelingProblem& problem, const Assignment& assignment, Mode mode) {
  return score_of(problem, base_score(problem), assignment.z, mode);
}

double objective(const LabelingProblem& problem, std::span<const Label> candidate_labels, Mode mode) {
  if (candidate_labels.size() != problem.n) throw LengthMismatch("one label per candidate required");
  if (mode == Mode::Zero) {
    double sum = 0;
    for (std::size_t i = 0; i < problem.n; ++i) sum += problem.logp[i][index_of(candidate_labels[i])];
    return sum;
  }
  Assignment a;
  std::array<int, kNumTargets> count{};
  for (std::size_t i = 0; i < problem.n; ++i) {
    const Label l = candidate_labels[i];
    if (l == Label::O) continue;
    ++count[index_of(l)];
    a.z[index_of(l)] = i + 1;
  }
  for (int c : count) {
    if (c != 1) throw Error("vanilla/full labelings need exactly one candidate per target label");
  }
  return objective(problem, a, mode);
}

std::vector<int> violated_constraints(const LabelingProblem& problem, const Assignment& assignment,
                                      Mode mode) {
  const ConstraintCheck c{problem, assignment.z};
  std::vector<int> out;
  if (!c.c2()) return {2};  // later checks would index out of range
  if (!c.c1()) out.push_back(1);
  if (mode != Mode::Full) return out;
  const std::array<bool, 8> ok = {c.c3(), c.c4(), c.c5(), c.c6(), c.c7(), c.c8(), c.c9(), c.c10()};
  for (std::size_t k = 0; k < ok.size(); ++k) {
    if (!ok[k]) out.push_back(static_cast<int>(k) + 3);
  }
  return out;
}

Solution make_solution(const LabelingProblem& problem, const Assignment& assignment, Mode mode) {
  Solution s;
  s.mode = mode;
  s.feasible = true;
  s.assignment = assignment;
  s.objective = objective(problem, assignment, mode);
  s.candidate_labels.assign(problem.n, Label::O);
  for (std::size_t l = 0; l < kNumTargets; ++l) s.candidate_labels[assignment.z[l] - 1] = kTargetLabels[l];
  s.labels = spread(problem, s.candidate_labels);
  return s;
}

Solution infeasible_solution(const LabelingProblem& problem, Mode mode) {
  Solution s;
  s.mode = mode;
  s.feasible = false;
  s.objective = -std::numeric_limits<double>::infinity();
  s.candidate_labels.assign(problem.n, Label::O);
  s.labels = spread(problem, s.candidate_labels);
  return s;
}

Solution solve(const LabelingProblem& problem, Mode mode) {
  problem.validate();
  if (mode == Mode::Zero) return solve_zero(problem);
  BranchAndBound bb(problem, mode);
  const auto a = bb.run();
  if (!a) throw Infeasible("no assignment satisfies the " + std::string(to_string(mode)) + " constraints");
  return make_solution(problem, *a, mode);
}

Solution brute_force(const LabelingProblem& problem, Mode mode) {
  problem.validate();
  if (problem.n > 16) throw ProblemTooLarge("brute force is limited to 16 candidates");
  if (mode == Mode::Zero) {
    // Every label independently; enumerate each row.
    Solution s;
    s.mode = Mode::Zero;
    s.feasible = true;
    for (std::size_t i = 0; i < problem.n; ++i) {
      Label best = Label::O;
      double best_v = problem.logp[i][kO];
      for (Label l : kTargetLabels) {
        const double v = problem.logp[i][index_of(l)];
        if (v > best_v) {
          best = l;
          best_v = v;
        }
      }
      s.candidate_labels.push_back(best);
    }
    s.objective = objective(problem, s.candidate_labels, Mode::Zero);
    s.labels = spread(problem, s.candidate_labels);
    return s;
  }

  const std::size_t n = problem.n;
  const double base = base_score(problem);
  bool found = false;
  double best = 0;
  Assignment best_a;
  Assignment a;
  auto& z = a.z;
  // Lexicographic enumeration, so the first optimum met is the tie winner.
  // Tuples repeating a position are skipped early; constraint 1 rejects them anyway.
  const auto repeats = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j)
      if (z[j] == z[k]) return true;
    return false;
  };
  for (z[0] = 1; z[0] <= n; ++z[0])
    for (z[1] = 1; z[1] <= n; ++z[1]) {
      if (repeats(1)) continue;
      for (z[2] = 1; z[2] <= n; ++z[2]) {
        if (repeats(2)) continue;
        for (z[3] = 1; z[3] <= n; ++z[3]) {
          if (repeats(3)) continue;
          for (z[4] = 1; z[4] <= n; ++z[4]) {
            if (repeats(4)) continue;
            for (z[5] = 1; z[5] <= n; ++z[5]) {
              const ConstraintCheck c{problem, z};
              if (!c.all(mode)) continue;
              const double v = score_of(problem, base, z, mode);
              if (!found || v > best) {
                found = true;
                best = v;
                best_a = a;
              }
            }
          }
        }
      }
    }
  if (!found) throw Infeasible("no assignment satisfies the " + std::string(to_string(mode)) + " constraints");
  return make_solution(problem, best_a, mode);
}

}  // namespace evtab

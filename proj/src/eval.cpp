#include "evtab/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "evtab/errors.hpp"

namespace evtab {

std::optional<double> LabelCounts::precision() const {
  if (cp == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(cp);
}

std::optional<double> LabelCounts::recall() const {
  if (ap == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(ap);
}

LabelCounts LabelMetrics::pooled(std::span<const Label> subset) const {
  LabelCounts c;
  for (Label l : subset) {
    if (l != Label::O) c += (*this)[l];
  }
  return c;
}

LabelMetrics score(std::span<const Label> predicted, std::span<const Label> gold) {
  if (predicted.size() != gold.size())
    throw LengthMismatch("predicted and gold sequences differ in length (" +
                         std::to_string(predicted.size()) + " vs " + std::to_string(gold.size()) + ")");
  LabelMetrics m;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] != Label::O) {
      ++m[predicted[i]].cp;
      if (predicted[i] == gold[i]) ++m[predicted[i]].tp;
    }
    if (gold[i] != Label::O) ++m[gold[i]].ap;
  }
  return m;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw LengthMismatch("paired samples differ in length");
  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] - b[i] != 0) d.push_back(a[i] - b[i]);
  }
  const std::size_t n = d.size();
  if (n < 5) throw TooFewPairs(std::to_string(n) + " non-zero differences; at least 5 required");

  // Doubled mid-ranks keep everything integral.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return std::abs(d[x]) < std::abs(d[y]); });
  std::vector<std::size_t> rank2(n);
  double tie_term = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(d[order[j + 1]]) == std::abs(d[order[i]])) ++j;
    for (std::size_t k = i; k <= j; ++k) rank2[order[k]] = (i + 1) + (j + 1);
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  std::size_t plus2 = 0, total2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total2 += rank2[i];
    if (d[i] > 0) plus2 += rank2[i];
  }

  WilcoxonResult r;
  r.n = n;
  r.w_plus = static_cast<double>(plus2) / 2;
  r.w_minus = static_cast<double>(total2 - plus2) / 2;
  if (n <= 12) {
    // counts[s]: sign patterns whose positive doubled ranks sum to s.
    std::vector<std::uint64_t> counts(total2 + 1, 0);
    counts[0] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t s = total2; s >= rank2[i]; --s) counts[s] += counts[s - rank2[i]];
    }
    std::uint64_t ge = 0, le = 0;
    for (std::size_t s = 0; s <= total2; ++s) {
      if (s >= plus2) ge += counts[s];
      if (s <= plus2) le += counts[s];
    }
    const double all = std::ldexp(1.0, static_cast<int>(n));
    r.p_greater = static_cast<double>(ge) / all;
    r.p_less = static_cast<double>(le) / all;
    r.exact = true;
  } else {
    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1) / 4;
    const double var = nn * (nn + 1) * (2 * nn + 1) / 24 - tie_term / 48;
    const double sd = std::sqrt(var);
    const double z_hi = (r.w_plus - mean - 0.5) / sd;
    const double z_lo = (r.w_plus - mean + 0.5) / sd;
    r.p_greater = 0.5 * std::erfc(z_hi / std::sqrt(2.0));
    r.p_less = 0.5 * std::erfc(-z_lo / std::sqrt(2.0));
  }
  r.p_two_sided = std::min(1.0, 2 * std::min(r.p_greater, r.p_less));
  return r;
}

Interval bootstrap_ci(std::span<const double> values, double level, std::size_t resamples,
                      std::uint64_t seed) {
  if (values.empty()) throw EmptyInput("bootstrap needs at least one value");
  if (!(level > 0 && level < 1)) throw Error("confidence level must be in (0, 1)");
  if (resamples < 1000) throw Error("bootstrap needs at least 1000 resamples");
  std::mt19937_64 rng(seed);
  const std::size_t n = values.size();
  std::vector<double> means(resamples);
  for (auto& m : means) {
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) sum += values[rng() % n];
    m = sum / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const double alpha = 1 - level;
  const double b = static_cast<double>(resamples);
  const auto lo = static_cast<std::size_t>(std::floor(alpha / 2 * b));
  const auto hi = static_cast<std::size_t>(std::ceil((1 - alpha / 2) * b)) - 1;
  return {means[std::min(lo, resamples - 1)], means[std::min(hi, resamples - 1)]};
}

std::vector<int> fold_assignment(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2 || n < k) throw CorpusTooSmall(std::to_string(n) + " items cannot form " +
                                           std::to_string(k) + " folds");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i-- > 1;) std::swap(order[i], order[rng() % (i + 1)]);
  std::vector<int> fold(n);
  for (std::size_t p = 0; p < n; ++p) fold[order[p]] = static_cast<int>(p * k / n);
  return fold;
}

const ModelEval& EvalReport::model(Mode m) const {
  for (const auto& e : models) {
    if (e.mode == m) return e;
  }
  throw Error("report has no " + std::string(to_string(m)) + " model");
}

namespace {

std::vector<Label> gold_labels(const Abstract& a) {
  std::vector<Label> g;
  g.reserve(a.tokens.size());
  for (const Token& t : a.tokens) g.push_back(t.gold);
  return g;
}

std::optional<double> precision_at(const LabelMetrics& m, std::size_t k) {
  return k < kNumTargets ? m.labels[k].precision() : m.pooled().precision();
}

std::optional<double> recall_at(const LabelMetrics& m, std::size_t k) {
  return k < kNumTargets ? m.labels[k].recall() : m.pooled().recall();
}

std::string column_name(std::size_t k) {
  return k < kNumTargets ? std::string(to_string(kTargetLabels[k])) : "overall";
}

std::vector<Abstract> prepared(std::span<const Abstract> corpus) {
  std::vector<Abstract> out(corpus.begin(), corpus.end());
  const Resources resources;
  for (auto& a : out) preprocess(a, resources);
  return out;
}

// Fills averages, intervals and comparisons once counts are in.
void summarize(EvalReport& report, const EvalConfig& config) {
  const bool cv = report.protocol == "cv";
  for (auto& m : report.models) {
    for (std::size_t k = 0; k <= kNumTargets; ++k) {
      if (cv) {
        double sp = 0, sr = 0;
        std::size_t np = 0, nr = 0;
        for (const auto& f : m.per_fold) {
          if (auto p = precision_at(f, k)) sp += *p, ++np;
          if (auto r = recall_at(f, k)) sr += *r, ++nr;
        }
        if (np) m.fold_avg_precision[k] = sp / static_cast<double>(np);
        if (nr) m.fold_avg_recall[k] = sr / static_cast<double>(nr);
      }
      std::vector<double> values;
      for (const auto& a : m.per_abstract) {
        if (auto p = precision_at(a, k)) values.push_back(*p);
      }
      if (!values.empty()) {
        m.precision_ci[k] =
            bootstrap_ci(values, config.ci_level, config.resamples, config.bootstrap_seed + k);
      }
    }
  }
  // Paired units: folds under CV, abstracts under hold-out.
  for (std::size_t x = 0; x < report.models.size(); ++x) {
    for (std::size_t y = 0; y < report.models.size(); ++y) {
      const ModelEval& ma = report.models[x];
      const ModelEval& mb = report.models[y];
      if (static_cast<int>(ma.mode) <= static_cast<int>(mb.mode)) continue;
      const auto& ua = cv ? ma.per_fold : ma.per_abstract;
      const auto& ub = cv ? mb.per_fold : mb.per_abstract;
      for (std::size_t k = 0; k <= kNumTargets; ++k) {
        Comparison c{ma.mode, mb.mode, column_name(k), std::nullopt, ""};
        std::vector<double> va, vb;
        for (std::size_t u = 0; u < ua.size(); ++u) {
          const auto pa = precision_at(ua[u], k);
          const auto pb = precision_at(ub[u], k);
          if (pa && pb) {
            va.push_back(*pa);
            vb.push_back(*pb);
          }
        }
        try {
          c.test = wilcoxon_signed_rank(va, vb);
        } catch (const TooFewPairs& e) {
          c.note = e.what();
        }
        report.comparisons.push_back(std::move(c));
      }
    }
  }
}

void evaluate_split(EvalReport& report, const EvalConfig& config,
                    std::span<const Abstract> train_set, std::span<const Abstract> test_set,
                    std::vector<LabelMetrics>* fold_sums, std::vector<std::size_t> test_positions) {
  const MaxEntModel model = train(train_set, config.train);
  for (std::size_t mi = 0; mi < config.modes.size(); ++mi) {
    ModelEval& me = report.models[mi];
    const auto predictions =
        predict_corpus(model, test_set, config.modes[mi], config.inference, config.workers);
    LabelMetrics fold;
    for (std::size_t i = 0; i < test_set.size(); ++i) {
      const Prediction& p = predictions[i];
      if (p.fell_back) ++me.fallbacks;
      if (!p.solution.feasible) ++me.infeasible;
      if (!p.warning.empty()) report.warnings.push_back(p.warning);
      const LabelMetrics m = score(p.solution.labels, gold_labels(test_set[i]));
      me.per_abstract[test_positions[i]] = m;
      fold += m;
      me.pooled += m;
    }
    if (fold_sums) (*fold_sums)[mi] = fold;
  }
}

}  // namespace

EvalReport kfold(std::span<const Abstract> corpus, std::size_t k, std::uint64_t seed,
                 const EvalConfig& config) {
  const std::vector<Abstract> docs = prepared(corpus);
  EvalReport report;
  report.protocol = "cv";
  report.k = k;
  report.seed = seed;
  report.fold_average = config.fold_average;
  report.ci_level = config.ci_level;
  report.fold_of = fold_assignment(docs.size(), k, seed);
  for (const auto& a : docs) report.ids.push_back(a.id);
  for (Mode m : config.modes) {
    ModelEval e;
    e.mode = m;
    e.per_abstract.resize(docs.size());
    e.per_fold.resize(k);
    report.models.push_back(std::move(e));
  }
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<Abstract> train_set, test_set;
    std::vector<std::size_t> positions;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      if (report.fold_of[i] == static_cast<int>(f)) {
        test_set.push_back(docs[i]);
        positions.push_back(i);
      } else {
        train_set.push_back(docs[i]);
      }
    }
    std::vector<LabelMetrics> sums(config.modes.size());
    evaluate_split(report, config, train_set, test_set, &sums, positions);
    for (std::size_t mi = 0; mi < sums.size(); ++mi) report.models[mi].per_fold[f] = sums[mi];
  }
  summarize(report, config);
  return report;
}

EvalReport holdout(std::span<const Abstract> train_set, std::span<const Abstract> test_set,
                   const EvalConfig& config) {
  if (train_set.empty() || test_set.empty()) throw CorpusTooSmall("hold-out needs non-empty train and test sets");
  const std::vector<Abstract> tr = prepared(train_set);
  const std::vector<Abstract> te = prepared(test_set);
  EvalReport report;
  report.protocol = "holdout";
  report.ci_level = config.ci_level;
  for (const auto& a : te) report.ids.push_back(a.id);
  for (Mode m : config.modes) {
    ModelEval e;
    e.mode = m;
    e.per_abstract.resize(te.size());
    report.models.push_back(std::move(e));
  }
  std::vector<std::size_t> positions(te.size());
  std::iota(positions.begin(), positions.end(), 0);
  evaluate_split(report, config, tr, te, nullptr, positions);
  summarize(report, config);
  return report;
}

namespace {

std::string cell(std::optional<double> v) {
  if (!v) return "-";
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(3) << *v;
  return ss.str();
}

std::string interval_cell(const Interval& ci) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(2) << ci.lo << "-" << ci.hi;
  return ss.str();
}

}  // namespace

std::string render_table(const EvalReport& report) {
  const bool avg = report.protocol == "cv" && report.fold_average;
  const std::string proto = report.protocol == "cv" ? "CV" + std::to_string(report.k) : "HO";
  std::ostringstream out;
  std::size_t width = 9;
  const auto header = [&](const std::string& title) {
    out << title << "\n" << std::left << std::setw(8) << "" << std::setw(9) << "";
    for (std::size_t k = 0; k <= kNumTargets; ++k) out << std::right << std::setw(width) << column_name(k);
    out << "\n";
  };
  const auto rows = [&](bool precision) {
    bool first = true;
    for (const auto& m : report.models) {
      out << std::left << std::setw(8) << (first ? proto : "") << std::setw(9) << to_string(m.mode);
      for (std::size_t k = 0; k <= kNumTargets; ++k) {
        std::optional<double> v;
        if (avg) v = precision ? m.fold_avg_precision[k] : m.fold_avg_recall[k];
        else v = precision ? precision_at(m.pooled, k) : recall_at(m.pooled, k);
        out << std::right << std::setw(9) << cell(v);
      }
      out << "\n";
      first = false;
    }
  };
  header(std::string("Precision (") + (avg ? "fold average" : "pooled counts") + ")");
  rows(true);
  out << "\n";
  header(std::string("Recall (") + (avg ? "fold average" : "pooled counts") + ")");
  rows(false);
  out << "\n";
  std::ostringstream level;
  level << report.ci_level * 100;
  width = 11;
  header(level.str() + "% bootstrap intervals of per-abstract precision");
  for (const auto& m : report.models) {
    out << std::left << std::setw(8) << "" << std::setw(9) << to_string(m.mode);
    for (std::size_t k = 0; k <= kNumTargets; ++k) {
      const auto& ci = m.precision_ci[k];
      out << std::right << std::setw(width) << (ci ? interval_cell(*ci) : std::string("-"));
    }
    out << "\n";
  }
  if (!report.comparisons.empty()) {
    out << "\nWilcoxon signed-rank, two-sided p (" << (report.protocol == "cv" ? "folds" : "abstracts")
        << " paired)\n";
    for (const auto& c : report.comparisons) {
      const std::string pair = std::string(to_string(c.a)) + " vs " + std::string(to_string(c.b));
      out << "  " << std::left << std::setw(18) << pair << std::setw(8) << c.label;
      if (c.test) {
        out << "W+=" << c.test->w_plus << " n=" << c.test->n << " p=" << std::setprecision(4)
            << c.test->p_two_sided << (c.test->exact ? " (exact)" : " (normal)");
      } else {
        out << "n/a: " << c.note;
      }
      out << "\n";
    }
  }
  for (const auto& m : report.models) {
    if (m.fallbacks || m.infeasible) {
      out << "\n" << to_string(m.mode) << ": " << m.fallbacks << " vanilla fallbacks, " << m.infeasible
          << " infeasible\n";
    }
  }
  return out.str();
}

std::string report_json(const EvalReport& report) {
  using nlohmann::json;
  const auto opt = [](std::optional<double> v) { return v ? json(*v) : json(nullptr); };
  const auto counts = [](const LabelMetrics& m) {
    json j = json::object();
    for (std::size_t k = 0; k < kNumTargets; ++k) {
      const auto& c = m.labels[k];
      j[column_name(k)] = {{"tp", c.tp}, {"cp", c.cp}, {"ap", c.ap}};
    }
    return j;
  };
  json models = json::array();
  for (const auto& m : report.models) {
    json precision = json::object(), recall = json::object(), ci = json::object();
    json avg_p = json::object(), avg_r = json::object();
    for (std::size_t k = 0; k <= kNumTargets; ++k) {
      precision[column_name(k)] = opt(precision_at(m.pooled, k));
      recall[column_name(k)] = opt(recall_at(m.pooled, k));
      avg_p[column_name(k)] = opt(m.fold_avg_precision[k]);
      avg_r[column_name(k)] = opt(m.fold_avg_recall[k]);
      ci[column_name(k)] =
          m.precision_ci[k] ? json::array({m.precision_ci[k]->lo, m.precision_ci[k]->hi}) : json(nullptr);
    }
    json folds = json::array();
    for (const auto& f : m.per_fold) folds.push_back(counts(f));
    models.push_back({{"mode", to_string(m.mode)},
                      {"counts", counts(m.pooled)},
                      {"precision", precision},
                      {"recall", recall},
                      {"fold_average_precision", avg_p},
                      {"fold_average_recall", avg_r},
                      {"precision_ci", ci},
                      {"per_fold_counts", folds},
                      {"fallbacks", m.fallbacks},
                      {"infeasible", m.infeasible}});
  }
  json comps = json::array();
  for (const auto& c : report.comparisons) {
    json t = nullptr;
    if (c.test) {
      t = {{"n", c.test->n},         {"w_plus", c.test->w_plus}, {"w_minus", c.test->w_minus},
           {"p_two_sided", c.test->p_two_sided}, {"p_greater", c.test->p_greater},
           {"p_less", c.test->p_less}, {"exact", c.test->exact}};
    }
    comps.push_back({{"a", to_string(c.a)}, {"b", to_string(c.b)}, {"label", c.label}, {"test", t},
                     {"note", c.note}});
  }
  const json doc = {{"format", "evtab-eval"},
                    {"version", 1},
                    {"protocol", report.protocol},
                    {"k", report.k},
                    {"seed", report.seed},
                    {"fold_average", report.fold_average},
                    {"ci_level", report.ci_level},
                    {"ids", report.ids},
                    {"fold_of", report.fold_of},
                    {"models", models},
                    {"comparisons", comps},
                    {"warnings", report.warnings}};
  return doc.dump(2) + "\n";
}

}  // namespace evtab

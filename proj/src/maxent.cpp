#include "evtab/maxent.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "evtab/errors.hpp"

namespace evtab {

namespace {

using json = nlohmann::json;

// Parameters flattened as [weights..., bias...].
struct Objective {
  std::span<const Example> examples;
  std::size_t dim;
  double l2;
  std::array<double, kNumLabels> class_weights;

  std::size_t size() const { return kNumLabels * dim + kNumLabels; }

  double operator()(const std::vector<double>& theta, std::vector<double>& grad) const {
    grad.assign(theta.size(), 0.0);
    const double* w = theta.data();
    const double* b = theta.data() + kNumLabels * dim;
    double* gw = grad.data();
    double* gb = grad.data() + kNumLabels * dim;
    double loss = 0;
    std::array<double, kNumLabels> s{};
    for (const Example& e : examples) {
      for (std::size_t k = 0; k < kNumLabels; ++k) {
        double v = b[k];
        for (auto j : e.x.ids) v += w[k * dim + j];
        s[k] = v;
      }
      const double m = *std::max_element(s.begin(), s.end());
      double z = 0;
      for (double v : s) z += std::exp(v - m);
      const double log_z = m + std::log(z);
      const std::size_t y = index_of(e.y);
      const double c = class_weights[y];
      loss += c * (log_z - s[y]);
      for (std::size_t k = 0; k < kNumLabels; ++k) {
        const double r = c * (std::exp(s[k] - log_z) - (k == y ? 1.0 : 0.0));
        gb[k] += r;
        for (auto j : e.x.ids) gw[k * dim + j] += r;
      }
    }
    double sq = 0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      sq += theta[i] * theta[i];
      grad[i] += l2 * theta[i];
    }
    loss += 0.5 * l2 * sq;
    if (!std::isfinite(loss)) throw NonFiniteLoss("maxent objective is not finite");
    return loss;
  }
};

void check_examples(std::span<const Example> examples, std::size_t dim) {
  if (examples.empty()) throw DimensionMismatch("no training examples");
  for (const Example& e : examples) {
    for (auto j : e.x.ids) {
      if (j >= dim) throw DimensionMismatch("feature id " + std::to_string(j) + " >= " +
                                            std::to_string(dim));
    }
  }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

std::vector<double> flatten(const MaxEntModel& m) {
  std::vector<double> theta(m.weights);
  theta.insert(theta.end(), m.bias.begin(), m.bias.end());
  return theta;
}

void unflatten(const std::vector<double>& theta, MaxEntModel& m) {
  const std::size_t n = kNumLabels * m.dim();
  m.weights.assign(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(n));
  std::copy(theta.begin() + static_cast<std::ptrdiff_t>(n), theta.end(), m.bias.begin());
}

}  // namespace

MaxEntModel zero_model(FeatureDictionary dictionary, double l2) {
  MaxEntModel m;
  m.dictionary = std::move(dictionary);
  m.dictionary.freeze();
  m.weights.assign(kNumLabels * m.dictionary.size(), 0.0);
  m.l2 = l2;
  return m;
}

MaxEntModel fit(std::span<const Example> examples, FeatureDictionary dictionary,
                const TrainConfig& config, FitTrace* trace) {
  if (config.l2 < 0) throw Error("l2 must be non-negative");
  if (!(config.tolerance > 0)) throw Error("tolerance must be positive");
  MaxEntModel model = zero_model(std::move(dictionary), config.l2);
  check_examples(examples, model.dim());

  const Objective f{examples, model.dim(), config.l2, config.class_weights};
  std::vector<double> x = flatten(model);
  std::vector<double> g;
  double fx = f(x, g);

  FitTrace local;
  FitTrace& t = trace ? *trace : local;
  t = {};
  t.loss.push_back(fx);

  constexpr std::size_t kMemory = 10;
  constexpr double kArmijo = 1e-4;
  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;
  std::vector<double> d(x.size()), x_new(x.size()), g_new;

  double gnorm = std::sqrt(dot(g, g));
  while (gnorm > config.tolerance && t.iterations < config.max_iterations) {
    // Two-loop recursion: d = -H g.
    d = g;
    std::vector<double> alpha(s_hist.size());
    for (std::size_t i = s_hist.size(); i-- > 0;) {
      alpha[i] = rho_hist[i] * dot(s_hist[i], d);
      for (std::size_t j = 0; j < d.size(); ++j) d[j] -= alpha[i] * y_hist[i][j];
    }
    if (!s_hist.empty()) {
      const double gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
      for (double& v : d) v *= gamma;
    }
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * dot(y_hist[i], d);
      for (std::size_t j = 0; j < d.size(); ++j) d[j] += (alpha[i] - beta) * s_hist[i][j];
    }
    for (double& v : d) v = -v;
    double slope = dot(g, d);
    if (!(slope < 0)) {
      // Not a descent direction; restart from steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t j = 0; j < d.size(); ++j) d[j] = -g[j];
      slope = -gnorm * gnorm;
    }

    double step = s_hist.empty() ? std::min(1.0, 1.0 / gnorm) : 1.0;
    double f_new = 0;
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries, step *= 0.5) {
      for (std::size_t j = 0; j < x.size(); ++j) x_new[j] = x[j] + step * d[j];
      f_new = f(x_new, g_new);
      if (f_new <= fx + kArmijo * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted || !(f_new < fx)) break;

    std::vector<double> s(x.size()), y(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      s[j] = x_new[j] - x[j];
      y[j] = g_new[j] - g[j];
    }
    const double sy = dot(s, y);
    if (sy > 1e-12) {
      if (s_hist.size() == kMemory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }
    x.swap(x_new);
    g.swap(g_new);
    fx = f_new;
    gnorm = std::sqrt(dot(g, g));
    ++t.iterations;
    t.loss.push_back(fx);
  }
  t.gradient_norm = gnorm;
  t.converged = gnorm <= config.tolerance;
  unflatten(x, model);
  return model;
}

Probabilities predict_proba(const MaxEntModel& model, const FeatureVector& x) {
  Probabilities s = model.bias;
  const std::size_t dim = model.dim();
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    for (auto j : x.ids) {
      if (j >= dim) throw DimensionMismatch("feature id out of range");
      s[k] += model.weights[k * dim + j];
    }
  }
  const double m = *std::max_element(s.begin(), s.end());
  double z = 0;
  for (double& v : s) {
    v = std::exp(v - m);
    z += v;
  }
  for (double& v : s) v /= z;
  return s;
}

LossAndGradient loss_and_gradient(const MaxEntModel& model, std::span<const Example> batch,
                                  const std::array<double, kNumLabels>& class_weights) {
  if (model.weights.size() != kNumLabels * model.dim())
    throw DimensionMismatch("weight matrix does not match dictionary size");
  check_examples(batch, model.dim());
  const Objective f{batch, model.dim(), model.l2, class_weights};
  std::vector<double> g;
  LossAndGradient out;
  out.loss = f(flatten(model), g);
  const std::size_t n = kNumLabels * model.dim();
  out.grad_weights.assign(g.begin(), g.begin() + static_cast<std::ptrdiff_t>(n));
  std::copy(g.begin() + static_cast<std::ptrdiff_t>(n), g.end(), out.grad_bias.begin());
  return out;
}

std::string encode_model(const MaxEntModel& model) {
  json labels = json::array();
  for (Label l : kAllLabels) labels.push_back(std::string(to_string(l)));
  json rows = json::array();
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    const auto first = model.weights.begin() + static_cast<std::ptrdiff_t>(k * model.dim());
    rows.push_back(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(model.dim())));
  }
  const json doc = {{"format", kModelFormat},
                    {"version", kModelVersion},
                    {"labels", labels},
                    {"l2", model.l2},
                    {"features", model.dictionary.names()},
                    {"bias", model.bias},
                    {"weights", rows}};
  return doc.dump() + "\n";
}

MaxEntModel decode_model(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::exception& e) {
    throw DecodeError(1, 1, std::string("model: ") + e.what());
  }
  try {
    if (doc.at("format") != kModelFormat) throw DecodeError(1, 1, "not an evtab model file");
    if (doc.at("version") != kModelVersion) throw DecodeError(1, 1, "unsupported model version");
    const auto labels = doc.at("labels").get<std::vector<std::string>>();
    if (labels.size() != kNumLabels) throw DimensionMismatch("model label count");
    for (std::size_t k = 0; k < kNumLabels; ++k) {
      if (labels[k] != to_string(kAllLabels[k])) throw DecodeError(1, 1, "label order differs");
    }
    MaxEntModel m;
    m.l2 = doc.at("l2").get<double>();
    m.dictionary = FeatureDictionary::from_names(doc.at("features").get<std::vector<std::string>>());
    m.bias = doc.at("bias").get<std::array<double, kNumLabels>>();
    const auto rows = doc.at("weights").get<std::vector<std::vector<double>>>();
    if (rows.size() != kNumLabels) throw DimensionMismatch("model weight rows");
    for (const auto& r : rows) {
      if (r.size() != m.dim()) throw DimensionMismatch("model weight row length");
      m.weights.insert(m.weights.end(), r.begin(), r.end());
    }
    return m;
  } catch (const json::exception& e) {
    throw DecodeError(1, 1, std::string("model: ") + e.what());
  }
}

void save_model(const std::string& path, const MaxEntModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << encode_model(model);
  if (!out) throw Error("write failed: " + path);
}

MaxEntModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_model(ss.str());
}

}  // namespace evtab

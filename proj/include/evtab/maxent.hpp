#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "evtab/features.hpp"
#include "evtab/labels.hpp"

namespace evtab {

using Probabilities = std::array<double, kNumLabels>;  // indexed by index_of(Label)

struct TrainConfig {
  double l2 = 1.0;
  int max_iterations = 500;
  double tolerance = 1e-6;  // on the Euclidean norm of the gradient
  std::uint64_t seed = 0;   // recorded only; the optimizer is deterministic
  std::array<double, kNumLabels> class_weights = {1, 1, 1, 1, 1, 1, 1};
};

struct Example {
  FeatureVector x;
  Label y = Label::O;
};

// Softmax model over the seven labels. weights is kNumLabels rows of
// dictionary.size() columns.
struct MaxEntModel {
  FeatureDictionary dictionary;
  std::vector<double> weights;
  std::array<double, kNumLabels> bias{};
  double l2 = 1.0;

  std::size_t dim() const { return dictionary.size(); }
  double weight(Label l, std::uint32_t feature) const {
    return weights[index_of(l) * dim() + feature];
  }

  friend bool operator==(const MaxEntModel&, const MaxEntModel&) = default;
};

MaxEntModel zero_model(FeatureDictionary dictionary, double l2 = 1.0);

struct FitTrace {
  std::vector<double> loss;  // objective after each accepted step, starting at the zero model
  double gradient_norm = 0;
  int iterations = 0;
  bool converged = false;
};

// L-BFGS with Armijo backtracking on the L2-regularized, class-weighted
// negative log-likelihood. Throws DimensionMismatch on an empty example list
// or out-of-range feature ids, NonFiniteLoss if the objective leaves the reals.
MaxEntModel fit(std::span<const Example> examples, FeatureDictionary dictionary,
                const TrainConfig& config = {}, FitTrace* trace = nullptr);

Probabilities predict_proba(const MaxEntModel& model, const FeatureVector& x);

struct LossAndGradient {
  double loss = 0;
  std::vector<double> grad_weights;  // same layout as MaxEntModel::weights
  std::array<double, kNumLabels> grad_bias{};
};

// Regularized NLL sum(c_y * -log p(y|x)) + l2/2 * (|W|^2 + |b|^2) and its exact gradient.
LossAndGradient loss_and_gradient(const MaxEntModel& model, std::span<const Example> batch,
                                  const std::array<double, kNumLabels>& class_weights = {
                                      1, 1, 1, 1, 1, 1, 1});

inline constexpr std::string_view kModelFormat = "evtab-maxent";
inline constexpr int kModelVersion = 1;

std::string encode_model(const MaxEntModel& model);
MaxEntModel decode_model(std::string_view bytes);
void save_model(const std::string& path, const MaxEntModel& model);
MaxEntModel load_model(const std::string& path);

}  // namespace evtab

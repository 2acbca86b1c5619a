#pragma once

#include <span>
#include <string>
#include <vector>

#include "evtab/corpus.hpp"
#include "evtab/inference.hpp"
#include "evtab/maxent.hpp"
#include "evtab/preprocess.hpp"

namespace evtab {

struct InferenceOptions {
  double delta_a = kDefaultDelta;
  double delta_r = kDefaultDelta;
  bool strict_same_sentence = false;
  bool fallback_to_vanilla = true;  // full-mode infeasibility retries in vanilla mode
};

// Feature strings of every candidate, in candidate order.
std::vector<std::vector<std::string>> candidate_features(const Abstract& abstract,
                                                         std::span<const Candidate> candidates);

// Fits the dictionary and the classifier on the candidates of preprocessed
// abstracts. Gold labels on filtered tokens are not seen.
MaxEntModel train(std::span<const Abstract> corpus, const TrainConfig& config = {},
                  FitTrace* trace = nullptr);

struct Prediction {
  Solution solution;
  bool fell_back = false;  // full mode was infeasible and vanilla was used
  std::string warning;     // empty unless something degraded
};

// Decodes one preprocessed abstract. Never throws Infeasible or EmptyProblem:
// such abstracts come back as infeasible solutions with a warning.
Prediction predict(const MaxEntModel& model, const Abstract& abstract, Mode mode,
                   const InferenceOptions& options = {});

// predict() over a corpus on `workers` threads; output order is input order.
std::vector<Prediction> predict_corpus(const MaxEntModel& model, std::span<const Abstract> corpus,
                                       Mode mode, const InferenceOptions& options = {},
                                       unsigned workers = 1);

// Problem for an abstract under a model, with the options' deltas applied.
LabelingProblem problem_for(const MaxEntModel& model, const Abstract& abstract,
                            const InferenceOptions& options = {});

}  // namespace evtab

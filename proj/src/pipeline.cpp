#include "evtab/pipeline.hpp"

#include <thread>

#include "evtab/errors.hpp"

namespace evtab {

std::vector<std::vector<std::string>> candidate_features(const Abstract& abstract,
                                                         std::span<const Candidate> candidates) {
  std::vector<std::vector<std::string>> out;
  out.reserve(candidates.size());
  for (const Candidate& c : candidates) out.push_back(extract_features(abstract, c.token_index));
  return out;
}

MaxEntModel train(std::span<const Abstract> corpus, const TrainConfig& config, FitTrace* trace) {
  std::vector<std::vector<std::string>> features;
  std::vector<Label> labels;
  for (const Abstract& a : corpus) {
    if (!a.preprocessed) throw Error("train requires preprocessed abstracts: " + a.id);
    const auto candidates = filter_candidates(a);
    auto f = candidate_features(a, candidates);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      features.push_back(std::move(f[i]));
      labels.push_back(a.tokens[candidates[i].token_index].gold);
    }
  }
  FeatureDictionary dictionary = fit_dictionary(features);
  std::vector<Example> examples;
  examples.reserve(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    examples.push_back({vectorize(features[i], dictionary, i + 1), labels[i]});
  }
  return fit(examples, std::move(dictionary), config, trace);
}

LabelingProblem problem_for(const MaxEntModel& model, const Abstract& abstract,
                            const InferenceOptions& options) {
  if (!abstract.preprocessed) throw Error("predict requires a preprocessed abstract: " + abstract.id);
  const auto candidates = filter_candidates(abstract);
  std::vector<Probabilities> probs;
  probs.reserve(candidates.size());
  for (const auto& f : candidate_features(abstract, candidates)) {
    probs.push_back(predict_proba(model, vectorize(f, model.dictionary)));
  }
  LabelingProblem p = build_problem(abstract, candidates, probs);
  p.delta_a = options.delta_a;
  p.delta_r = options.delta_r;
  p.strict_same_sentence = options.strict_same_sentence;
  return p;
}

Prediction predict(const MaxEntModel& model, const Abstract& abstract, Mode mode,
                   const InferenceOptions& options) {
  Prediction out;
  LabelingProblem p;
  try {
    p = problem_for(model, abstract, options);
  } catch (const EmptyProblem& e) {
    out.solution.mode = mode;
    out.solution.feasible = mode == Mode::Zero;
    out.solution.labels.assign(abstract.tokens.size(), Label::O);
    out.warning = e.what();
    return out;
  }
  try {
    out.solution = solve(p, mode);
    return out;
  } catch (const Infeasible&) {
    if (mode != Mode::Full || !options.fallback_to_vanilla) {
      out.solution = infeasible_solution(p, mode);
      out.warning = abstract.id + ": " + std::string(to_string(mode)) + " problem is infeasible";
      return out;
    }
  }
  out.fell_back = true;
  out.warning = abstract.id + ": full problem is infeasible, using vanilla";
  try {
    out.solution = solve(p, Mode::Vanilla);
  } catch (const Infeasible&) {
    out.solution = infeasible_solution(p, Mode::Vanilla);
    out.warning = abstract.id + ": full and vanilla problems are infeasible";
  }
  return out;
}

std::vector<Prediction> predict_corpus(const MaxEntModel& model, std::span<const Abstract> corpus,
                                       Mode mode, const InferenceOptions& options, unsigned workers) {
  std::vector<Prediction> out(corpus.size());
  const auto run = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < corpus.size(); i += stride) {
      out[i] = predict(model, corpus[i], mode, options);
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(corpus.size())));
  if (workers <= 1) {
    run(0, 1);
    return out;
  }
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
  pool.clear();  // joins
  return out;
}

}  // namespace evtab

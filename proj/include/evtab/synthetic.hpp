#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "evtab/corpus.hpp"

namespace evtab {

enum class NoiseLevel { Zero, Low, Medium, High };

std::string_view to_string(NoiseLevel n);
std::optional<NoiseLevel> noise_from_string(std::string_view s);

struct NoiseConfig {
  // Unannotated secondary-outcome sentences after the primary result, reusing
  // its sentence frames; the count is uniform in [min, max].
  int secondary_min = 0;
  int secondary_max = 0;
  // Chance that a secondary sentence reports the primary quantity type.
  double secondary_same_type = 0;
  // Chance of each of two numeric non-result sentences opening RESULTS.
  double results_preamble = 0;
  // Baseline measurements in METHODS phrased like results.
  double baseline_distractor = 0;
  // Numerics in BACKGROUND and a numeric CONCLUSIONS sentence.
  double context_numerics = 0;
  // Between-group difference with a confidence interval after the results.
  double difference_sentence = 0;
  // Chance of drawing alternative wordings instead of the canonical one.
  double lexical_variation = 0;

  static NoiseConfig preset(NoiseLevel level);
};

// Annotated, structured abstracts following the template of the worked
// example: OBJECTIVE, METHODS and RESULTS carry the six heads, with P/A1/A2
// annotated wherever they occur in OBJECTIVE and METHODS. Deterministic per seed.
std::vector<Abstract> generate_synthetic(std::size_t n, std::uint64_t seed,
                                         const NoiseConfig& noise = {});

}  // namespace evtab

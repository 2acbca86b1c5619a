#include "evtab/labels.hpp"

namespace evtab {

namespace {

constexpr std::array<std::string_view, kNumLabels> kLabelNames = {
    "P", "A1", "A2", "OC", "R1", "R2", "O"};

constexpr std::array<std::string_view, 6> kSectionNames = {
    "BACKGROUND", "OBJECTIVE", "METHODS", "RESULTS", "CONCLUSIONS", "NONE"};

constexpr std::array<std::string_view, kNumSemanticClasses> kSemanticNames = {
    "ARM",
    "CLINICAL-TRIAL",
    "DIAGNOSTIC-TEST",
    "DISEASE-OR-MEDICAL-CONDITION",
    "FREQUENCY",
    "MEDICAL-TREATMENT",
    "OUTCOME-MEASURE",
    "PATIENTS",
    "PERIOD-OF-TIME",
    "none"};

constexpr std::array<std::string_view, 4> kChunkNames = {"NP", "VP", "PP",
                                                         "other"};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names,
                           std::string_view s) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<Enum>(i);
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Label l) { return kLabelNames[index_of(l)]; }

std::optional<Label> label_from_string(std::string_view s) {
  return lookup<Label>(kLabelNames, s);
}

std::string_view to_string(SectionClass s) {
  return kSectionNames[static_cast<std::size_t>(s)];
}

std::optional<SectionClass> section_from_string(std::string_view s) {
  return lookup<SectionClass>(kSectionNames, s);
}

std::string_view to_string(SemanticClass c) {
  return kSemanticNames[static_cast<std::size_t>(c)];
}

std::optional<SemanticClass> semantic_from_string(std::string_view s) {
  return lookup<SemanticClass>(kSemanticNames, s);
}

std::string_view to_string(ChunkType t) {
  return kChunkNames[static_cast<std::size_t>(t)];
}

std::optional<ChunkType> chunk_type_from_string(std::string_view s) {
  return lookup<ChunkType>(kChunkNames, s);
}

}  // namespace evtab

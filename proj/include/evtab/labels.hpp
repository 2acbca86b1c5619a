#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace evtab {

// Annotation classes. The order is fixed and is also the column order of every
// probability vector and weight matrix in the library.
enum class Label : std::uint8_t { P, A1, A2, OC, R1, R2, O };

inline constexpr std::size_t kNumLabels = 7;
inline constexpr std::size_t kNumTargets = 6;

inline constexpr std::array<Label, kNumLabels> kAllLabels = {
    Label::P, Label::A1, Label::A2, Label::OC, Label::R1, Label::R2, Label::O};
inline constexpr std::array<Label, kNumTargets> kTargetLabels = {
    Label::P, Label::A1, Label::A2, Label::OC, Label::R1, Label::R2};

constexpr std::size_t index_of(Label l) { return static_cast<std::size_t>(l); }

std::string_view to_string(Label l);
std::optional<Label> label_from_string(std::string_view s);

enum class SectionClass : std::uint8_t {
  Background,
  Objective,
  Methods,
  Results,
  Conclusions,
  None
};

std::string_view to_string(SectionClass s);
std::optional<SectionClass> section_from_string(std::string_view s);

enum class SemanticClass : std::uint8_t {
  Arm,
  ClinicalTrial,
  DiagnosticTest,
  DiseaseOrMedicalCondition,
  Frequency,
  MedicalTreatment,
  OutcomeMeasure,
  Patients,
  PeriodOfTime,
  None
};

inline constexpr std::size_t kNumSemanticClasses = 10;

std::string_view to_string(SemanticClass c);
std::optional<SemanticClass> semantic_from_string(std::string_view s);

enum class ChunkType : std::uint8_t { NP, VP, PP, Other };

std::string_view to_string(ChunkType t);
std::optional<ChunkType> chunk_type_from_string(std::string_view s);

}  // namespace evtab

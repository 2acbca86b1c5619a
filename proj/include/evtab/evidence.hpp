#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "evtab/corpus.hpp"
#include "evtab/inference.hpp"

namespace evtab {

// One evidence-table row. Cells are original-text slices of the chosen heads.
struct EvidenceRow {
  std::string id;
  std::string patients;
  std::string arm1;
  std::string arm2;
  std::string outcome;
  std::string result1;
  std::string result2;
  std::string status;  // "OK" or "INFEASIBLE"

  friend bool operator==(const EvidenceRow&, const EvidenceRow&) = default;
};

// Throws ModeUnsupported for zero-mode solutions.
EvidenceRow emit_evidence_table(const Abstract& abstract, const Solution& solution);

enum class TableFormat { Tsv, Csv };

void write_evidence_table(std::ostream& out, std::span<const EvidenceRow> rows, TableFormat format);
std::string format_evidence_table(std::span<const EvidenceRow> rows, TableFormat format);

}  // namespace evtab

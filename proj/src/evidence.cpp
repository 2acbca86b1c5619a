#include "evtab/evidence.hpp"

#include <array>
#include <ostream>
#include <sstream>

#include "evtab/errors.hpp"

namespace evtab {

EvidenceRow emit_evidence_table(const Abstract& abstract, const Solution& solution) {
  if (solution.mode == Mode::Zero) throw ModeUnsupported("zero-mode solutions have no unique heads");
  EvidenceRow row;
  row.id = abstract.id;
  if (!solution.feasible) {
    row.status = "INFEASIBLE";
    return row;
  }
  if (solution.labels.size() != abstract.tokens.size())
    throw LengthMismatch("solution does not cover the abstract's tokens");
  std::array<std::string*, kNumTargets> cells = {&row.patients, &row.arm1,    &row.arm2,
                                                 &row.outcome,  &row.result1, &row.result2};
  for (std::size_t i = 0; i < abstract.tokens.size(); ++i) {
    const Label l = solution.labels[i];
    if (l == Label::O) continue;
    *cells[index_of(l)] = std::string(abstract.original(abstract.tokens[i]));
  }
  row.status = "OK";
  return row;
}

namespace {

std::string tsv_cell(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

void write_evidence_table(std::ostream& out, std::span<const EvidenceRow> rows, TableFormat format) {
  const char sep = format == TableFormat::Tsv ? '\t' : ',';
  const auto cell = format == TableFormat::Tsv ? tsv_cell : csv_cell;
  const auto line = [&](const std::array<std::string, 8>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << sep;
      out << cell(cells[i]);
    }
    out << '\n';
  };
  line({"id", "patients", "arm1", "arm2", "outcome", "result1", "result2", "status"});
  for (const auto& r : rows) {
    line({r.id, r.patients, r.arm1, r.arm2, r.outcome, r.result1, r.result2, r.status});
  }
}

std::string format_evidence_table(std::span<const EvidenceRow> rows, TableFormat format) {
  std::ostringstream ss;
  write_evidence_table(ss, rows, format);
  return ss.str();
}

}  // namespace evtab

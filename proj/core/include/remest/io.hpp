#pragma once

// CSV and JSON artifacts: policy grids (r,q,action), bias (r,q,bias),
// simulation reports (k,avg_mse,avg_aoi) and JSON summaries.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "remest/mdp.hpp"
#include "remest/policy_grid.hpp"
#include "remest/simulator.hpp"

namespace remest::io {

/// Reals with six significant digits, as used in CSV output.
std::string format_real(double v);

void write_policy_csv(std::ostream& os, const PolicyGrid& policy);
/// Parses `r,q,action`; q_max is the largest q present and every grid state
/// must appear exactly once. Throws DomainError on malformed input.
PolicyGrid read_policy_csv(std::istream& is, std::string label = "file");

void write_bias_csv(std::ostream& os, const StateSpace& space, std::span<const double> bias);

/// {gain, iterations, span_residual, q_max, cost_kind} plus `damped`.
std::string solution_summary_json(const MdpSolution& sol, CostKind kind);

void write_report_csv(std::ostream& os, const SimReport& rep);

struct ReportRow {
  std::size_t k = 0;
  double avg_mse = 0.0;
  double avg_aoi = 0.0;
};
std::vector<ReportRow> read_report_csv(std::istream& is);

/// Final averages, run count, seed and 95% half-widths.
std::string report_summary_json(const SimReport& rep, const std::string& policy_label, std::uint64_t seed,
                                std::size_t horizon);

}  // namespace remest::io

#include "remest/io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "remest/errors.hpp"

namespace remest::io {

using nlohmann::json;

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::size_t parse_index(const std::string& text, std::size_t line_no) {
  std::size_t pos = 0;
  long long v = -1;
  try {
    v = std::stoll(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != text.size() || v < 0) {
    throw DomainError("line " + std::to_string(line_no) + ": expected a non-negative integer, got '" + text + "'");
  }
  return static_cast<std::size_t>(v);
}

double parse_real(const std::string& text, std::size_t line_no) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != text.size() || text.empty()) {
    throw DomainError("line " + std::to_string(line_no) + ": expected a number, got '" + text + "'");
  }
  return v;
}

}  // namespace

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_policy_csv(std::ostream& os, const PolicyGrid& policy) {
  os << "r,q,action\n";
  for (std::size_t q = 0; q <= policy.q_max(); ++q)
    for (std::size_t r = 0; r <= q; ++r) os << r << ',' << q << ',' << static_cast<int>(policy.at(r, q)) << '\n';
}

PolicyGrid read_policy_csv(std::istream& is, std::string label) {
  std::string line;
  if (!std::getline(is, line) || strip_cr(line) != "r,q,action") {
    throw DomainError("policy CSV: missing header 'r,q,action'");
  }
  struct Row {
    std::size_t r, q;
    Action a;
  };
  std::vector<Row> rows;
  std::size_t line_no = 1, q_max = 0;
  while (std::getline(is, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 3) throw DomainError("policy CSV line " + std::to_string(line_no) + ": expected 3 fields");
    const std::size_t r = parse_index(f[0], line_no), q = parse_index(f[1], line_no), a = parse_index(f[2], line_no);
    if (a > 1) throw DomainError("policy CSV line " + std::to_string(line_no) + ": action must be 0 or 1");
    if (r > q) throw DomainError("policy CSV line " + std::to_string(line_no) + ": r must not exceed q");
    rows.push_back({r, q, static_cast<Action>(a)});
    q_max = std::max(q_max, q);
  }
  if (rows.empty()) throw DomainError("policy CSV: no rows");
  const StateSpace space(q_max);
  std::vector<Action> actions(space.size());
  std::vector<bool> seen(space.size(), false);
  for (const Row& row : rows) {
    const std::size_t idx = space.index(row.r, row.q);
    if (seen[idx]) {
      throw DomainError("policy CSV: duplicate state (" + std::to_string(row.r) + "," + std::to_string(row.q) + ")");
    }
    seen[idx] = true;
    actions[idx] = row.a;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      const auto s = space.state(i);
      throw DomainError("policy CSV: missing state (" + std::to_string(s.r) + "," + std::to_string(s.q) + ")");
    }
  }
  return PolicyGrid(q_max, std::move(label), std::move(actions));
}

void write_bias_csv(std::ostream& os, const StateSpace& space, std::span<const double> bias) {
  if (bias.size() != space.size()) throw DimensionError("write_bias_csv: bias length does not match the grid");
  os << "r,q,bias\n";
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto s = space.state(i);
    os << s.r << ',' << s.q << ',' << format_real(bias[i]) << '\n';
  }
}

std::string solution_summary_json(const MdpSolution& sol, CostKind kind) {
  json j;
  j["gain"] = sol.gain;
  j["iterations"] = sol.iterations;
  j["span_residual"] = sol.span_residual;
  j["q_max"] = sol.policy.q_max();
  j["cost_kind"] = std::string(to_string(kind));
  j["damped"] = sol.damped;
  return j.dump(2);
}

void write_report_csv(std::ostream& os, const SimReport& rep) {
  os << "k,avg_mse,avg_aoi\n";
  for (std::size_t k = 0; k < rep.avg_mse_vs_k.size(); ++k) {
    os << (k + 1) << ',' << format_real(rep.avg_mse_vs_k[k]) << ',' << format_real(rep.avg_aoi_vs_k[k]) << '\n';
  }
}

std::vector<ReportRow> read_report_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || strip_cr(line) != "k,avg_mse,avg_aoi") {
    throw DomainError("report CSV: missing header 'k,avg_mse,avg_aoi'");
  }
  std::vector<ReportRow> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 3) throw DomainError("report CSV line " + std::to_string(line_no) + ": expected 3 fields");
    rows.push_back({parse_index(f[0], line_no), parse_real(f[1], line_no), parse_real(f[2], line_no)});
  }
  return rows;
}

std::string report_summary_json(const SimReport& rep, const std::string& policy_label, std::uint64_t seed,
                                std::size_t horizon) {
  json j;
  j["policy"] = policy_label;
  j["final_avg_mse"] = rep.final_avg_mse;
  j["final_avg_aoi"] = rep.final_avg_aoi;
  j["mse_half_width95"] = rep.mse_half_width95;
  j["aoi_half_width95"] = rep.aoi_half_width95;
  j["runs"] = rep.run_avg_mse.size();
  j["horizon"] = horizon;
  j["seed"] = seed;
  j["saturated_steps"] = rep.saturated_steps;
  return j.dump(2);
}

}  // namespace remest::io

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "remest/harq.hpp"
#include "remest/lti_kalman.hpp"
#include "remest/policy_grid.hpp"

namespace remest {

enum class CostKind { mse, delay };

std::string_view to_string(CostKind kind) noexcept;
/// "mse" or "delay"; throws DomainError otherwise.
CostKind parse_cost_kind(std::string_view text);

struct Outcome {
  std::size_t next = 0;  // state index
  double prob = 0.0;
};

/// Every (state, action) pair has a success and a failure outcome.
using ActionOutcomes = std::array<Outcome, 2>;

/// Finite approximation of the (r, q) MDP on {0 <= r <= q <= q_max}.
/// Costs are action independent.
class TruncatedMdp {
 public:
  /// Validates that each outcome pair sums to one within 1e-12 and that
  /// every next-state index lies in the grid.
  TruncatedMdp(std::size_t q_max, CostKind kind, std::vector<double> costs,
               std::vector<std::array<ActionOutcomes, 2>> transitions);

  std::size_t q_max() const noexcept { return space_.q_max(); }
  const StateSpace& space() const noexcept { return space_; }
  std::size_t size() const noexcept { return space_.size(); }
  CostKind cost_kind() const noexcept { return kind_; }

  double cost(std::size_t s) const { return costs_[s]; }
  std::span<const double> costs() const noexcept { return costs_; }
  const ActionOutcomes& outcomes(std::size_t s, Action a) const {
    return transitions_[s][static_cast<std::size_t>(a)];
  }

 private:
  StateSpace space_;
  CostKind kind_;
  std::vector<double> costs_;
  std::vector<std::array<ActionOutcomes, 2>> transitions_;
};

/// MSE-cost MDP: c(r, q) = Tr(f^{q+1}(P̄₀)) from the steady-state table.
TruncatedMdp build_mdp(const SteadyKalman& sk, const HarqModel& m, std::size_t q_max, CostKind kind);
/// Delay (age of information) MDP: c(r, q) = q + 1.
TruncatedMdp build_delay_mdp(const HarqModel& m, std::size_t q_max);

struct RviOptions {
  double tol = 1e-9;
  long max_iter = 100'000;
  /// Aperiodicity damping h <- (1-κ) T h + κ h, engaged when the span stalls.
  double kappa = 0.01;
  long stall_window = 1'000;
};

struct MdpSolution {
  double gain = 0.0;
  std::vector<double> bias;
  PolicyGrid policy;
  long iterations = 0;
  double span_residual = 0.0;
  /// max(tol, rounding floor of the bias magnitudes); span_residual is below it.
  double stopping_tol = 0.0;
  bool damped = false;
};

/// Relative value iteration with reference state (0,0). Stops when the span
/// of T h - h falls below tol, or when it has settled at the rounding floor
/// 8 eps max|h| (stage costs grow geometrically in q, so the floor can exceed
/// tol). Ties in the argmin go to transmit_new. Throws ConvergenceError past
/// max_iter.
MdpSolution relative_value_iteration(const TruncatedMdp& mdp, const RviOptions& opts = {});

/// Greedy policy for a value vector (tie toward transmit_new).
PolicyGrid greedy_policy(const TruncatedMdp& mdp, std::span<const double> values, std::string label);

/// Stationary distribution of the chain induced by `policy`. Throws
/// DomainError when the chain is not unichain.
std::vector<double> stationary_distribution(const TruncatedMdp& mdp, const PolicyGrid& policy);

/// Exact long-run average cost of a stationary policy.
double evaluate_policy(const TruncatedMdp& mdp, const PolicyGrid& policy);

}  // namespace remest

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "remest/errors.hpp"
#include "remest/harq.hpp"
#include "remest/lti_kalman.hpp"
#include "remest/policy_grid.hpp"

namespace remest {

enum class SimMode { analytic, trajectory };

std::string_view to_string(SimMode mode) noexcept;
SimMode parse_sim_mode(std::string_view text);

struct SimConfig {
  std::size_t horizon = 2000;  // K
  std::size_t runs = 2000;
  std::uint64_t seed = 1;
  std::size_t initial_q = 0;
  SimMode mode = SimMode::analytic;
  /// Worker threads; 0 means hardware concurrency. Results do not depend on it.
  std::size_t threads = 0;
  /// Trajectory mode: initial state covariance Σ₀ (defaults to P̄₀).
  std::optional<Mat> sigma0;
  /// Trajectory mode: abort when any estimation-error entry exceeds this.
  double state_cap = 1e100;
  /// Record the (a, r, q, τ) path of run 0.
  bool record_trace = false;
};

/// Per-step record of run 0: the step-k cost uses q_prev; then action,
/// retransmission count and detection update (r, q).
struct ChainStep {
  std::size_t q_prev = 0;
  std::size_t aoi = 0;
  Action action = Action::transmit_new;
  std::size_t r = 0;
  std::size_t q = 0;
  bool success = false;
};

struct SimReport {
  /// Cesàro running mean over steps 1..k of the cross-run mean MSE.
  std::vector<double> avg_mse_vs_k;
  std::vector<double> avg_aoi_vs_k;
  double final_avg_mse = 0.0;
  double final_avg_aoi = 0.0;
  /// Per-run time averages over the horizon.
  std::vector<double> run_avg_mse;
  std::vector<double> run_avg_aoi;
  /// 1.96 standard errors of the run averages.
  double mse_half_width95 = 0.0;
  double aoi_half_width95 = 0.0;
  double mse_std_error = 0.0;
  /// Steps whose q ran past the cost table (cost saturated).
  std::size_t saturated_steps = 0;
  std::vector<ChainStep> trace;
};

/// Monte-Carlo run of the (r, q) chain under `policy`, accruing the analytic
/// per-step MSE Tr(f^{q_{k-1}+1}(P̄₀)) and AoI q_{k-1}+1.
SimReport simulate_chain(const PolicyGrid& policy, const HarqModel& m, const SteadyKalman& sk, const SimConfig& cfg);

struct TrajectoryReport {
  /// Empirical squared error |x_k - x̂_k|² statistics.
  SimReport empirical;
  /// The analytic Tr(f^{q_{k-1}+1}(P̄₀)) along the same realised paths.
  std::vector<double> analytic_avg_mse_vs_k;
  double final_analytic_mse = 0.0;
  std::vector<double> run_avg_analytic;
  /// Time- and run-averaged (x_k - x̂_k)(x_k - x̂_k)ᵀ.
  Mat empirical_covariance;
  /// Mean and standard error of the per-run (empirical - analytic) averages.
  double paired_mean_diff = 0.0;
  double paired_std_error = 0.0;
};

/// Raised when a trajectory estimation error exceeds SimConfig::state_cap.
class SimulationBlowUp : public Error {
 public:
  SimulationBlowUp(std::size_t run, std::size_t step);
  std::size_t run() const noexcept { return run_; }
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t run_;
  std::size_t step_;
};

/// Full simulation: process, steady-state sensor filter, HARQ channel and the
/// receiver's three-branch predictor. Channel draws match simulate_chain for
/// the same seed, so both see the same (r, q) paths.
TrajectoryReport simulate_trajectory(const PolicyGrid& policy, const LtiSystem& sys, const HarqModel& m,
                                     const SteadyKalman& sk, const SimConfig& cfg);

}  // namespace remest

#include <gtest/gtest.h>

#include <cmath>

#include "remest/mdp.hpp"
#include "remest/policies.hpp"
#include "remest/simulator.hpp"
#include "support.hpp"

namespace remest {
namespace {

using testing::reference_channel;
using testing::reference_kalman;
using testing::reference_system;

SimConfig small_config(std::size_t horizon = 400, std::size_t runs = 200) {
  SimConfig cfg;
  cfg.horizon = horizon;
  cfg.runs = runs;
  cfg.seed = 42;
  cfg.threads = 2;
  return cfg;
}

PolicyGrid reference_optimal() {
  return relative_value_iteration(build_mdp(reference_kalman(), reference_channel(), 20, CostKind::mse)).policy;
}

TEST(SimulateChain, PerfectChannelSitsOnBaseline) {
  const SimReport rep = simulate_chain(reference_optimal(), reference_channel(1.0), reference_kalman(), small_config());
  const double base = cost_of_q(reference_kalman(), 0);
  for (double v : rep.avg_mse_vs_k) EXPECT_NEAR(v, base, 1e-12 * base);
  EXPECT_NEAR(rep.final_avg_mse, 9.2, 0.02);
  EXPECT_DOUBLE_EQ(rep.final_avg_aoi, 1.0);
}

TEST(SimulateChain, ArqMatchesGeometricOracleOnLightTailedChannel) {
  // (1-λ) ρ⁴ < 1 here, so the per-step cost has finite variance and the
  // sample mean concentrates.
  const double lambda = 0.95;
  const SteadyKalman& sk = reference_kalman();
  double oracle = 0.0;
  for (std::size_t q = 0; q < 20; ++q) oracle += lambda * std::pow(1 - lambda, q) * sk.cost_table[q];
  oracle += std::pow(1 - lambda, 20) * sk.cost_table[20];
  const SimReport rep = simulate_chain(arq_baseline_policy(20), reference_channel(lambda), sk, small_config(2000, 500));
  EXPECT_NEAR(rep.final_avg_mse, oracle, 0.02 * oracle);
}

TEST(SimulateChain, Deterministic) {
  const PolicyGrid p = reference_optimal();
  SimConfig cfg = small_config();
  const SimReport a = simulate_chain(p, reference_channel(), reference_kalman(), cfg);
  const SimReport b = simulate_chain(p, reference_channel(), reference_kalman(), cfg);
  EXPECT_EQ(a.avg_mse_vs_k, b.avg_mse_vs_k);
  EXPECT_EQ(a.avg_aoi_vs_k, b.avg_aoi_vs_k);
  EXPECT_EQ(a.run_avg_mse, b.run_avg_mse);
  cfg.seed = 43;
  EXPECT_NE(simulate_chain(p, reference_channel(), reference_kalman(), cfg).avg_mse_vs_k, a.avg_mse_vs_k);
}

TEST(SimulateChain, ThreadCountDoesNotChangeResults) {
  const PolicyGrid p = reference_optimal();
  SimConfig cfg = small_config(300, 70);
  cfg.threads = 1;
  const SimReport one = simulate_chain(p, reference_channel(), reference_kalman(), cfg);
  cfg.threads = 7;
  const SimReport many = simulate_chain(p, reference_channel(), reference_kalman(), cfg);
  EXPECT_EQ(one.avg_mse_vs_k, many.avg_mse_vs_k);
  EXPECT_EQ(one.run_avg_aoi, many.run_avg_aoi);
  EXPECT_EQ(one.mse_half_width95, many.mse_half_width95);
}

TEST(SimulateChain, TraceBookkeeping) {
  SimConfig cfg = small_config(2000, 1);
  cfg.record_trace = true;
  const SimReport rep = simulate_chain(psi_policy(20), reference_channel(0.5, 0.5), reference_kalman(), cfg);
  ASSERT_EQ(rep.trace.size(), 2000u);
  std::size_t q_prev = 0;
  bool retransmitted = false;
  for (const ChainStep& s : rep.trace) {
    EXPECT_EQ(s.q_prev, q_prev);
    EXPECT_EQ(s.aoi, s.q_prev + 1);
    EXPECT_LE(s.r, s.q);
    retransmitted |= s.action == Action::retransmit;
    q_prev = s.q;
  }
  EXPECT_TRUE(retransmitted);
}

TEST(SimulateChain, CostNeverBelowBaseline) {
  const double base = cost_of_q(reference_kalman(), 0);
  for (const PolicyGrid& p : {reference_optimal(), arq_baseline_policy(20), psi_policy(20)}) {
    const SimReport rep = simulate_chain(p, reference_channel(), reference_kalman(), small_config());
    for (double v : rep.avg_mse_vs_k) EXPECT_GE(v, base - 1e-9);
    EXPECT_GE(rep.final_avg_mse, base - 3 * rep.mse_std_error);
  }
}

TEST(SimulateChain, ValidatesConfig) {
  SimConfig cfg = small_config();
  cfg.runs = 0;
  EXPECT_THROW(simulate_chain(psi_policy(20), reference_channel(), reference_kalman(), cfg), DomainError);
  cfg = small_config();
  cfg.initial_q = 21;
  EXPECT_THROW(simulate_chain(psi_policy(20), reference_channel(), reference_kalman(), cfg), DomainError);
}

TEST(SimulateTrajectory, PerfectChannelMatchesBaseline) {
  const TrajectoryReport rep =
      simulate_trajectory(arq_baseline_policy(20), reference_system(), reference_channel(1.0), reference_kalman(),
                          small_config(500, 400));
  const double se = rep.empirical.mse_std_error;
  EXPECT_GT(se, 0.0);
  EXPECT_NEAR(rep.empirical.final_avg_mse, cost_of_q(reference_kalman(), 0), 3 * se);
  // Error covariance against f(P̄₀) entrywise, loosely.
  const Mat f1 = f_apply(reference_system(), reference_kalman().p_bar0);
  EXPECT_LT(linalg::max_abs_diff(rep.empirical_covariance, f1), 0.15);
}

TEST(SimulateTrajectory, NoiselessObservableSystemHasNoError) {
  const LtiSystem sys({{1.8, 0.2}, {0.2, 0.8}}, Mat::identity(2), Mat(2, 2), Mat::identity(2) * 1e-12);
  const SteadyKalman sk = riccati_steady_state(sys);
  const TrajectoryReport rep =
      simulate_trajectory(arq_baseline_policy(20), sys, reference_channel(1.0), sk, small_config(50, 8));
  EXPECT_LT(rep.empirical.final_avg_mse, 1e-9);
}

TEST(SimulateTrajectory, AgreesWithChainOnReferenceSetting) {
  const PolicyGrid p = reference_optimal();
  const SimConfig cfg = small_config(1000, 400);
  const TrajectoryReport traj = simulate_trajectory(p, reference_system(), reference_channel(), reference_kalman(), cfg);
  const SimReport chain = simulate_chain(p, reference_channel(), reference_kalman(), cfg);
  // Same channel streams, so the analytic side reproduces the chain run exactly.
  EXPECT_EQ(traj.analytic_avg_mse_vs_k, chain.avg_mse_vs_k);
  EXPECT_EQ(traj.empirical.avg_aoi_vs_k, chain.avg_aoi_vs_k);
  EXPECT_LE(std::abs(traj.paired_mean_diff), 3 * traj.paired_std_error);
}

TEST(SimulateTrajectory, InitialAgeShiftsFirstPrediction) {
  SimConfig cfg = small_config(1, 4000);
  cfg.initial_q = 2;
  const TrajectoryReport rep =
      simulate_trajectory(arq_baseline_policy(20), reference_system(), reference_channel(), reference_kalman(), cfg);
  const double want = cost_of_q(reference_kalman(), 2);
  EXPECT_NEAR(rep.final_analytic_mse, want, 1e-12 * want);
  EXPECT_NEAR(rep.empirical.final_avg_mse, want, 4 * rep.empirical.mse_std_error);
}

TEST(SimulateTrajectory, BlowUpIdentifiesStep) {
  SimConfig cfg = small_config(200, 1);
  cfg.state_cap = 50.0;
  try {
    simulate_trajectory(arq_baseline_policy(20), reference_system(), reference_channel(0.05), reference_kalman(), cfg);
    FAIL() << "expected blow-up";
  } catch (const SimulationBlowUp& e) {
    EXPECT_EQ(e.run(), 0u);
    EXPECT_GE(e.step(), 1u);
    EXPECT_LE(e.step(), 200u);
  }
}

TEST(SimMode, Parse) {
  EXPECT_EQ(parse_sim_mode("analytic"), SimMode::analytic);
  EXPECT_EQ(parse_sim_mode("trajectory"), SimMode::trajectory);
  EXPECT_THROW(parse_sim_mode("full"), DomainError);
}

}  // namespace
}  // namespace remest

#include <benchmark/benchmark.h>
#include <spdlog/spdlog.h>

#include "remest/lti_kalman.hpp"
#include "remest/mdp.hpp"
#include "remest/policies.hpp"
#include "remest/simulator.hpp"

namespace {

using namespace remest;

LtiSystem reference_system() {
  return LtiSystem({{1.8, 0.2}, {0.2, 0.8}}, {{1.0, 1.0}}, Mat::identity(2), {{1.0}});
}

const SteadyKalman& kalman() {
  static const SteadyKalman sk = riccati_steady_state(reference_system());
  return sk;
}

void BM_RiccatiSteadyState(benchmark::State& state) {
  const LtiSystem sys = reference_system();
  for (auto _ : state) benchmark::DoNotOptimize(riccati_steady_state(sys));
}
BENCHMARK(BM_RiccatiSteadyState);

void BM_RelativeValueIteration(benchmark::State& state) {
  const std::size_t q_max = static_cast<std::size_t>(state.range(0));
  RiccatiOptions opts;
  opts.table_max_index = table_index_for(q_max);
  const SteadyKalman sk = riccati_steady_state(reference_system(), opts);
  const TruncatedMdp mdp = build_mdp(sk, HarqModel::geometric(0.8, 0.5, q_max), q_max, CostKind::mse);
  for (auto _ : state) benchmark::DoNotOptimize(relative_value_iteration(mdp).gain);
  state.counters["states"] = static_cast<double>(mdp.size());
}
BENCHMARK(BM_RelativeValueIteration)->Arg(10)->Arg(20)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_EvaluatePolicy(benchmark::State& state) {
  const TruncatedMdp mdp = build_mdp(kalman(), HarqModel::geometric(0.8, 0.5, 20), 20, CostKind::mse);
  const PolicyGrid p = myopic_policy(kalman(), HarqModel::geometric(0.8, 0.5, 20), 20);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_policy(mdp, p));
}
BENCHMARK(BM_EvaluatePolicy)->Unit(benchmark::kMillisecond);

void BM_SimulateChain(benchmark::State& state) {
  const HarqModel m = HarqModel::geometric(0.8, 0.5, 20);
  const PolicyGrid p = myopic_policy(kalman(), m, 20);
  SimConfig cfg;
  cfg.horizon = 2000;
  cfg.runs = static_cast<std::size_t>(state.range(0));
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_chain(p, m, kalman(), cfg).final_avg_mse);
  state.SetItemsProcessed(state.iterations() * static_cast<long>(cfg.runs * cfg.horizon));
}
BENCHMARK(BM_SimulateChain)->Arg(16)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_SimulateTrajectory(benchmark::State& state) {
  const HarqModel m = HarqModel::geometric(0.8, 0.5, 20);
  const PolicyGrid p = myopic_policy(kalman(), m, 20);
  const LtiSystem sys = reference_system();
  SimConfig cfg;
  cfg.horizon = 2000;
  cfg.runs = 64;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_trajectory(p, sys, m, kalman(), cfg).final_analytic_mse);
  state.SetItemsProcessed(state.iterations() * static_cast<long>(cfg.runs * cfg.horizon));
}
BENCHMARK(BM_SimulateTrajectory)->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::err);
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}

#include "remest/policies.hpp"

#include "remest/errors.hpp"

namespace remest {

PolicyGrid myopic_policy(const SteadyKalman& sk, const HarqModel& m, std::size_t q_max) {
  if (sk.cost_table.size() < q_max + 2) {
    throw DimensionError("myopic_policy: cost table must cover index q_max + 1 = " + std::to_string(q_max + 1));
  }
  // trace_f(n) = Tr(fⁿ(P̄₀)) = cost_table[n-1]
  auto trace_f = [&](std::size_t n) { return sk.cost_table[n - 1]; };
  const double g0 = m.failure_prob(0);

  PolicyGrid policy(q_max, "myopic");
  for (std::size_t q = 0; q <= q_max; ++q) {
    for (std::size_t r = 0; r <= q; ++r) {
      const double g1 = m.failure_prob_saturated(r + 1);
      if (!(g0 > g1)) continue;  // no combining gain: keep transmit_new
      const double threshold = ((1.0 - g1) * trace_f(r + 2) - (1.0 - g0) * trace_f(1)) / (g0 - g1);
      if (!(trace_f(q + 2) <= threshold)) policy.set(r, q, Action::retransmit);
    }
  }
  return policy;
}

PolicyGrid delay_optimal_policy(const HarqModel& m, std::size_t q_max, const RviOptions& opts) {
  MdpSolution sol = relative_value_iteration(build_delay_mdp(m, q_max), opts);
  sol.policy.set_label("delay");
  return std::move(sol.policy);
}

PolicyGrid arq_baseline_policy(std::size_t q_max) { return PolicyGrid(q_max, "arq", Action::transmit_new); }

PolicyGrid psi_policy(std::size_t q_max) {
  PolicyGrid policy(q_max, "psi", Action::retransmit);
  for (std::size_t q = 0; q <= q_max; ++q) policy.set(q, q, Action::transmit_new);
  return policy;
}

SwitchingReport verify_switching(const PolicyGrid& p) {
  SwitchingReport rep;
  const std::size_t q_max = p.q_max();
  for (std::size_t q = 0; q <= q_max; ++q) {
    for (std::size_t r = 0; r <= q; ++r) {
      if (p.at(r, q) == Action::transmit_new) {
        for (std::size_t r2 = r + 1; r2 <= q; ++r2) {
          if (p.at(r2, q) != Action::transmit_new) rep.violations.push_back({1, {r, q}, {r2, q}});
        }
      } else {
        for (std::size_t q2 = q + 1; q2 <= q_max; ++q2) {
          if (p.at(r, q2) != Action::retransmit) rep.violations.push_back({2, {r, q}, {r, q2}});
        }
      }
    }
  }
  rep.switching = rep.violations.empty();
  return rep;
}

}  // namespace remest

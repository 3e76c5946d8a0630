#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "remest/harq.hpp"
#include "remest/lti_kalman.hpp"
#include "remest/mdp.hpp"
#include "remest/policy_grid.hpp"

namespace remest {

/// One-step lookahead rule: transmit new data unless retransmitting lowers
/// the expected next-step MSE. Writing T(n) = Tr(fⁿ(P̄₀)), the sensor sends
/// new data exactly when
///
///   T(q+2) <= [(1-g(r+1)) T(r+2) - (1-g(0)) T(1)] / (g(0) - g(r+1)),
///
/// and retransmits otherwise. With g(r+1) == g(0) (no combining gain) the
/// rule always transmits new data.
PolicyGrid myopic_policy(const SteadyKalman& sk, const HarqModel& m, std::size_t q_max);

/// Average-AoI-optimal policy: relative value iteration on the c = q+1 MDP.
PolicyGrid delay_optimal_policy(const HarqModel& m, std::size_t q_max, const RviOptions& opts = {});

/// Always transmit new data (optimal under plain ARQ).
PolicyGrid arq_baseline_policy(std::size_t q_max);

/// Retransmit everywhere except on the diagonal r == q.
PolicyGrid psi_policy(std::size_t q_max);

/// A monotonicity failure: `from` has action `from_action` but the
/// switching structure forces `to` to the same action.
struct SwitchingViolation {
  int condition = 0;  // 1: zero must propagate along r; 2: one must propagate along q
  MdpState from;
  MdpState to;
};

struct SwitchingReport {
  bool switching = true;
  std::vector<SwitchingViolation> violations;
};

/// Checks (i) a(r,q)=0 ⇒ a(r+z,q)=0 and (ii) a(r,q)=1 ⇒ a(r,q+z)=1 for all
/// in-grid z >= 1.
SwitchingReport verify_switching(const PolicyGrid& p);

}  // namespace remest

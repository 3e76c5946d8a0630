#pragma once

#include <cstddef>

#include "remest/harq.hpp"
#include "remest/lti_kalman.hpp"

namespace remest::testing {

// The reference plant used throughout: unstable 2-state process, scalar
// measurement of the state sum.
inline LtiSystem reference_system() {
  return LtiSystem({{1.8, 0.2}, {0.2, 0.8}}, {{1.0, 1.0}}, Mat::identity(2), {{1.0}});
}

inline const SteadyKalman& reference_kalman() {
  static const SteadyKalman sk = riccati_steady_state(reference_system());
  return sk;
}

inline HarqModel reference_channel(double lambda = 0.8, double h = 0.5, std::size_t q_max = 20) {
  return HarqModel::geometric(lambda, h, q_max);
}

}  // namespace remest::testing

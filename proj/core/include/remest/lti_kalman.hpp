#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "remest/errors.hpp"
#include "remest/linalg.hpp"

namespace remest {

using linalg::Mat;

/// x_{k+1} = A x_k + w_k,  y_k = C x_k + v_k,  w ~ N(0,Q), v ~ N(0,R).
class LtiSystem {
 public:
  /// Validates shapes, symmetry, Q ⪰ 0 and R ≻ 0. Throws DimensionError or DomainError.
  LtiSystem(Mat a, Mat c, Mat q, Mat r);

  const Mat& a() const noexcept { return a_; }
  const Mat& c() const noexcept { return c_; }
  const Mat& q() const noexcept { return q_; }
  const Mat& r() const noexcept { return r_; }

  std::size_t state_dim() const noexcept { return a_.rows(); }
  std::size_t measurement_dim() const noexcept { return c_.rows(); }

  /// ρ²(A), or nullopt when the eigenvalue iteration fails (n > 2 only).
  std::optional<double> rho_sq() const;

 private:
  Mat a_, c_, q_, r_;
};

struct RiccatiOptions {
  double tol = 1e-9;
  long max_iter = 100'000;
  /// Largest index N of the cost table, cost_table[N] = Tr(f^{N+1}(P̄₀)).
  std::size_t table_max_index = 24;
  /// Table entries are clamped to this value once the trace exceeds it.
  double cost_cap = 1e12;
};

/// Steady-state sensor filter: posterior covariance P̄₀, gain, and the
/// receiver cost table Tr(f^{n+1}(P̄₀)).
struct SteadyKalman {
  Mat p_bar0;
  Mat gain;
  std::vector<double> cost_table;
  long iterations = 0;
  /// Number of trailing table entries clamped to cost_cap.
  std::size_t saturated_entries = 0;

  std::size_t table_max_index() const noexcept { return cost_table.size() - 1; }
};

/// Riccati recursion did not settle; carries the last posterior iterate.
class RiccatiDivergence : public ConvergenceError {
 public:
  RiccatiDivergence(long iterations, double residual, Mat last)
      : ConvergenceError("riccati_steady_state: Kalman covariance did not converge", iterations, residual),
        last_(std::move(last)) {}
  const Mat& last_iterate() const noexcept { return last_; }

 private:
  Mat last_;
};

/// f(X) = A X Aᵀ + Q.
Mat f_apply(const LtiSystem& sys, const Mat& x);

/// One predict/update cycle of the sensor Kalman filter on a posterior
/// covariance; also yields the gain used. Exposed for fixed-point checks.
struct KalmanStep {
  Mat posterior;
  Mat gain;
};
KalmanStep kalman_covariance_step(const LtiSystem& sys, const Mat& posterior);

/// Iterates the Kalman covariance recursion from P = Q until the max-abs
/// elementwise change drops below opts.tol, then tabulates the cost table.
SteadyKalman riccati_steady_state(const LtiSystem& sys, const RiccatiOptions& opts = {});

/// Tr(f^{q+1}(P̄₀)). Throws DomainError when q is past the table.
double cost_of_q(const SteadyKalman& sk, std::size_t q);

/// Default table size for a truncated grid: covers the myopic lookahead
/// f^{q+2} and boundary transitions.
constexpr std::size_t table_index_for(std::size_t q_max) { return q_max + 4; }

}  // namespace remest

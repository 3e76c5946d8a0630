#include "remest/lti_kalman.hpp"

#include <string>

#include <spdlog/spdlog.h>

namespace remest {

using linalg::is_symmetric;
using linalg::max_abs;

namespace {

void require_psd(const Mat& m, const char* name, bool strict) {
  const double scale = std::max(1.0, max_abs(m));
  if (!is_symmetric(m, 1e-9 * scale)) {
    throw DomainError(std::string("LtiSystem: ") + name + " must be symmetric");
  }
  const double smallest = linalg::symmetric_eigenvalues(m).front();
  if (strict ? !(smallest > 0.0) : smallest < -1e-9 * scale) {
    throw DomainError(std::string("LtiSystem: ") + name +
                      (strict ? " must be positive definite" : " must be positive semi-definite"));
  }
}

}  // namespace

LtiSystem::LtiSystem(Mat a, Mat c, Mat q, Mat r)
    : a_(std::move(a)), c_(std::move(c)), q_(std::move(q)), r_(std::move(r)) {
  if (!a_.is_square()) throw DimensionError("LtiSystem: A must be square");
  const std::size_t n = a_.rows();
  if (c_.cols() != n) throw DimensionError("LtiSystem: C must have as many columns as A has rows");
  if (q_.rows() != n || q_.cols() != n) throw DimensionError("LtiSystem: Q must be n x n");
  const std::size_t m = c_.rows();
  if (r_.rows() != m || r_.cols() != m) throw DimensionError("LtiSystem: R must be m x m");
  require_psd(q_, "Q", false);
  require_psd(r_, "R", true);
}

std::optional<double> LtiSystem::rho_sq() const {
  try {
    return linalg::spectral_radius_sq(a_);
  } catch (const ConvergenceError&) {
    return std::nullopt;
  }
}

Mat f_apply(const LtiSystem& sys, const Mat& x) {
  if (x.rows() != sys.state_dim() || x.cols() != sys.state_dim()) {
    throw DimensionError("f_apply: X must be n x n");
  }
  return linalg::symmetrize(sys.a() * x * sys.a().transpose() + sys.q());
}

KalmanStep kalman_covariance_step(const LtiSystem& sys, const Mat& posterior) {
  const Mat prior = f_apply(sys, posterior);
  const Mat ct = sys.c().transpose();
  const Mat innovation = linalg::symmetrize(sys.c() * prior * ct + sys.r());
  Mat gain = prior * ct * linalg::spd_inverse(innovation);
  Mat next = (Mat::identity(sys.state_dim()) - gain * sys.c()) * prior;
  return {linalg::symmetrize(next), std::move(gain)};
}

SteadyKalman riccati_steady_state(const LtiSystem& sys, const RiccatiOptions& opts) {
  if (!(opts.tol > 0.0)) throw DomainError("riccati_steady_state: tol must be positive");

  if (auto rho = sys.rho_sq(); rho && *rho <= 1.0) {
    spdlog::warn("rho^2(A) = {:.6g} <= 1: the process is not unstable, retransmission trade-off is degenerate", *rho);
  }

  Mat p = sys.q();
  KalmanStep step = kalman_covariance_step(sys, p);
  long it = 1;
  double change = linalg::max_abs_diff(step.posterior, p);
  while (change >= opts.tol) {
    if (it >= opts.max_iter) throw RiccatiDivergence(it, change, step.posterior);
    p = step.posterior;
    step = kalman_covariance_step(sys, p);
    change = linalg::max_abs_diff(step.posterior, p);
    ++it;
  }

  SteadyKalman sk{step.posterior, step.gain, {}, it, 0};
  sk.cost_table.reserve(opts.table_max_index + 1);
  Mat x = sk.p_bar0;
  for (std::size_t n = 0; n <= opts.table_max_index; ++n) {
    if (sk.saturated_entries == 0) {
      x = f_apply(sys, x);
      const double t = linalg::trace(x);
      if (t <= opts.cost_cap) {
        sk.cost_table.push_back(t);
        continue;
      }
    }
    sk.cost_table.push_back(opts.cost_cap);
    ++sk.saturated_entries;
  }
  if (sk.saturated_entries > 0) {
    spdlog::warn("cost table saturated at {:.6g} for the last {} entries", opts.cost_cap, sk.saturated_entries);
  }
  return sk;
}

double cost_of_q(const SteadyKalman& sk, std::size_t q) {
  if (q >= sk.cost_table.size()) {
    throw DomainError("cost_of_q: q = " + std::to_string(q) + " is past the cost table (max " +
                      std::to_string(sk.table_max_index()) + ")");
  }
  return sk.cost_table[q];
}

}  // namespace remest

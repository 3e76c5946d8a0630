#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "remest/rng.hpp"

namespace remest {

/// HARQ detection model: a packet on its r-th consecutive retransmission
/// fails with probability g(r). g(0) = 1 - λ and g is non-increasing.
class HarqModel {
 public:
  /// g(r) = (1 - λ) hʳ for r = 0..r_cap; λ, h in (0, 1].
  static HarqModel geometric(double lambda, double h, std::size_t r_cap);

  /// Explicit table g(0..r_cap); validated as probabilities, non-increasing.
  static HarqModel tabulated(std::vector<double> g);

  double lambda() const noexcept { return 1.0 - g_.front(); }
  std::size_t r_cap() const noexcept { return g_.size() - 1; }
  std::span<const double> table() const noexcept { return g_; }

  /// g(r); throws DomainError for r > r_cap.
  double failure_prob(std::size_t r) const;

  /// g(min(r, r_cap)), the truncated-model convention.
  double failure_prob_saturated(std::size_t r) const noexcept {
    return g_[r < g_.size() ? r : g_.size() - 1];
  }

 private:
  explicit HarqModel(std::vector<double> g) : g_(std::move(g)) {}

  std::vector<double> g_;
};

/// λ' = 1 - max_{r>0} g(r).
double lambda_prime(const HarqModel& m);

struct StabilityReport {
  bool stable = false;
  double rho_sq = 0.0;
  double lambda_prime = 0.0;
  /// (1 - λ') ρ²(A); stable iff strictly below one.
  double product = 0.0;
};

/// Sufficient condition for a stationary deterministic optimal policy with
/// bounded average MSE: (1 - λ') ρ²(A) < 1.
StabilityReport stability_check(const HarqModel& m, double rho_sq);

enum class Detection { failure, success };

/// Bernoulli draw with success probability 1 - g(r).
Detection sample_detection(const HarqModel& m, std::size_t r, Rng& rng);

}  // namespace remest

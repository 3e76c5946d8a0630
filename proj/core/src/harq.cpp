#include "remest/harq.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "remest/errors.hpp"

namespace remest {

HarqModel HarqModel::geometric(double lambda, double h, std::size_t r_cap) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw DomainError("HarqModel: lambda must lie in (0, 1]");
  if (!(h > 0.0 && h <= 1.0)) throw DomainError("HarqModel: h must lie in (0, 1]");
  if (r_cap == 0) throw DomainError("HarqModel: r_cap must be positive");
  std::vector<double> g(r_cap + 1);
  g[0] = 1.0 - lambda;
  for (std::size_t r = 1; r <= r_cap; ++r) g[r] = (1.0 - lambda) * std::pow(h, static_cast<double>(r));
  return HarqModel(std::move(g));
}

HarqModel HarqModel::tabulated(std::vector<double> g) {
  if (g.size() < 2) throw DomainError("HarqModel: g table needs entries for r = 0 and at least r = 1");
  for (std::size_t r = 0; r < g.size(); ++r) {
    if (!(g[r] >= 0.0 && g[r] <= 1.0)) {
      throw DomainError("HarqModel: g(" + std::to_string(r) + ") is not a probability");
    }
    if (r > 0 && g[r] > g[r - 1]) {
      throw DomainError("HarqModel: g must be non-increasing in r (violated at r = " + std::to_string(r) + ")");
    }
  }
  if (!(g[0] < 1.0)) throw DomainError("HarqModel: g(0) = 1 - lambda must be below one");
  return HarqModel(std::move(g));
}

double HarqModel::failure_prob(std::size_t r) const {
  if (r > r_cap()) {
    throw DomainError("failure_prob: r = " + std::to_string(r) + " exceeds r_cap = " + std::to_string(r_cap()));
  }
  return g_[r];
}

namespace {

double max_retransmission_failure(const HarqModel& m) {
  const auto g = m.table();
  return *std::max_element(g.begin() + 1, g.end());
}

}  // namespace

double lambda_prime(const HarqModel& m) { return 1.0 - max_retransmission_failure(m); }

StabilityReport stability_check(const HarqModel& m, double rho_sq) {
  StabilityReport rep;
  rep.rho_sq = rho_sq;
  rep.lambda_prime = lambda_prime(m);
  rep.product = max_retransmission_failure(m) * rho_sq;
  rep.stable = rep.product < 1.0;
  return rep;
}

Detection sample_detection(const HarqModel& m, std::size_t r, Rng& rng) {
  return rng.uniform() < 1.0 - m.failure_prob(r) ? Detection::success : Detection::failure;
}

}  // namespace remest

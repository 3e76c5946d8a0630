#include "remest/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "remest/errors.hpp"

namespace remest {

std::string_view to_string(CostKind kind) noexcept { return kind == CostKind::mse ? "mse" : "delay"; }

CostKind parse_cost_kind(std::string_view text) {
  if (text == "mse") return CostKind::mse;
  if (text == "delay") return CostKind::delay;
  throw DomainError("unknown cost kind '" + std::string(text) + "' (expected mse or delay)");
}

TruncatedMdp::TruncatedMdp(std::size_t q_max, CostKind kind, std::vector<double> costs,
                           std::vector<std::array<ActionOutcomes, 2>> transitions)
    : space_(q_max), kind_(kind), costs_(std::move(costs)), transitions_(std::move(transitions)) {
  if (q_max < 1) throw DomainError("TruncatedMdp: q_max must be at least 1");
  if (costs_.size() != space_.size() || transitions_.size() != space_.size()) {
    throw DimensionError("TruncatedMdp: expected " + std::to_string(space_.size()) + " states");
  }
  for (std::size_t s = 0; s < space_.size(); ++s) {
    if (!std::isfinite(costs_[s])) throw DomainError("TruncatedMdp: non-finite cost");
    for (const ActionOutcomes& pair : transitions_[s]) {
      double total = 0.0;
      for (const Outcome& o : pair) {
        if (o.next >= space_.size()) throw DomainError("TruncatedMdp: next state outside the grid");
        if (!(o.prob >= 0.0 && o.prob <= 1.0)) throw DomainError("TruncatedMdp: probability out of range");
        total += o.prob;
      }
      if (std::abs(total - 1.0) > 1e-12) throw DomainError("TruncatedMdp: outcome probabilities do not sum to one");
    }
  }
}

namespace {

TruncatedMdp build(const HarqModel& m, std::size_t q_max, CostKind kind, std::span<const double> table) {
  if (q_max < 1) throw DomainError("build_mdp: q_max must be at least 1");
  const StateSpace space(q_max);
  const double g0 = m.failure_prob(0);
  std::vector<double> costs(space.size());
  std::vector<std::array<ActionOutcomes, 2>> transitions(space.size());

  for (std::size_t s = 0; s < space.size(); ++s) {
    const auto [r, q] = space.state(s);
    costs[s] = kind == CostKind::mse ? table[q] : static_cast<double>(q + 1);

    const std::size_t q_fail = std::min(q + 1, q_max);
    transitions[s][0] = {Outcome{space.index(0, 0), 1.0 - g0}, Outcome{space.index(0, q_fail), g0}};

    const double g = m.failure_prob_saturated(r + 1);
    const std::size_t r_next = std::min(r + 1, m.r_cap());
    const std::size_t q_ok = std::min(r + 1, q_max);
    transitions[s][1] = {Outcome{space.index(std::min(r_next, q_ok), q_ok), 1.0 - g},
                         Outcome{space.index(std::min(r_next, q_fail), q_fail), g}};
  }
  return TruncatedMdp(q_max, kind, std::move(costs), std::move(transitions));
}

constexpr long kFloorPatience = 50;

double expected_next(const TruncatedMdp& mdp, std::size_t s, Action a, std::span<const double> h) {
  const ActionOutcomes& o = mdp.outcomes(s, a);
  return o[0].prob * h[o[0].next] + o[1].prob * h[o[1].next];
}

}  // namespace

TruncatedMdp build_mdp(const SteadyKalman& sk, const HarqModel& m, std::size_t q_max, CostKind kind) {
  if (kind == CostKind::mse && sk.cost_table.size() <= q_max) {
    throw DimensionError("build_mdp: cost table covers q <= " + std::to_string(sk.table_max_index()) +
                         " but q_max = " + std::to_string(q_max));
  }
  return build(m, q_max, kind, sk.cost_table);
}

TruncatedMdp build_delay_mdp(const HarqModel& m, std::size_t q_max) {
  return build(m, q_max, CostKind::delay, {});
}

PolicyGrid greedy_policy(const TruncatedMdp& mdp, std::span<const double> values, std::string label) {
  if (values.size() != mdp.size()) throw DimensionError("greedy_policy: value vector has the wrong length");
  PolicyGrid policy(mdp.q_max(), std::move(label));
  for (std::size_t s = 0; s < mdp.size(); ++s) {
    const double keep = expected_next(mdp, s, Action::transmit_new, values);
    const double retx = expected_next(mdp, s, Action::retransmit, values);
    const auto st = mdp.space().state(s);
    policy.set(st.r, st.q, retx < keep ? Action::retransmit : Action::transmit_new);
  }
  return policy;
}

MdpSolution relative_value_iteration(const TruncatedMdp& mdp, const RviOptions& opts) {
  if (!(opts.tol > 0.0)) throw DomainError("relative_value_iteration: tol must be positive");
  if (!(opts.kappa > 0.0 && opts.kappa < 1.0)) throw DomainError("relative_value_iteration: kappa must lie in (0, 1)");

  const std::size_t n = mdp.size();
  const std::size_t ref = mdp.space().index(0, 0);
  std::vector<double> h(n, 0.0), th(n);

  bool damped = false;
  double best_span = std::numeric_limits<double>::infinity();
  long best_iter = 0;
  double span = best_span;

  for (long it = 1; it <= opts.max_iter; ++it) {
    for (std::size_t s = 0; s < n; ++s) {
      const double best = std::min(expected_next(mdp, s, Action::transmit_new, h),
                                   expected_next(mdp, s, Action::retransmit, h));
      th[s] = mdp.cost(s) + best;
      if (damped) th[s] = (1.0 - opts.kappa) * th[s] + opts.kappa * h[s];
    }
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t s = 0; s < n; ++s) {
      const double d = th[s] - h[s];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    span = hi - lo;

    // Bias values grow with the stage cost, so the span cannot drop below
    // the rounding noise of the largest entries. Once it sits at that floor
    // without improving, the iterate is converged to working precision.
    double magnitude = 1.0;
    for (double v : th) magnitude = std::max(magnitude, std::abs(v));
    const double noise_floor = 8.0 * std::numeric_limits<double>::epsilon() * magnitude;
    const bool at_floor = span <= noise_floor && it - best_iter >= kFloorPatience;

    if (span < opts.tol || at_floor) {
      double gain = th[ref] - h[ref];
      if (damped) gain /= 1.0 - opts.kappa;
      PolicyGrid policy = greedy_policy(mdp, h, mdp.cost_kind() == CostKind::mse ? "optimal" : "delay");
      const double offset = th[ref];
      for (double& v : th) v -= offset;
      return MdpSolution{gain, std::move(th), std::move(policy), it, span, std::max(opts.tol, noise_floor), damped};
    }

    if (span < best_span * (1.0 - 1e-3)) {
      best_span = span;
      best_iter = it;
    } else if (!damped && span > noise_floor && it - best_iter >= opts.stall_window) {
      damped = true;
      best_span = std::numeric_limits<double>::infinity();
      best_iter = it;
    }

    const double offset = th[ref];
    for (std::size_t s = 0; s < n; ++s) h[s] = th[s] - offset;
  }
  throw ConvergenceError("relative_value_iteration: span did not fall below tolerance", opts.max_iter, span);
}

std::vector<double> stationary_distribution(const TruncatedMdp& mdp, const PolicyGrid& policy) {
  if (policy.q_max() != mdp.q_max()) throw DimensionError("stationary_distribution: policy grid does not match the MDP");
  const std::size_t n = mdp.size();
  linalg::Mat p(n, n);
  for (std::size_t s = 0; s < n; ++s) {
    const auto st = mdp.space().state(s);
    for (const Outcome& o : mdp.outcomes(s, policy.at(st.r, st.q))) p(s, o.next) += o.prob;
  }

  // reach[s][t]: t is reachable from s along positive-probability edges.
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> stack{s};
    reach[s][s] = 1;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      const auto st = mdp.space().state(u);
      for (const Outcome& o : mdp.outcomes(u, policy.at(st.r, st.q))) {
        if (o.prob > 0.0 && !reach[s][o.next]) {
          reach[s][o.next] = 1;
          stack.push_back(o.next);
        }
      }
    }
  }
  std::vector<std::size_t> recurrent;
  for (std::size_t s = 0; s < n; ++s) {
    bool closed = true;
    for (std::size_t t = 0; t < n && closed; ++t) closed = !reach[s][t] || reach[t][s];
    if (closed) recurrent.push_back(s);
  }
  for (std::size_t s : recurrent) {
    if (!reach[recurrent.front()][s]) {
      throw DomainError("stationary_distribution: policy-induced chain is not unichain");
    }
  }

  // Grassmann-Taksar-Heyman elimination on the recurrent class. It never
  // subtracts, so states with tiny stationary mass keep full relative accuracy.
  const std::size_t m = recurrent.size();
  linalg::Mat w(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) w(i, j) = p(recurrent[i], recurrent[j]);
  }
  for (std::size_t k = m - 1; k > 0; --k) {
    double out = 0.0;
    for (std::size_t j = 0; j < k; ++j) out += w(k, j);
    for (std::size_t i = 0; i < k; ++i) w(i, k) /= out;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) w(i, j) += w(i, k) * w(k, j);
    }
  }
  std::vector<double> x(m, 0.0);
  x[0] = 1.0;
  double total = 1.0;
  for (std::size_t k = 1; k < m; ++k) {
    for (std::size_t i = 0; i < k; ++i) x[k] += x[i] * w(i, k);
    total += x[k];
  }
  std::vector<double> pi(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) pi[recurrent[i]] = x[i] / total;
  return pi;
}

double evaluate_policy(const TruncatedMdp& mdp, const PolicyGrid& policy) {
  const std::vector<double> pi = stationary_distribution(mdp, policy);
  double gain = 0.0;
  for (std::size_t s = 0; s < pi.size(); ++s) gain += pi[s] * mdp.cost(s);
  return gain;
}

}  // namespace remest

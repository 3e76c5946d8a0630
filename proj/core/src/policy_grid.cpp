#include "remest/policy_grid.hpp"

#include <algorithm>

#include "remest/errors.hpp"

namespace remest {

StateSpace::StateSpace(std::size_t q_max) : q_max_(q_max) {}

std::size_t StateSpace::index(std::size_t r, std::size_t q) const {
  if (!contains(r, q)) {
    throw DomainError("state (" + std::to_string(r) + "," + std::to_string(q) +
                      ") is outside the grid with q_max = " + std::to_string(q_max_));
  }
  return q * (q + 1) / 2 + r;
}

MdpState StateSpace::state(std::size_t idx) const {
  if (idx >= size()) throw DomainError("state index out of range");
  std::size_t q = 0;
  while ((q + 1) * (q + 2) / 2 <= idx) ++q;
  return {idx - q * (q + 1) / 2, q};
}

PolicyGrid::PolicyGrid(std::size_t q_max, std::string label, Action fill)
    : space_(q_max), label_(std::move(label)), actions_(space_.size(), fill) {}

PolicyGrid::PolicyGrid(std::size_t q_max, std::string label, std::vector<Action> actions)
    : space_(q_max), label_(std::move(label)), actions_(std::move(actions)) {
  if (actions_.size() != space_.size()) {
    throw DimensionError("PolicyGrid: expected " + std::to_string(space_.size()) + " actions, got " +
                         std::to_string(actions_.size()));
  }
  for (Action a : actions_) {
    if (a != Action::transmit_new && a != Action::retransmit) throw DomainError("PolicyGrid: action must be 0 or 1");
  }
}

Action PolicyGrid::at_saturated(std::size_t r, std::size_t q) const noexcept {
  const std::size_t qc = std::min(q, q_max());
  const std::size_t rc = std::min(r, qc);
  return actions_[qc * (qc + 1) / 2 + rc];
}

std::size_t PolicyGrid::count(Action a) const noexcept {
  return static_cast<std::size_t>(std::count(actions_.begin(), actions_.end(), a));
}

}  // namespace remest

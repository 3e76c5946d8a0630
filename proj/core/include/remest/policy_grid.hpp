#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace remest {

/// (r, q): consecutive retransmissions of the in-flight packet and age of
/// the newest delivered sensor estimate. Always r <= q.
struct MdpState {
  std::size_t r = 0;
  std::size_t q = 0;
  friend auto operator<=>(const MdpState&, const MdpState&) = default;
};

enum class Action : std::uint8_t { transmit_new = 0, retransmit = 1 };

/// Enumeration of the truncated grid {(r, q) : 0 <= r <= q <= q_max} in
/// lexicographic (q, r) order.
class StateSpace {
 public:
  explicit StateSpace(std::size_t q_max);

  std::size_t q_max() const noexcept { return q_max_; }
  std::size_t size() const noexcept { return (q_max_ + 1) * (q_max_ + 2) / 2; }

  bool contains(std::size_t r, std::size_t q) const noexcept { return r <= q && q <= q_max_; }
  /// Throws DomainError for states outside the grid.
  std::size_t index(std::size_t r, std::size_t q) const;
  std::size_t index(MdpState s) const { return index(s.r, s.q); }
  MdpState state(std::size_t idx) const;

 private:
  std::size_t q_max_;
};

/// Stationary deterministic policy on the truncated grid.
class PolicyGrid {
 public:
  /// Every state starts with `fill`.
  PolicyGrid(std::size_t q_max, std::string label, Action fill = Action::transmit_new);
  PolicyGrid(std::size_t q_max, std::string label, std::vector<Action> actions);

  std::size_t q_max() const noexcept { return space_.q_max(); }
  const StateSpace& space() const noexcept { return space_; }
  const std::string& label() const noexcept { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  Action at(std::size_t r, std::size_t q) const { return actions_[space_.index(r, q)]; }
  /// Lookup with (r, q) clamped to the grid, as used past the truncation.
  Action at_saturated(std::size_t r, std::size_t q) const noexcept;
  void set(std::size_t r, std::size_t q, Action a) { actions_[space_.index(r, q)] = a; }

  const std::vector<Action>& actions() const noexcept { return actions_; }
  std::size_t count(Action a) const noexcept;

  /// Grid equality; labels are ignored.
  friend bool operator==(const PolicyGrid& x, const PolicyGrid& y) {
    return x.q_max() == y.q_max() && x.actions_ == y.actions_;
  }

 private:
  StateSpace space_;
  std::string label_;
  std::vector<Action> actions_;
};

}  // namespace remest

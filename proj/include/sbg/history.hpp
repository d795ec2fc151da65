// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sbg/rng.hpp"

namespace sbg {

using JointAction = std::vector<int>;

// Alternating sequence s^0, a^0, s^1, a^1, ..., s^t. Always starts and ends
// with a state; length() is the number of joint actions taken (t).
class History {
 public:
  History() = default;
  explicit History(int initial_state) { reset(initial_state); }

  void reset(int initial_state) {
    states_.assign(1, initial_state);
    actions_.clear();
    hashes_.assign(1, hash_combine(0x5b6e7d8c9a0b1c2dULL, static_cast<std::uint64_t>(initial_state)));
  }

  int length() const { return static_cast<int>(actions_.size()); }
  bool empty() const { return states_.empty(); }

  int state_at(int tau) const { return states_.at(static_cast<std::size_t>(tau)); }
  const JointAction& action_at(int tau) const { return actions_.at(static_cast<std::size_t>(tau)); }
  int current_state() const { return states_.back(); }

  void append(const JointAction& a, int next_state) {
    std::uint64_t h = hashes_.back();
    for (int ai : a) h = hash_combine(h, static_cast<std::uint64_t>(ai) + 1);
    h = hash_combine(h, static_cast<std::uint64_t>(next_state) + 0x9e37ULL);
    actions_.push_back(a);
    states_.push_back(next_state);
    hashes_.push_back(h);
  }

  // Removes the last (action, state) pair; used for backtracking expansions.
  void pop() {
    if (actions_.empty()) throw std::logic_error("History::pop on length-0 history");
    actions_.pop_back();
    states_.pop_back();
    hashes_.pop_back();
  }

  History prefix(int tau) const {
    if (tau < 0 || tau > length()) throw std::out_of_range("History::prefix: bad tau");
    History h;
    h.states_.assign(states_.begin(), states_.begin() + tau + 1);
    h.actions_.assign(actions_.begin(), actions_.begin() + tau);
    h.hashes_.assign(hashes_.begin(), hashes_.begin() + tau + 1);
    return h;
  }

  // Hash of the tau-prefix in O(1); prefix hashes are cumulative.
  std::uint64_t prefix_hash(int tau) const { return hashes_.at(static_cast<std::size_t>(tau)); }
  std::uint64_t hash() const { return hashes_.back(); }

  bool operator==(const History& other) const {
    return states_ == other.states_ && actions_ == other.actions_;
  }

 private:
  std::vector<int> states_;
  std::vector<JointAction> actions_;
  std::vector<std::uint64_t> hashes_;
};

}  // namespace sbg

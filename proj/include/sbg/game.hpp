// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbg/history.hpp"

namespace sbg {

inline constexpr double kDistributionTolerance = 1e-9;

struct ModelError : std::runtime_error {
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

// Stochastic game skeleton: finite states, per-player action sets, a
// transition kernel over states, and per-player payoff tables. Terminal
// states are absorbing with zero payoff. Type-dependent payoff views live on
// behaviours, not here, so one Game serves every type pool.
class Game {
 public:
  Game(int num_states, int initial_state, std::vector<int> terminal_states,
       std::vector<int> actions_per_player)
      : num_states_(num_states),
        initial_state_(initial_state),
        terminal_(static_cast<std::size_t>(num_states), false),
        actions_per_player_(std::move(actions_per_player)) {
    if (num_states_ < 1) throw ModelError("game needs at least one state");
    if (actions_per_player_.size() < 2) throw ModelError("game needs n >= 2 players");
    if (initial_state_ < 0 || initial_state_ >= num_states_)
      throw ModelError("initial state outside state set");
    for (int a : actions_per_player_)
      if (a < 1) throw ModelError("every player needs at least one action");
    for (int s : terminal_states) {
      if (s < 0 || s >= num_states_) throw ModelError("terminal state outside state set");
      terminal_[static_cast<std::size_t>(s)] = true;
    }
    num_joint_ = 1;
    for (int a : actions_per_player_) num_joint_ *= a;
    transitions_.resize(static_cast<std::size_t>(num_states_) * num_joint_);
    payoffs_.assign(actions_per_player_.size(),
                    std::vector<double>(static_cast<std::size_t>(num_states_) * num_joint_, 0.0));
  }

  int num_states() const { return num_states_; }
  int num_players() const { return static_cast<int>(actions_per_player_.size()); }
  int num_actions(int player) const { return actions_per_player_.at(static_cast<std::size_t>(player)); }
  int initial_state() const { return initial_state_; }
  bool is_terminal(int state) const { return terminal_.at(static_cast<std::size_t>(state)); }
  int num_joint_actions() const { return num_joint_; }

  int joint_index(const JointAction& a) const {
    if (static_cast<int>(a.size()) != num_players())
      throw ModelError("joint action arity mismatch");
    int idx = 0;
    for (int i = 0; i < num_players(); ++i) {
      if (a[static_cast<std::size_t>(i)] < 0 || a[static_cast<std::size_t>(i)] >= num_actions(i))
        throw ModelError("action id out of range");
      idx = idx * num_actions(i) + a[static_cast<std::size_t>(i)];
    }
    return idx;
  }

  JointAction joint_from_index(int idx) const {
    JointAction a(static_cast<std::size_t>(num_players()));
    for (int i = num_players() - 1; i >= 0; --i) {
      a[static_cast<std::size_t>(i)] = idx % num_actions(i);
      idx /= num_actions(i);
    }
    return a;
  }

  void set_transition(int state, const JointAction& a, std::vector<std::pair<int, double>> dist) {
    transitions_.at(cell(state, a)) = std::move(dist);
  }

  void set_payoff(int player, int state, const JointAction& a, double value) {
    payoffs_.at(static_cast<std::size_t>(player)).at(cell(state, a)) = value;
  }

  const std::vector<std::pair<int, double>>& transitions(int state, const JointAction& a) const {
    return transitions_.at(cell(state, a));
  }

  double payoff(int player, int state, const JointAction& a) const {
    return payoffs_.at(static_cast<std::size_t>(player)).at(cell(state, a));
  }

  // Fills unset rows (self-loop), forces terminal rows absorbing, and checks
  // the model invariants. Call once after construction.
  void finalize() {
    for (int s = 0; s < num_states_; ++s) {
      for (int j = 0; j < num_joint_; ++j) {
        auto& row = transitions_[static_cast<std::size_t>(s) * num_joint_ + j];
        if (is_terminal(s)) {
          row = {{s, 1.0}};
          for (auto& table : payoffs_)
            if (table[static_cast<std::size_t>(s) * num_joint_ + j] != 0.0)
              throw ModelError("terminal states must have zero payoff");
          continue;
        }
        if (row.empty()) row = {{s, 1.0}};
        double total = 0.0;
        for (auto& [next, p] : row) {
          if (next < 0 || next >= num_states_) throw ModelError("transition target outside state set");
          if (p < 0.0) throw ModelError("negative transition probability");
          total += p;
        }
        if (std::abs(total - 1.0) > kDistributionTolerance)
          throw ModelError("transition distribution does not sum to 1");
      }
    }
    finalized_ = true;
  }

  bool finalized() const { return finalized_; }

  // Repeated two-player matrix game: a single non-terminal state, payoffs
  // indexed row-major by (row action, column action).
  static Game repeated_matrix(const std::vector<std::vector<double>>& u1,
                              const std::vector<std::vector<double>>& u2) {
    int rows = static_cast<int>(u1.size());
    int cols = rows > 0 ? static_cast<int>(u1[0].size()) : 0;
    if (rows < 1 || cols < 1 || u2.size() != u1.size())
      throw ModelError("bad matrix payoff shape");
    Game g(1, 0, {}, {rows, cols});
    for (int r = 0; r < rows; ++r) {
      if (static_cast<int>(u1[static_cast<std::size_t>(r)].size()) != cols ||
          static_cast<int>(u2[static_cast<std::size_t>(r)].size()) != cols)
        throw ModelError("ragged matrix payoff shape");
      for (int c = 0; c < cols; ++c) {
        JointAction a{r, c};
        g.set_payoff(0, 0, a, u1[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
        g.set_payoff(1, 0, a, u2[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
      }
    }
    g.finalize();
    return g;
  }

  // Single-state game with the given action counts and all-zero payoffs.
  // Convenient for interaction processes where only action sequences matter.
  static Game single_state(std::vector<int> actions_per_player) {
    Game g(1, 0, {}, std::move(actions_per_player));
    g.finalize();
    return g;
  }

 private:
  std::size_t cell(int state, const JointAction& a) const {
    if (state < 0 || state >= num_states_) throw ModelError("state id out of range");
    return static_cast<std::size_t>(state) * static_cast<std::size_t>(num_joint_) +
           static_cast<std::size_t>(joint_index(a));
  }

  int num_states_;
  int initial_state_;
  std::vector<bool> terminal_;
  std::vector<int> actions_per_player_;
  int num_joint_ = 0;
  bool finalized_ = false;
  std::vector<std::vector<std::pair<int, double>>> transitions_;
  std::vector<std::vector<double>> payoffs_;
};

}  // namespace sbg

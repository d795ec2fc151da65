// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "sbg/behaviour.hpp"
#include "sbg/game.hpp"

namespace sbg {

// Linear epsilon schedule: flat at eps_high up to t_start, linear down to 0
// at t_end, 0 afterwards.
struct EpsilonSchedule {
  double eps_high = 0.7;
  int t_start = 1000;
  int t_end = 2000;

  double at(int t) const {
    if (t <= t_start) return eps_high;
    if (t >= t_end) return 0.0;
    return eps_high * static_cast<double>(t_end - t) / static_cast<double>(t_end - t_start);
  }
};

struct QLearningParams {
  double learning_rate = 0.1;
  double discount = 0.95;
  double initial_value = 0.0;
  EpsilonSchedule epsilon;
};

// Tabular Q-learning type with epsilon-greedy action selection. The payoff
// view is the type's own reward function u_j(s, a); Q-values are recomputed
// purely from the history by replaying updates, with an incremental cache
// keyed by prefix hash so consecutive evaluations stay O(1).
class QLearningBehaviour final : public Behaviour {
 public:
  using PayoffView = std::function<double(const Game&, int state, const JointAction&)>;

  QLearningBehaviour(std::string id, PayoffView payoff, QLearningParams params)
      : id_(std::move(id)), payoff_(std::move(payoff)), params_(params) {}

  const std::string& id() const override { return id_; }

  std::vector<double> action_probabilities(const Game& game, const History& h,
                                           int player) const override {
    const std::vector<std::vector<double>>& q = replay(game, h, player);
    int s = h.current_state();
    int n = game.num_actions(player);
    const std::vector<double>& row = q[static_cast<std::size_t>(s)];
    double best = *std::max_element(row.begin(), row.end());
    int ties = 0;
    for (double v : row)
      if (v >= best - 1e-12) ++ties;
    double eps = params_.epsilon.at(h.length());
    std::vector<double> out(static_cast<std::size_t>(n), eps / n);
    for (int a = 0; a < n; ++a)
      if (row[static_cast<std::size_t>(a)] >= best - 1e-12)
        out[static_cast<std::size_t>(a)] += (1.0 - eps) / ties;
    return out;
  }

  // From-scratch Q table after replaying the whole history; test hook for
  // checking the incremental cache.
  std::vector<std::vector<double>> replay_from_scratch(const Game& game, const History& h,
                                                       int player) const {
    std::vector<std::vector<double>> q(
        static_cast<std::size_t>(game.num_states()),
        std::vector<double>(static_cast<std::size_t>(game.num_actions(player)),
                            params_.initial_value));
    for (int tau = 0; tau < h.length(); ++tau) apply_update(game, h, tau, player, q);
    return q;
  }

 private:
  void apply_update(const Game& game, const History& h, int tau, int player,
                    std::vector<std::vector<double>>& q) const {
    int s = h.state_at(tau);
    const JointAction& a = h.action_at(tau);
    int own = a.at(static_cast<std::size_t>(player));
    int next = h.state_at(tau + 1);
    double reward = payoff_(game, s, a);
    const std::vector<double>& next_row = q[static_cast<std::size_t>(next)];
    double target = reward + params_.discount * *std::max_element(next_row.begin(), next_row.end());
    double& cell = q[static_cast<std::size_t>(s)][static_cast<std::size_t>(own)];
    cell += params_.learning_rate * (target - cell);
  }

  const std::vector<std::vector<double>>& replay(const Game& game, const History& h,
                                                 int player) const {
    int t = h.length();
    if (cache_valid_ && cache_player_ == player && cache_length_ == t &&
        cache_hash_ == h.prefix_hash(t))
      return cache_q_;
    if (cache_valid_ && cache_player_ == player && cache_length_ == t - 1 &&
        cache_hash_ == h.prefix_hash(t - 1)) {
      apply_update(game, h, t - 1, player, cache_q_);
    } else {
      cache_q_ = replay_from_scratch(game, h, player);
    }
    cache_valid_ = true;
    cache_player_ = player;
    cache_length_ = t;
    cache_hash_ = h.prefix_hash(t);
    return cache_q_;
  }

  std::string id_;
  PayoffView payoff_;
  QLearningParams params_;
  mutable bool cache_valid_ = false;
  mutable int cache_player_ = -1;
  mutable int cache_length_ = 0;
  mutable std::uint64_t cache_hash_ = 0;
  mutable std::vector<std::vector<double>> cache_q_;
};

inline BehaviourPtr q_learning_behaviour(std::string id, QLearningBehaviour::PayoffView payoff,
                                         QLearningParams params = {}) {
  return std::make_shared<QLearningBehaviour>(std::move(id), std::move(payoff), params);
}

}  // namespace sbg

// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "sbg/behaviour.hpp"
#include "sbg/game.hpp"

namespace sbg {

// Pure maximin action for `player` in a repeated matrix game, ties to the
// lowest index.
inline int maximin_action(const Game& game, int player) {
  int opponent = 1 - player;
  int best_action = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int own = 0; own < game.num_actions(player); ++own) {
    double worst = std::numeric_limits<double>::infinity();
    for (int opp = 0; opp < game.num_actions(opponent); ++opp) {
      JointAction a(2);
      a[static_cast<std::size_t>(player)] = own;
      a[static_cast<std::size_t>(opponent)] = opp;
      worst = std::min(worst, game.payoff(player, 0, a));
    }
    if (worst > best_value + 1e-12) {
      best_value = worst;
      best_action = own;
    }
  }
  return best_action;
}

// Punishment action: our action that minimises the opponent's best reply
// payoff, ties to the lowest index.
inline int minimax_punish_action(const Game& game, int player) {
  int opponent = 1 - player;
  int best_action = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (int own = 0; own < game.num_actions(player); ++own) {
    double reachable = -std::numeric_limits<double>::infinity();
    for (int opp = 0; opp < game.num_actions(opponent); ++opp) {
      JointAction a(2);
      a[static_cast<std::size_t>(player)] = own;
      a[static_cast<std::size_t>(opponent)] = opp;
      reachable = std::max(reachable, game.payoff(opponent, 0, a));
    }
    if (reachable < best_value - 1e-12) {
      best_value = reachable;
      best_action = own;
    }
  }
  return best_action;
}

enum class LftRole { leader, follower, trigger };

// Leader/follower/trigger agents around a target cycle of joint actions.
// All three replay the cycle while the other player cooperates. On a
// deviation, the leader punishes with the minimax action for a fixed number
// of steps and then restarts the cycle, the follower re-enters the cycle at
// a random position (a mixture over positions on the reset step), and the
// trigger plays its maximin action forever.
class LftBehaviour final : public Behaviour {
 public:
  LftBehaviour(std::string id, LftRole role, std::vector<JointAction> target,
               int punish_steps = 2)
      : id_(std::move(id)),
        role_(role),
        target_(std::move(target)),
        punish_steps_(punish_steps),
        seed_(hash_string(id_)) {
    if (target_.empty()) throw ModelError("target solution must be non-empty");
  }

  const std::string& id() const override { return id_; }

  std::vector<double> action_probabilities(const Game& game, const History& h,
                                           int player) const override {
    if (game.num_players() != 2) throw ModelError("leader/follower/trigger expects 2 players");
    int opponent = 1 - player;
    int len = static_cast<int>(target_.size());
    int pos = 0;
    int punish = 0;
    bool tripped = false;
    bool pending_reset = false;

    for (int tau = 0; tau < h.length(); ++tau) {
      int realized_own = h.action_at(tau).at(static_cast<std::size_t>(player));
      int realized_opp = h.action_at(tau).at(static_cast<std::size_t>(opponent));
      if (role_ == LftRole::trigger) {
        if (tripped) continue;
        if (realized_opp != part(pos, opponent))
          tripped = true;
        else
          pos = (pos + 1) % len;
        continue;
      }
      if (role_ == LftRole::leader) {
        if (punish > 0) {
          if (--punish == 0) pos = 0;
          continue;
        }
        if (realized_opp != part(pos, opponent))
          punish = punish_steps_;
        else
          pos = (pos + 1) % len;
        continue;
      }
      // follower
      int pos_tau = pos;
      if (pending_reset) {
        pos_tau = infer_reset_position(realized_own, player, tau);
        pending_reset = false;
      }
      if (realized_opp != part(pos_tau, opponent)) pending_reset = true;
      pos = (pos_tau + 1) % len;
    }

    int n = game.num_actions(player);
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    if (role_ == LftRole::trigger && tripped) {
      out[static_cast<std::size_t>(maximin_action(game, player))] = 1.0;
    } else if (role_ == LftRole::leader && punish > 0) {
      out[static_cast<std::size_t>(minimax_punish_action(game, player))] = 1.0;
    } else if (role_ == LftRole::follower && pending_reset) {
      for (int q = 0; q < len; ++q)
        out[static_cast<std::size_t>(part(q, player))] += 1.0 / static_cast<double>(len);
    } else {
      out[static_cast<std::size_t>(part(pos, player))] = 1.0;
    }
    return out;
  }

  LftRole role() const { return role_; }
  const std::vector<JointAction>& target() const { return target_; }

 private:
  int part(int pos, int player) const {
    return target_[static_cast<std::size_t>(pos)].at(static_cast<std::size_t>(player));
  }

  int infer_reset_position(int realized_own, int player, int tau) const {
    std::vector<int> candidates;
    for (int q = 0; q < static_cast<int>(target_.size()); ++q)
      if (part(q, player) == realized_own) candidates.push_back(q);
    std::uint64_t draw =
        static_cast<std::uint64_t>(hashed_uniform(seed_, static_cast<std::uint64_t>(tau)) * (1 << 30));
    if (candidates.empty()) return static_cast<int>(draw % target_.size());
    return candidates[static_cast<std::size_t>(draw % candidates.size())];
  }

  std::string id_;
  LftRole role_;
  std::vector<JointAction> target_;
  int punish_steps_;
  std::uint64_t seed_;
};

// All pure joint-action cycles of length <= 2 over a 2x2 game: the four
// single cells plus the six unordered pairs of distinct cells.
inline std::vector<std::vector<JointAction>> default_lft_targets(const Game& game) {
  std::vector<JointAction> cells;
  for (int r = 0; r < game.num_actions(0); ++r)
    for (int c = 0; c < game.num_actions(1); ++c) cells.push_back({r, c});
  std::vector<std::vector<JointAction>> targets;
  for (const auto& cell : cells) targets.push_back({cell});
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (std::size_t j = i + 1; j < cells.size(); ++j) targets.push_back({cells[i], cells[j]});
  return targets;
}

inline std::vector<BehaviourPtr> make_lft_pool(const Game&,
                                               const std::vector<std::vector<JointAction>>& targets) {
  std::vector<BehaviourPtr> pool;
  for (const auto& target : targets) {
    std::string desc;
    for (const auto& cell : target) {
      for (int ai : cell) desc += std::to_string(ai);
      desc += '.';
    }
    pool.push_back(std::make_shared<LftBehaviour>("lft-leader-" + desc, LftRole::leader, target));
    pool.push_back(std::make_shared<LftBehaviour>("lft-follower-" + desc, LftRole::follower, target));
    pool.push_back(std::make_shared<LftBehaviour>("lft-trigger-" + desc, LftRole::trigger, target));
  }
  return pool;
}

}  // namespace sbg

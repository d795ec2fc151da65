// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <string>
#include <vector>

#include "sbg/behaviour.hpp"
#include "sbg/game.hpp"

namespace sbg {

enum class FictitiousVariant { plain, conditioned };

// Fictitious play for repeated two-player matrix games: best-responds to the
// empirical distribution of the opponent's past actions. The conditioned
// variant keys its counts by the previous joint action; unseen contexts and
// t = 0 fall back to a uniform estimate. Ties in the best response break
// uniformly. Counts are replayed from the history on every call, so the
// mapping stays pure.
class FictitiousPlayBehaviour final : public Behaviour {
 public:
  FictitiousPlayBehaviour(std::string id, FictitiousVariant variant)
      : id_(std::move(id)), variant_(variant) {}

  const std::string& id() const override { return id_; }

  std::vector<double> action_probabilities(const Game& game, const History& h,
                                           int player) const override {
    if (game.num_players() != 2) throw ModelError("fictitious play expects a 2-player game");
    int opponent = 1 - player;
    int n_opp = game.num_actions(opponent);
    std::vector<double> counts(static_cast<std::size_t>(n_opp), 0.0);
    int t = h.length();
    if (variant_ == FictitiousVariant::plain) {
      for (int tau = 0; tau < t; ++tau)
        counts[static_cast<std::size_t>(h.action_at(tau).at(static_cast<std::size_t>(opponent)))] += 1.0;
    } else if (t >= 1) {
      const JointAction& context = h.action_at(t - 1);
      for (int tau = 1; tau < t; ++tau)
        if (h.action_at(tau - 1) == context)
          counts[static_cast<std::size_t>(h.action_at(tau).at(static_cast<std::size_t>(opponent)))] += 1.0;
    }
    double total = 0.0;
    for (double c : counts) total += c;
    std::vector<double> estimate(static_cast<std::size_t>(n_opp));
    for (int a = 0; a < n_opp; ++a)
      estimate[static_cast<std::size_t>(a)] =
          total > 0.0 ? counts[static_cast<std::size_t>(a)] / total : 1.0 / n_opp;

    // Expected payoff of each own action against the estimate.
    int n_own = game.num_actions(player);
    std::vector<double> value(static_cast<std::size_t>(n_own), 0.0);
    for (int own = 0; own < n_own; ++own) {
      for (int opp = 0; opp < n_opp; ++opp) {
        JointAction a(2);
        a[static_cast<std::size_t>(player)] = own;
        a[static_cast<std::size_t>(opponent)] = opp;
        value[static_cast<std::size_t>(own)] +=
            estimate[static_cast<std::size_t>(opp)] * game.payoff(player, 0, a);
      }
    }
    double best = *std::max_element(value.begin(), value.end());
    std::vector<double> out(static_cast<std::size_t>(n_own), 0.0);
    int ties = 0;
    for (int own = 0; own < n_own; ++own)
      if (value[static_cast<std::size_t>(own)] >= best - 1e-12) ++ties;
    for (int own = 0; own < n_own; ++own)
      if (value[static_cast<std::size_t>(own)] >= best - 1e-12)
        out[static_cast<std::size_t>(own)] = 1.0 / ties;
    return out;
  }

  FictitiousVariant variant() const { return variant_; }

 private:
  std::string id_;
  FictitiousVariant variant_;
};

inline BehaviourPtr fictitious_play(FictitiousVariant variant) {
  return std::make_shared<FictitiousPlayBehaviour>(
      variant == FictitiousVariant::plain ? "fp" : "cfp", variant);
}

}  // namespace sbg

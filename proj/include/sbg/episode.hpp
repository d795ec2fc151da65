// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "sbg/behaviour.hpp"
#include "sbg/game.hpp"
#include "sbg/history.hpp"
#include "sbg/rng.hpp"

namespace sbg {

// An action source produces a distribution for one player at each step and
// may observe the realised joint action (agents with internal beliefs use
// the hook to update them).
class ActionSource {
 public:
  virtual ~ActionSource() = default;
  virtual std::vector<double> distribution(const Game& game, const History& h, int player) = 0;
  virtual void observe(const Game&, const History& /*before*/, const JointAction&) {}
};

class BehaviourSource final : public ActionSource {
 public:
  explicit BehaviourSource(BehaviourPtr behaviour) : behaviour_(std::move(behaviour)) {}
  std::vector<double> distribution(const Game& game, const History& h, int player) override {
    return behaviour_->action_probabilities(game, h, player);
  }

 private:
  BehaviourPtr behaviour_;
};

// One interaction step: draws the successor from the transition kernel and
// returns realised payoffs. Stepping a terminal state keeps the process in
// it with zero payoffs (terminal states are absorbing).
inline std::pair<int, std::vector<double>> step(const Game& game, History& h,
                                                const JointAction& a, std::mt19937_64& rng) {
  int s = h.current_state();
  std::vector<double> payoffs(static_cast<std::size_t>(game.num_players()), 0.0);
  if (game.is_terminal(s)) {
    h.append(a, s);
    return {s, payoffs};
  }
  const auto& row = game.transitions(s, a);
  std::vector<double> probs;
  probs.reserve(row.size());
  for (const auto& [next, p] : row) probs.push_back(p);
  int pick = sample_index(probs, rng);
  int next_state = row[static_cast<std::size_t>(pick)].first;
  for (int i = 0; i < game.num_players(); ++i)
    payoffs[static_cast<std::size_t>(i)] = game.payoff(i, s, a);
  h.append(a, next_state);
  return {next_state, payoffs};
}

struct EpisodeConfig {
  int max_steps = 100;
  bool resample_each_step = false;  // mixed-distribution mode
  bool record_traces = false;       // per-step action distributions
};

struct EpisodeResult {
  History history;
  std::vector<double> total_payoffs;
  // traces[t][player] = distribution the player acted from at step t
  std::vector<std::vector<std::vector<double>>> traces;
  // type_draws[t][k] = behaviour sampled for the k-th typed player at step t
  // (one entry when types are not resampled)
  std::vector<std::vector<BehaviourPtr>> type_draws;
};

// Runs the interaction protocol: sample types, let every player pick an
// action from its distribution, pay out, transition; stop at a terminal
// state or after max_steps. Players with a null source are controlled by
// their sampled type from `types`.
inline EpisodeResult run_episode(const Game& game,
                                 std::vector<std::shared_ptr<ActionSource>> sources,
                                 const std::optional<TypeDistribution>& types,
                                 const EpisodeConfig& cfg, const RngStream& root) {
  if (static_cast<int>(sources.size()) != game.num_players())
    throw ModelError("run_episode needs one source slot per player");

  auto type_rng = root.sub("types").engine();
  auto transition_rng = root.sub("transitions").engine();
  std::vector<std::mt19937_64> controller_rng;
  controller_rng.reserve(sources.size());
  for (int i = 0; i < game.num_players(); ++i)
    controller_rng.push_back(root.sub("controller", static_cast<std::uint64_t>(i)).engine());

  std::vector<int> typed_players;
  if (types) typed_players = types->players();
  for (int i = 0; i < game.num_players(); ++i) {
    bool typed = false;
    for (int p : typed_players) typed = typed || p == i;
    if (!sources[static_cast<std::size_t>(i)] && !typed)
      throw ModelError("player has neither a source nor a sampled type");
  }

  EpisodeResult result;
  result.history = History(game.initial_state());
  result.total_payoffs.assign(static_cast<std::size_t>(game.num_players()), 0.0);

  std::vector<BehaviourPtr> current_types;
  for (int t = 0; t < cfg.max_steps; ++t) {
    if (game.is_terminal(result.history.current_state())) break;
    if (types && (t == 0 || cfg.resample_each_step)) {
      current_types = sample_types(*types, type_rng);
      result.type_draws.push_back(current_types);
    }

    JointAction a(static_cast<std::size_t>(game.num_players()));
    std::vector<std::vector<double>> dists(static_cast<std::size_t>(game.num_players()));
    for (int i = 0; i < game.num_players(); ++i) {
      std::vector<double> dist;
      if (sources[static_cast<std::size_t>(i)]) {
        dist = sources[static_cast<std::size_t>(i)]->distribution(game, result.history, i);
      } else {
        std::size_t slot = 0;
        for (std::size_t k = 0; k < typed_players.size(); ++k)
          if (typed_players[k] == i) slot = k;
        dist = current_types.at(slot)->action_probabilities(game, result.history, i);
      }
      check_distribution(dist);
      a[static_cast<std::size_t>(i)] = sample_index(dist, controller_rng[static_cast<std::size_t>(i)]);
      if (cfg.record_traces) dists[static_cast<std::size_t>(i)] = std::move(dist);
    }
    if (cfg.record_traces) result.traces.push_back(std::move(dists));

    History before = result.history;
    auto [next_state, payoffs] = step(game, result.history, a, transition_rng);
    (void)next_state;
    for (int i = 0; i < game.num_players(); ++i)
      result.total_payoffs[static_cast<std::size_t>(i)] += payoffs[static_cast<std::size_t>(i)];
    for (auto& src : sources)
      if (src) src->observe(game, before, a);
  }
  return result;
}

}  // namespace sbg

// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "sbg/behaviour.hpp"
#include "sbg/episode.hpp"
#include "sbg/game.hpp"

namespace sbg {

struct EvoParams {
  int population = 50;
  int generations = 100;
  int tournament = 3;
  double crossover_rate = 0.8;
  double mutation_rate = 0.1;
  double dissimilarity_weight = 0.3;
  int rounds_per_eval = 20;
  int opponents_per_eval = 4;
  int probe_histories = 12;
};

// Fixed set of short histories used to compare behaviours; deterministic in
// the stream seed.
inline std::vector<History> make_probe_histories(const Game& game, const RngStream& root,
                                                 int count) {
  std::vector<History> probes;
  auto rng = root.sub("probes").engine();
  std::vector<int> lengths = {0, 1, 2, 3, 5, 8};
  for (int k = 0; k < count; ++k) {
    History h(game.initial_state());
    int len = lengths[static_cast<std::size_t>(k) % lengths.size()];
    for (int t = 0; t < len; ++t) {
      JointAction a(static_cast<std::size_t>(game.num_players()));
      for (int i = 0; i < game.num_players(); ++i)
        a[static_cast<std::size_t>(i)] =
            static_cast<int>(rng() % static_cast<std::uint64_t>(game.num_actions(i)));
      h.append(a, h.current_state());
    }
    probes.push_back(std::move(h));
  }
  return probes;
}

// Mean total-variation distance over the probe set; equals the disagreement
// rate for deterministic behaviours.
inline double behaviour_distance(const Game& game, const Behaviour& a, const Behaviour& b,
                                 const std::vector<History>& probes, int player) {
  double total = 0.0;
  for (const History& h : probes) {
    std::vector<double> pa = a.action_probabilities(game, h, player);
    std::vector<double> pb = b.action_probabilities(game, h, player);
    double tv = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) tv += std::abs(pa[i] - pb[i]);
    total += 0.5 * tv;
  }
  return probes.empty() ? 0.0 : total / static_cast<double>(probes.size());
}

inline double mean_pool_distance(const Game& game, const Behaviour& candidate,
                                 const std::vector<BehaviourPtr>& mates,
                                 const std::vector<History>& probes, int player) {
  if (mates.empty()) return 0.0;
  double total = 0.0;
  for (const auto& mate : mates) total += behaviour_distance(game, candidate, *mate, probes, player);
  return total / static_cast<double>(mates.size());
}

// Average per-round payoff of `candidate` (seated as `player`) against each
// listed opponent.
inline double evaluate_payoff_fitness(const Game& game, const BehaviourPtr& candidate, int player,
                                      const std::vector<BehaviourPtr>& opponents, int rounds,
                                      const RngStream& root) {
  if (opponents.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < opponents.size(); ++k) {
    std::vector<std::shared_ptr<ActionSource>> sources(2);
    sources[static_cast<std::size_t>(player)] = std::make_shared<BehaviourSource>(candidate);
    sources[static_cast<std::size_t>(1 - player)] = std::make_shared<BehaviourSource>(opponents[k]);
    EpisodeConfig cfg;
    cfg.max_steps = rounds;
    EpisodeResult res = run_episode(game, sources, std::nullopt, cfg, root.sub("eval", k));
    total += res.total_payoffs[static_cast<std::size_t>(player)] / static_cast<double>(rounds);
  }
  return total / static_cast<double>(opponents.size());
}

struct EvolvedPool {
  std::vector<BehaviourPtr> behaviours;
  std::vector<double> best_fitness_log;  // champion payoff fitness per generation
};

// Two pools bred concurrently, one per seat. Fitness combines payoffs earned
// against sampled members of the opposite pool with a dissimilarity bonus
// against the candidate's own pool. A champion per seat is tracked under a
// frozen evaluation and re-inserted each generation.
template <typename Ops>
EvolvedPool co_evolve(const Game& game, const EvoParams& params, const RngStream& root,
                      const Ops& ops, int player, int unique_count) {
  if (params.population < 2) throw std::invalid_argument("co_evolve: population must be >= 2");
  if (params.generations < 1) throw std::invalid_argument("co_evolve: generations must be >= 1");
  if (game.num_players() != 2) throw ModelError("co_evolve expects a 2-player game");

  using Genome = typename Ops::Genome;
  auto rng = root.sub("evolve").engine();
  std::vector<History> probes = make_probe_histories(game, root, params.probe_histories);

  std::vector<BehaviourPtr> frozen_opponents;
  for (int k = 0; k < 3; ++k)
    frozen_opponents.push_back(random_behaviour(game.num_actions(1 - player),
                                                root.sub("frozen", static_cast<std::uint64_t>(k)).seed()));

  std::array<std::vector<Genome>, 2> pools;
  for (int side = 0; side < 2; ++side)
    for (int k = 0; k < params.population; ++k) pools[static_cast<std::size_t>(side)].push_back(ops.random(rng));

  auto materialise = [&](const Genome& g, int side, int index, int gen) {
    return ops.make(g, ops.name() + "-s" + std::to_string(side) + "-g" + std::to_string(gen) +
                           "-" + std::to_string(index));
  };

  Genome champion = pools[static_cast<std::size_t>(player)][0];
  double champion_fitness = -std::numeric_limits<double>::infinity();
  std::vector<double> champion_log;

  for (int gen = 0; gen < params.generations; ++gen) {
    std::array<std::vector<BehaviourPtr>, 2> realised;
    for (int side = 0; side < 2; ++side)
      for (int k = 0; k < params.population; ++k)
        realised[static_cast<std::size_t>(side)].push_back(
            materialise(pools[static_cast<std::size_t>(side)][static_cast<std::size_t>(k)], side, k, gen));

    std::array<std::vector<double>, 2> fitness;
    for (int side = 0; side < 2; ++side) {
      int other = 1 - side;
      for (int k = 0; k < params.population; ++k) {
        std::vector<BehaviourPtr> opponents;
        for (int m = 0; m < params.opponents_per_eval; ++m)
          opponents.push_back(realised[static_cast<std::size_t>(other)][rng() % realised[static_cast<std::size_t>(other)].size()]);
        double payoff = evaluate_payoff_fitness(
            game, realised[static_cast<std::size_t>(side)][static_cast<std::size_t>(k)], side, opponents,
            params.rounds_per_eval,
            root.sub("fitness", static_cast<std::uint64_t>(gen * 1000 + side * 500 + k)));
        std::vector<BehaviourPtr> mates;
        for (int m = 0; m < params.opponents_per_eval; ++m)
          mates.push_back(realised[static_cast<std::size_t>(side)][rng() % realised[static_cast<std::size_t>(side)].size()]);
        double diss = mean_pool_distance(game, *realised[static_cast<std::size_t>(side)][static_cast<std::size_t>(k)],
                                         mates, probes, side);
        fitness[static_cast<std::size_t>(side)].push_back(payoff + params.dissimilarity_weight * diss);
      }
    }

    // Champion bookkeeping under the frozen evaluation.
    for (int k = 0; k < params.population; ++k) {
      double fixed = evaluate_payoff_fitness(game,
                                             realised[static_cast<std::size_t>(player)][static_cast<std::size_t>(k)],
                                             player, frozen_opponents, params.rounds_per_eval,
                                             root.sub("champion"));
      if (fixed > champion_fitness) {
        champion_fitness = fixed;
        champion = pools[static_cast<std::size_t>(player)][static_cast<std::size_t>(k)];
      }
    }
    champion_log.push_back(champion_fitness);

    for (int side = 0; side < 2; ++side) {
      const std::vector<Genome>& pool = pools[static_cast<std::size_t>(side)];
      const std::vector<double>& fit = fitness[static_cast<std::size_t>(side)];
      std::vector<Genome> next;
      // Elitism: keep the best by this generation's fitness.
      std::size_t best = 0;
      for (std::size_t k = 1; k < fit.size(); ++k)
        if (fit[k] > fit[best]) best = k;
      next.push_back(pool[best]);
      if (side == player) next.push_back(champion);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      auto select = [&]() -> const Genome& {
        std::size_t winner = rng() % pool.size();
        for (int c = 1; c < params.tournament; ++c) {
          std::size_t candidate = rng() % pool.size();
          if (fit[candidate] > fit[winner]) winner = candidate;
        }
        return pool[winner];
      };
      while (static_cast<int>(next.size()) < params.population) {
        Genome child = unit(rng) < params.crossover_rate ? ops.crossover(select(), select(), rng)
                                                         : select();
        if (unit(rng) < params.mutation_rate) child = ops.mutate(child, rng);
        next.push_back(std::move(child));
      }
      pools[static_cast<std::size_t>(side)] = std::move(next);
    }
  }

  // Collect distinct behaviours (by probe signature) from the final pool.
  EvolvedPool out;
  out.best_fitness_log = std::move(champion_log);
  auto signature = [&](const BehaviourPtr& b) {
    std::string sig;
    for (const History& h : probes) {
      std::vector<double> p = b->action_probabilities(game, h, player);
      for (double v : p) sig += std::to_string(static_cast<long long>(v * 1e9)) + ",";
    }
    return sig;
  };
  std::set<std::string> seen;
  int want = unique_count > 0 ? unique_count : params.population;
  int serial = 0;
  for (const Genome& g : pools[static_cast<std::size_t>(player)]) {
    BehaviourPtr b = materialise(g, player, serial++, params.generations);
    if (seen.insert(signature(b)).second) out.behaviours.push_back(b);
    if (static_cast<int>(out.behaviours.size()) == want) break;
  }
  // Top up with mutants when the pool has collapsed to fewer distinct
  // behaviours than requested.
  Genome base = champion;
  int guard = 0;
  while (static_cast<int>(out.behaviours.size()) < want && guard++ < 10000) {
    base = ops.mutate(base, rng);
    BehaviourPtr b = materialise(base, player, serial++, params.generations + 1);
    if (seen.insert(signature(b)).second) out.behaviours.push_back(b);
  }
  if (static_cast<int>(out.behaviours.size()) < want)
    throw ModelError("co_evolve could not produce enough distinct behaviours");
  return out;
}

}  // namespace sbg

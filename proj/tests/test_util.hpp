// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <random>
#include <vector>

#include "sbg/game.hpp"
#include "sbg/history.hpp"

namespace sbg_test {

// Strictly ordinal prisoner's-dilemma ranking (defect dominates for both).
inline sbg::Game pd_game() {
  return sbg::Game::repeated_matrix({{3, 1}, {4, 2}}, {{3, 4}, {1, 2}});
}

inline sbg::Game matching_pennies_ranked() {
  return sbg::Game::repeated_matrix({{4, 1}, {2, 3}}, {{1, 4}, {3, 2}});
}

inline sbg::History random_history(const sbg::Game& game, int length, std::mt19937_64& rng) {
  sbg::History h(game.initial_state());
  for (int t = 0; t < length; ++t) {
    sbg::JointAction a(static_cast<std::size_t>(game.num_players()));
    for (int i = 0; i < game.num_players(); ++i)
      a[static_cast<std::size_t>(i)] =
          static_cast<int>(rng() % static_cast<std::uint64_t>(game.num_actions(i)));
    int state = h.current_state();
    if (!game.is_terminal(state)) {
      const auto& row = game.transitions(state, a);
      std::vector<double> probs;
      for (const auto& [next, p] : row) probs.push_back(p);
      state = row[static_cast<std::size_t>(sbg::sample_index(probs, rng))].first;
    }
    h.append(a, state);
  }
  return h;
}

inline bool close(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol; }

}  // namespace sbg_test

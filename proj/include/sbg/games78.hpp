// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <algorithm>
#include <array>
#include <set>
#include <string>
#include <vector>

#include "sbg/game.hpp"
#include "sbg/history.hpp"

namespace sbg {

// One strictly ordinal 2x2 game: each player ranks the four outcomes 1..4
// with no ties. The catalogue holds one representative per equivalence class
// under row swaps, column swaps and player swaps.
struct OrdinalGame {
  std::array<std::array<int, 2>, 2> u1;  // row player ranks
  std::array<std::array<int, 2>, 2> u2;  // column player ranks
  std::string id;                        // stable catalogue id
  bool no_conflict = false;

  std::array<int, 8> encode() const {
    return {u1[0][0], u1[0][1], u1[1][0], u1[1][1], u2[0][0], u2[0][1], u2[1][0], u2[1][1]};
  }

  std::string key() const {
    std::string s;
    for (int v : encode()) s += static_cast<char>('0' + v);
    return s.substr(0, 4) + "." + s.substr(4);
  }

  Game to_game() const {
    std::vector<std::vector<double>> m1 = {{double(u1[0][0]), double(u1[0][1])},
                                           {double(u1[1][0]), double(u1[1][1])}};
    std::vector<std::vector<double>> m2 = {{double(u2[0][0]), double(u2[0][1])},
                                           {double(u2[1][0]), double(u2[1][1])}};
    return Game::repeated_matrix(m1, m2);
  }
};

namespace detail {

inline OrdinalGame swap_rows(OrdinalGame g) {
  std::swap(g.u1[0], g.u1[1]);
  std::swap(g.u2[0], g.u2[1]);
  return g;
}

inline OrdinalGame swap_cols(OrdinalGame g) {
  for (int r = 0; r < 2; ++r) {
    std::swap(g.u1[r][0], g.u1[r][1]);
    std::swap(g.u2[r][0], g.u2[r][1]);
  }
  return g;
}

inline OrdinalGame swap_players(const OrdinalGame& g) {
  OrdinalGame out = g;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      out.u1[r][c] = g.u2[c][r];
      out.u2[r][c] = g.u1[c][r];
    }
  return out;
}

// The full 8-element transformation group.
inline std::vector<OrdinalGame> transform_orbit(const OrdinalGame& g) {
  std::vector<OrdinalGame> out;
  for (int p = 0; p < 2; ++p) {
    OrdinalGame a = p ? swap_players(g) : g;
    for (int r = 0; r < 2; ++r) {
      OrdinalGame b = r ? swap_rows(a) : a;
      for (int c = 0; c < 2; ++c) out.push_back(c ? swap_cols(b) : b);
    }
  }
  return out;
}

// Lexicographically minimal encoding over the subgroup that keeps the player
// assignment fixed (row and column swaps only).
inline OrdinalGame normalise_layout(const OrdinalGame& g) {
  OrdinalGame best = g;
  for (int r = 0; r < 2; ++r) {
    OrdinalGame a = r ? swap_rows(g) : g;
    for (int c = 0; c < 2; ++c) {
      OrdinalGame b = c ? swap_cols(a) : a;
      if (b.encode() < best.encode()) best = b;
    }
  }
  return best;
}

}  // namespace detail

inline int dominant_action(const OrdinalGame& g, int player) {
  if (player == 0) {
    if (g.u1[0][0] > g.u1[1][0] && g.u1[0][1] > g.u1[1][1]) return 0;
    if (g.u1[1][0] > g.u1[0][0] && g.u1[1][1] > g.u1[0][1]) return 1;
    return -1;
  }
  if (g.u2[0][0] > g.u2[0][1] && g.u2[1][0] > g.u2[1][1]) return 0;
  if (g.u2[0][1] > g.u2[0][0] && g.u2[1][1] > g.u2[1][0]) return 1;
  return -1;
}

// Strict ordinality makes every dominance comparison strict.
inline bool has_dominant_action(const OrdinalGame& g, int player) {
  return dominant_action(g, player) >= 0;
}

// No-conflict: both players rank the same cell best.
inline bool classify_no_conflict(const OrdinalGame& g) {
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      if (g.u1[r][c] == 4 && g.u2[r][c] == 4) return true;
  return false;
}

// Canonical catalogue form. The class representative is the lexicographic
// minimum over the transformation group; the player orientation then follows
// the catalogue convention for one-sided dominance: the dominant action
// belongs to the row player, except in conflict games whose dominant player
// attains its top rank at the dominance-solvable equilibrium, where it
// belongs to the column player.
inline OrdinalGame canonicalise(const OrdinalGame& g) {
  OrdinalGame best = g;
  for (const OrdinalGame& o : detail::transform_orbit(g))
    if (o.encode() < best.encode()) best = o;

  bool d1 = has_dominant_action(best, 0);
  bool d2 = has_dominant_action(best, 1);
  if (d1 != d2) {
    OrdinalGame oriented = d1 ? best : detail::swap_players(best);
    int row = dominant_action(oriented, 0);
    int col = oriented.u2[row][0] > oriented.u2[row][1] ? 0 : 1;
    bool top_at_equilibrium = oriented.u1[row][col] == 4;
    bool to_column = !classify_no_conflict(oriented) && top_at_equilibrium;
    best = detail::normalise_layout(to_column ? detail::swap_players(oriented) : oriented);
  }
  best.no_conflict = classify_no_conflict(best);
  return best;
}

// All 78 distinct strictly ordinal 2x2 games.
inline const std::vector<OrdinalGame>& enumerate_games() {
  static const std::vector<OrdinalGame> catalogue = [] {
    std::array<int, 4> p1 = {1, 2, 3, 4};
    std::vector<std::array<int, 4>> perms;
    do {
      perms.push_back(p1);
    } while (std::next_permutation(p1.begin(), p1.end()));

    std::set<std::array<int, 8>> seen;
    std::vector<OrdinalGame> games;
    for (const auto& a : perms) {
      for (const auto& b : perms) {
        OrdinalGame g;
        g.u1 = {{{a[0], a[1]}, {a[2], a[3]}}};
        g.u2 = {{{b[0], b[1]}, {b[2], b[3]}}};
        OrdinalGame canon = canonicalise(g);
        if (seen.insert(canon.encode()).second) games.push_back(canon);
      }
    }
    std::sort(games.begin(), games.end(),
              [](const OrdinalGame& x, const OrdinalGame& y) { return x.encode() < y.encode(); });
    for (std::size_t k = 0; k < games.size(); ++k) {
      std::string num = std::to_string(k + 1);
      games[k].id = "g" + std::string(num.size() < 2 ? 1 : 0, '0') + num;
    }
    return games;
  }();
  return catalogue;
}

struct SliceMetrics {
  std::array<bool, 2> converged = {false, false};
  std::array<double, 2> avg_payoff = {0.0, 0.0};
  double welfare = 0.0;
  double fairness = 0.0;
  bool nash = false;
  bool pareto = false;
  bool welfare_opt = false;
  bool fairness_opt = false;
};

inline constexpr double kSliceEpsilon = 0.05;

// Per-slice performance criteria over [begin, end). `traces[t][i]` is the
// distribution player i acted from at step t. Convergence compares each
// step's probabilities against the distribution at the slice start; solution
// flags are evaluated on the slice-averaged action probabilities with the
// 0.05 tolerance (Pareto optimality is tested on the slice's modal joint
// action over pure outcomes).
inline SliceMetrics slice_metrics(const OrdinalGame& g, const History& h, int begin, int end,
                                  const std::vector<std::array<std::vector<double>, 2>>& traces) {
  if (begin < 0 || end <= begin || end > h.length() || end > static_cast<int>(traces.size()))
    throw ModelError("slice_metrics: bad slice bounds");
  SliceMetrics out;
  int len = end - begin;

  for (int i = 0; i < 2; ++i) {
    bool stable = true;
    const std::vector<double>& first = traces[static_cast<std::size_t>(begin)][static_cast<std::size_t>(i)];
    for (int t = begin; t < end && stable; ++t) {
      const std::vector<double>& now = traces[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
      for (std::size_t a = 0; a < now.size(); ++a)
        if (std::abs(now[a] - first[a]) > kSliceEpsilon) stable = false;
    }
    out.converged[static_cast<std::size_t>(i)] = stable;
  }

  std::array<std::array<int, 2>, 2> counts = {{{0, 0}, {0, 0}}};
  for (int t = begin; t < end; ++t) {
    const JointAction& a = h.action_at(t);
    out.avg_payoff[0] += g.u1[static_cast<std::size_t>(a[0])][static_cast<std::size_t>(a[1])];
    out.avg_payoff[1] += g.u2[static_cast<std::size_t>(a[0])][static_cast<std::size_t>(a[1])];
    counts[static_cast<std::size_t>(a[0])][static_cast<std::size_t>(a[1])]++;
  }
  out.avg_payoff[0] /= len;
  out.avg_payoff[1] /= len;
  out.welfare = out.avg_payoff[0] + out.avg_payoff[1];
  out.fairness = out.avg_payoff[0] * out.avg_payoff[1];

  std::array<std::vector<double>, 2> mean = {std::vector<double>{0.0, 0.0},
                                             std::vector<double>{0.0, 0.0}};
  for (int t = begin; t < end; ++t)
    for (int i = 0; i < 2; ++i)
      for (int a = 0; a < 2; ++a)
        mean[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] +=
            traces[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] / len;

  auto expected = [&](int player, const std::vector<double>& p1, const std::vector<double>& p2) {
    double total = 0.0;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        double u = player == 0 ? g.u1[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]
                               : g.u2[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        total += p1[static_cast<std::size_t>(r)] * p2[static_cast<std::size_t>(c)] * u;
      }
    return total;
  };

  // Approximate stage-game Nash: no unilateral pure deviation gains more
  // than the tolerance.
  double v1 = expected(0, mean[0], mean[1]);
  double v2 = expected(1, mean[0], mean[1]);
  bool nash = true;
  for (int a = 0; a < 2; ++a) {
    std::vector<double> pure = {a == 0 ? 1.0 : 0.0, a == 1 ? 1.0 : 0.0};
    if (expected(0, pure, mean[1]) > v1 + kSliceEpsilon) nash = false;
    if (expected(1, mean[0], pure) > v2 + kSliceEpsilon) nash = false;
  }
  out.nash = nash;

  // Pareto optimality of the modal joint action over pure outcomes.
  int best_r = 0, best_c = 0, best_count = -1;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      if (counts[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] > best_count) {
        best_count = counts[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        best_r = r;
        best_c = c;
      }
  bool dominated = false;
  for (int r = 0; r < 2 && !dominated; ++r)
    for (int c = 0; c < 2 && !dominated; ++c) {
      if (r == best_r && c == best_c) continue;
      int d1 = g.u1[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -
               g.u1[static_cast<std::size_t>(best_r)][static_cast<std::size_t>(best_c)];
      int d2 = g.u2[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -
               g.u2[static_cast<std::size_t>(best_r)][static_cast<std::size_t>(best_c)];
      if (d1 >= 0 && d2 >= 0 && d1 + d2 > 0) dominated = true;
    }
  out.pareto = !dominated;

  double best_welfare = 0.0, best_fairness = 0.0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      double w = g.u1[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] +
                 g.u2[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      double f = static_cast<double>(g.u1[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]) *
                 g.u2[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      best_welfare = std::max(best_welfare, w);
      best_fairness = std::max(best_fairness, f);
    }
  out.welfare_opt = v1 + v2 >= best_welfare - kSliceEpsilon;
  out.fairness_opt = v1 * v2 >= best_fairness - kSliceEpsilon;
  return out;
}

}  // namespace sbg

// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "sbg/beliefs.hpp"
#include "sbg/planner.hpp"

namespace sbg {

// Finite labelled Markov chain with a termination proposition. Nodes carrying
// the label are absorbing.
struct LabelledChain {
  int initial = 0;
  std::vector<bool> term;
  std::vector<std::vector<std::pair<int, double>>> rows;

  int num_nodes() const { return static_cast<int>(rows.size()); }

  void validate() const {
    if (rows.size() != term.size()) throw ModelError("chain: rows/labels mismatch");
    if (initial < 0 || initial >= num_nodes()) throw ModelError("chain: bad initial node");
    for (int v = 0; v < num_nodes(); ++v) {
      double total = 0.0;
      for (const auto& [next, p] : rows[static_cast<std::size_t>(v)]) {
        if (next < 0 || next >= num_nodes()) throw ModelError("chain: bad transition target");
        if (p < 0.0) throw ModelError("chain: negative probability");
        total += p;
      }
      if (std::abs(total - 1.0) > kDistributionTolerance)
        throw ModelError("chain: row does not sum to 1");
      if (term[static_cast<std::size_t>(v)]) {
        if (rows[static_cast<std::size_t>(v)].size() != 1 ||
            rows[static_cast<std::size_t>(v)][0].first != v ||
            std::abs(rows[static_cast<std::size_t>(v)][0].second - 1.0) > kDistributionTolerance)
          throw ModelError("chain: terminal nodes must be absorbing");
      }
    }
  }
};

// Probability that a terminal node is occupied after `horizon` steps;
// horizon < 0 solves the unbounded reachability system instead.
inline double termination_probability(const LabelledChain& c, int horizon) {
  int n = c.num_nodes();
  if (horizon >= 0) {
    std::vector<double> mass(static_cast<std::size_t>(n), 0.0);
    mass[static_cast<std::size_t>(c.initial)] = 1.0;
    for (int t = 0; t < horizon; ++t) {
      std::vector<double> next(static_cast<std::size_t>(n), 0.0);
      for (int v = 0; v < n; ++v) {
        if (mass[static_cast<std::size_t>(v)] == 0.0) continue;
        for (const auto& [w, p] : c.rows[static_cast<std::size_t>(v)])
          next[static_cast<std::size_t>(w)] += mass[static_cast<std::size_t>(v)] * p;
      }
      mass = std::move(next);
    }
    double total = 0.0;
    for (int v = 0; v < n; ++v)
      if (c.term[static_cast<std::size_t>(v)]) total += mass[static_cast<std::size_t>(v)];
    return total;
  }

  // Unbounded: solve (I - P_TT) x = P_T->term componentwise by elimination.
  std::vector<int> transient;
  std::vector<int> index(static_cast<std::size_t>(n), -1);
  for (int v = 0; v < n; ++v)
    if (!c.term[static_cast<std::size_t>(v)]) {
      index[static_cast<std::size_t>(v)] = static_cast<int>(transient.size());
      transient.push_back(v);
    }
  if (c.term[static_cast<std::size_t>(c.initial)]) return 1.0;
  int m = static_cast<int>(transient.size());
  std::vector<std::vector<double>> M(static_cast<std::size_t>(m),
                                     std::vector<double>(static_cast<std::size_t>(m) + 1, 0.0));
  for (int r = 0; r < m; ++r) {
    M[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)] = 1.0;
    for (const auto& [w, p] : c.rows[static_cast<std::size_t>(transient[static_cast<std::size_t>(r)])]) {
      if (c.term[static_cast<std::size_t>(w)])
        M[static_cast<std::size_t>(r)][static_cast<std::size_t>(m)] += p;
      else
        M[static_cast<std::size_t>(r)][static_cast<std::size_t>(index[static_cast<std::size_t>(w)])] -= p;
    }
  }
  for (int col = 0; col < m; ++col) {
    int piv = -1;
    double best = 1e-12;
    for (int r = col; r < m; ++r)
      if (std::abs(M[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) > best) {
        best = std::abs(M[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]);
        piv = r;
      }
    if (piv < 0) continue;  // unreachable or never-terminating block
    std::swap(M[static_cast<std::size_t>(col)], M[static_cast<std::size_t>(piv)]);
    double d = M[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
    for (double& v : M[static_cast<std::size_t>(col)]) v /= d;
    for (int r = 0; r < m; ++r) {
      if (r == col) continue;
      double f = M[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)];
      if (f == 0.0) continue;
      for (int cc = 0; cc <= m; ++cc)
        M[static_cast<std::size_t>(r)][static_cast<std::size_t>(cc)] -=
            f * M[static_cast<std::size_t>(col)][static_cast<std::size_t>(cc)];
    }
  }
  return M[static_cast<std::size_t>(index[static_cast<std::size_t>(c.initial)])]
          [static_cast<std::size_t>(m)];
}

struct BisimResult {
  bool bisimilar = false;
  // Block id per node of the disjoint union (first chain's nodes, then the
  // second chain's).
  std::vector<int> block_of;
  int num_blocks = 0;
  int distinguishing_class = -1;  // set when not bisimilar
};

// Coarsest probabilistic bisimulation on the disjoint union of two chains:
// partition refinement from the {term, non-term} split until every block is
// closed under class transition mass. The chains are bisimilar when the two
// initial nodes land in one block.
inline BisimResult bisimulation_check(const LabelledChain& a, const LabelledChain& b) {
  a.validate();
  b.validate();
  int na = a.num_nodes();
  int n = na + b.num_nodes();
  auto row_of = [&](int v) -> const std::vector<std::pair<int, double>>& {
    return v < na ? a.rows[static_cast<std::size_t>(v)]
                  : b.rows[static_cast<std::size_t>(v - na)];
  };
  auto term_of = [&](int v) {
    return v < na ? a.term[static_cast<std::size_t>(v)] : b.term[static_cast<std::size_t>(v - na)];
  };
  auto shift = [&](int v, bool second) { return second ? v + na : v; };

  BisimResult out;
  out.block_of.assign(static_cast<std::size_t>(n), 0);
  for (int v = 0; v < n; ++v) out.block_of[static_cast<std::size_t>(v)] = term_of(v) ? 1 : 0;
  int blocks = 2;

  while (true) {
    // Signature: quantised transition mass into every current block.
    std::map<std::pair<int, std::vector<std::pair<int, std::int64_t>>>, int> next_ids;
    std::vector<int> next(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
      std::map<int, double> mass;
      for (const auto& [w, p] : row_of(v))
        mass[out.block_of[static_cast<std::size_t>(shift(w, v >= na))]] += p;
      std::vector<std::pair<int, std::int64_t>> sig;
      for (const auto& [blk, p] : mass)
        sig.emplace_back(blk, static_cast<std::int64_t>(std::llround(p * 1e9)));
      auto key = std::make_pair(out.block_of[static_cast<std::size_t>(v)], std::move(sig));
      auto [it, inserted] = next_ids.emplace(std::move(key), static_cast<int>(next_ids.size()));
      next[static_cast<std::size_t>(v)] = it->second;
    }
    int new_blocks = static_cast<int>(next_ids.size());
    bool stable = new_blocks == blocks;
    out.block_of = std::move(next);
    blocks = new_blocks;
    if (stable) break;
  }
  out.num_blocks = blocks;

  int init_a = out.block_of[static_cast<std::size_t>(a.initial)];
  int init_b = out.block_of[static_cast<std::size_t>(na + b.initial)];
  out.bisimilar = init_a == init_b;
  if (!out.bisimilar) {
    if (term_of(a.initial) != term_of(na + b.initial)) {
      for (int v = 0; v < n; ++v)
        if (term_of(v)) {
          out.distinguishing_class = out.block_of[static_cast<std::size_t>(v)];
          break;
        }
    } else {
      std::map<int, double> ma, mb;
      for (const auto& [w, p] : row_of(a.initial))
        ma[out.block_of[static_cast<std::size_t>(w)]] += p;
      for (const auto& [w, p] : row_of(na + b.initial))
        mb[out.block_of[static_cast<std::size_t>(w + na)]] += p;
      for (int blk = 0; blk < blocks && out.distinguishing_class < 0; ++blk) {
        double pa = ma.count(blk) ? ma[blk] : 0.0;
        double pb = mb.count(blk) ? mb[blk] : 0.0;
        if (std::abs(pa - pb) > 1e-9) out.distinguishing_class = blk;
      }
      // Initial nodes split deeper in the refinement: any class they reach
      // with equal mass is not a witness, so fall back to the initial block.
      if (out.distinguishing_class < 0) out.distinguishing_class = init_a;
    }
  }
  return out;
}

// Process construction: the game controlled by a planning agent, restricted
// to behaviours that read at most the last `window` joint actions plus the
// step index modulo `phase_period`. Nodes are (state, action window, phase);
// rows average uniformly over the process's argmax set and weight opponent
// actions by the true types.
struct ProcessConfig {
  bool ideal_knowledge = false;                      // plan with the true types
  std::vector<int> opponents;                        // opponent player ids
  std::vector<BehaviourPtr> true_types;              // one per opponent
  std::vector<std::vector<BehaviourPtr>> hyp_types;  // hypothesised sets (user process)
  std::vector<std::vector<double>> hyp_priors;
  int hba_player = 0;
  int window = 1;
  int phase_period = 1;
  int plan_depth = 2;
  double gamma = 0.9;
  double tie_tolerance = 1e-9;
  int node_budget = 20000;
  long long plan_node_budget = 4'000'000;
};

namespace detail_bisim {

struct WindowNode {
  int state;
  int phase;
  std::vector<std::pair<int, JointAction>> window;  // (state before action, action)

  bool operator<(const WindowNode& other) const {
    if (state != other.state) return state < other.state;
    if (phase != other.phase) return phase < other.phase;
    return window < other.window;
  }
};

// Materialises a history whose suffix matches the window and whose length is
// congruent to the phase. Padding repeats the window's leading state with
// the all-zero joint action; behaviours within the declared memory bounds
// cannot observe the difference.
struct Materialised {
  History history;
  int pad = 0;  // synthetic leading steps carrying only the phase
};

inline Materialised materialise(const Game& game, const ProcessConfig& cfg,
                                const WindowNode& node) {
  int w = static_cast<int>(node.window.size());
  int pad = 0;
  if (cfg.phase_period > 1) {
    pad = (node.phase - w) % cfg.phase_period;
    if (pad < 0) pad += cfg.phase_period;
  }
  int lead_state = node.window.empty() ? node.state : node.window.front().first;
  History h(lead_state);
  JointAction zeros(static_cast<std::size_t>(game.num_players()), 0);
  for (int k = 0; k < pad; ++k) h.append(zeros, lead_state);
  for (int k = 0; k < w; ++k) {
    int next = k + 1 < w ? node.window[static_cast<std::size_t>(k) + 1].first : node.state;
    h.append(node.window[static_cast<std::size_t>(k)].second, next);
  }
  return {std::move(h), pad};
}

// Beliefs are rebuilt from the prior along the real suffix of the history;
// `skip` synthetic padding steps carry the phase only and are not evidence.
inline BeliefState process_belief(const Game& game, const ProcessConfig& cfg, const History& h,
                                  int skip = 0) {
  if (cfg.ideal_knowledge) {
    std::vector<std::vector<BehaviourPtr>> sets;
    std::vector<std::vector<double>> priors;
    for (const auto& t : cfg.true_types) {
      sets.push_back({t});
      priors.push_back({1.0});
    }
    return BeliefState(BeliefMode::product, cfg.opponents, sets, priors);
  }
  BeliefState belief(BeliefMode::product, cfg.opponents, cfg.hyp_types, cfg.hyp_priors);
  History scratch = h.prefix(0);
  for (int tau = 0; tau < h.length(); ++tau) {
    if (tau >= skip) belief.update(game, scratch, h.action_at(tau));
    scratch.append(h.action_at(tau), h.state_at(tau + 1));
  }
  if (belief.degenerate()) belief.reset_to_prior();
  return belief;
}

inline std::vector<int> process_argmax(const Game& game, const ProcessConfig& cfg,
                                       const History& h, int skip = 0) {
  PlannerConfig pc;
  pc.player = cfg.hba_player;
  pc.mode = PlannerConfig::Mode::discounted;
  pc.gamma = cfg.gamma;
  pc.max_depth = cfg.plan_depth;
  pc.task_completion = true;
  pc.tie_tolerance = cfg.tie_tolerance;
  pc.node_budget = cfg.plan_node_budget;
  Planner planner(pc);
  BeliefState belief = process_belief(game, cfg, h, skip);
  return planner.argmax_set(planner.action_values(game, belief, h));
}

inline std::vector<double> process_action_values(const Game& game, const ProcessConfig& cfg,
                                                 const History& h, int skip = 0) {
  PlannerConfig pc;
  pc.player = cfg.hba_player;
  pc.mode = PlannerConfig::Mode::discounted;
  pc.gamma = cfg.gamma;
  pc.max_depth = cfg.plan_depth;
  pc.task_completion = true;
  pc.tie_tolerance = cfg.tie_tolerance;
  pc.node_budget = cfg.plan_node_budget;
  Planner planner(pc);
  BeliefState belief = process_belief(game, cfg, h, skip);
  return planner.action_values(game, belief, h);
}

}  // namespace detail_bisim

// Transition distribution over successor states after history `h` (the
// process mixes uniformly over its argmax set; opponents play their true
// types).
inline std::vector<double> process_state_distribution(const Game& game, const ProcessConfig& cfg,
                                                      const History& h) {
  std::vector<double> out(static_cast<std::size_t>(game.num_states()), 0.0);
  int s = h.current_state();
  if (game.is_terminal(s)) {
    out[static_cast<std::size_t>(s)] = 1.0;
    return out;
  }
  std::vector<int> argmax = detail_bisim::process_argmax(game, cfg, h);
  double own_w = 1.0 / static_cast<double>(argmax.size());
  std::vector<std::vector<double>> opp_probs;
  for (std::size_t k = 0; k < cfg.true_types.size(); ++k)
    opp_probs.push_back(cfg.true_types[k]->action_probabilities(
        game, h, cfg.opponents[k]));
  std::size_t combos = 1;
  for (std::size_t k = 0; k < cfg.opponents.size(); ++k)
    combos *= static_cast<std::size_t>(game.num_actions(cfg.opponents[k]));
  for (int own : argmax) {
    for (std::size_t combo = 0; combo < combos; ++combo) {
      JointAction a(static_cast<std::size_t>(game.num_players()), 0);
      a[static_cast<std::size_t>(cfg.hba_player)] = own;
      std::size_t rest = combo;
      double w = own_w;
      for (std::size_t k = cfg.opponents.size(); k-- > 0;) {
        int player = cfg.opponents[k];
        int na = game.num_actions(player);
        int chosen = static_cast<int>(rest % static_cast<std::size_t>(na));
        rest /= static_cast<std::size_t>(na);
        a[static_cast<std::size_t>(player)] = chosen;
        w *= opp_probs[k][static_cast<std::size_t>(chosen)];
      }
      if (w == 0.0) continue;
      for (const auto& [next, p] : game.transitions(s, a))
        out[static_cast<std::size_t>(next)] += w * p;
    }
  }
  return out;
}

// Builds the finite labelled chain of the process by exploring reachable
// (state, window, phase) nodes.
inline LabelledChain build_process(const Game& game, const ProcessConfig& cfg) {
  using detail_bisim::WindowNode;
  std::map<WindowNode, int> ids;
  std::vector<WindowNode> nodes;
  auto intern = [&](const WindowNode& n) {
    auto [it, inserted] = ids.emplace(n, static_cast<int>(nodes.size()));
    if (inserted) {
      nodes.push_back(n);
      if (static_cast<int>(nodes.size()) > cfg.node_budget)
        throw BudgetExceededError("process node budget exceeded");
    }
    return it->second;
  };

  LabelledChain chain;
  WindowNode root{game.initial_state(), 0, {}};
  chain.initial = intern(root);

  for (std::size_t v = 0; v < nodes.size(); ++v) {
    WindowNode node = nodes[v];
    chain.term.resize(nodes.size(), false);
    chain.rows.resize(nodes.size());
    if (game.is_terminal(node.state)) {
      chain.term[v] = true;
      chain.rows[v] = {{static_cast<int>(v), 1.0}};
      continue;
    }
    detail_bisim::Materialised mat = detail_bisim::materialise(game, cfg, node);
    const History& h = mat.history;
    std::vector<int> argmax = detail_bisim::process_argmax(game, cfg, h, mat.pad);
    double own_w = 1.0 / static_cast<double>(argmax.size());
    std::vector<std::vector<double>> opp_probs;
    for (std::size_t k = 0; k < cfg.true_types.size(); ++k)
      opp_probs.push_back(cfg.true_types[k]->action_probabilities(game, h, cfg.opponents[k]));

    std::map<int, double> mass;
    std::size_t combos = 1;
    for (std::size_t k = 0; k < cfg.opponents.size(); ++k)
      combos *= static_cast<std::size_t>(game.num_actions(cfg.opponents[k]));
    for (int own : argmax) {
      for (std::size_t combo = 0; combo < combos; ++combo) {
        JointAction a(static_cast<std::size_t>(game.num_players()), 0);
        a[static_cast<std::size_t>(cfg.hba_player)] = own;
        std::size_t rest = combo;
        double w = own_w;
        for (std::size_t k = cfg.opponents.size(); k-- > 0;) {
          int player = cfg.opponents[k];
          int na = game.num_actions(player);
          int chosen = static_cast<int>(rest % static_cast<std::size_t>(na));
          rest /= static_cast<std::size_t>(na);
          a[static_cast<std::size_t>(player)] = chosen;
          w *= opp_probs[k][static_cast<std::size_t>(chosen)];
        }
        if (w == 0.0) continue;
        for (const auto& [next, p] : game.transitions(node.state, a)) {
          if (p == 0.0) continue;
          WindowNode succ;
          succ.state = next;
          succ.phase = cfg.phase_period > 1 ? (node.phase + 1) % cfg.phase_period : 0;
          succ.window = node.window;
          succ.window.emplace_back(node.state, a);
          while (static_cast<int>(succ.window.size()) > cfg.window)
            succ.window.erase(succ.window.begin());
          mass[intern(succ)] += w * p;
        }
      }
    }
    chain.term.resize(nodes.size(), false);
    chain.rows.resize(nodes.size());
    chain.rows[v].assign(mass.begin(), mass.end());
  }
  chain.term.resize(nodes.size(), false);
  chain.rows.resize(nodes.size());
  chain.validate();
  return chain;
}

struct ConditionReport {
  bool holds = true;
  std::string witness;  // first failing history/action when the check fails
};

namespace detail_bisim {

inline std::string describe(const History& h, const std::string& extra) {
  std::string out = "s" + std::to_string(h.state_at(0));
  for (int tau = 0; tau < h.length(); ++tau) {
    out += " (";
    const JointAction& a = h.action_at(tau);
    for (std::size_t i = 0; i < a.size(); ++i)
      out += (i ? "," : "") + std::to_string(a[static_cast<std::size_t>(i)]);
    out += ") s" + std::to_string(h.state_at(tau + 1));
  }
  return out + (extra.empty() ? "" : " | " + extra);
}

template <typename Fn>
inline bool walk_histories(const Game& game, History& h, int horizon, Fn&& visit) {
  if (!visit(h)) return false;
  if (horizon == 0 || game.is_terminal(h.current_state())) return true;
  std::size_t combos = 1;
  for (int i = 0; i < game.num_players(); ++i)
    combos *= static_cast<std::size_t>(game.num_actions(i));
  for (std::size_t combo = 0; combo < combos; ++combo) {
    JointAction a(static_cast<std::size_t>(game.num_players()));
    std::size_t rest = combo;
    for (int i = game.num_players() - 1; i >= 0; --i) {
      a[static_cast<std::size_t>(i)] = static_cast<int>(rest % static_cast<std::size_t>(game.num_actions(i)));
      rest /= static_cast<std::size_t>(game.num_actions(i));
    }
    for (const auto& [next, p] : game.transitions(h.current_state(), a)) {
      if (p == 0.0) continue;
      h.append(a, next);
      bool keep = walk_histories(game, h, horizon - 1, visit);
      h.pop();
      if (!keep) return false;
    }
  }
  return true;
}

}  // namespace detail_bisim

// Every action the user process may choose must have positive expected value
// in the ideal process.
inline ConditionReport check_condition_positive_value(const Game& game, const ProcessConfig& x,
                                                      const ProcessConfig& y, int horizon) {
  ConditionReport report;
  History h(game.initial_state());
  detail_bisim::walk_histories(game, h, horizon, [&](const History& cur) {
    if (game.is_terminal(cur.current_state())) return true;
    std::vector<int> chosen = detail_bisim::process_argmax(game, y, cur);
    std::vector<double> ideal = detail_bisim::process_action_values(game, x, cur);
    for (int a : chosen) {
      if (ideal[static_cast<std::size_t>(a)] <= 0.0) {
        report.holds = false;
        report.witness = detail_bisim::describe(cur, "action " + std::to_string(a) +
                                                         " has zero ideal value");
        return false;
      }
    }
    return true;
  });
  return report;
}

// Every state the user process can move into must be reachable by the ideal
// process too.
inline ConditionReport check_condition_state_support(const Game& game, const ProcessConfig& x,
                                                     const ProcessConfig& y, int horizon) {
  ConditionReport report;
  History h(game.initial_state());
  detail_bisim::walk_histories(game, h, horizon, [&](const History& cur) {
    if (game.is_terminal(cur.current_state())) return true;
    std::vector<double> mu_y = process_state_distribution(game, y, cur);
    std::vector<double> mu_x = process_state_distribution(game, x, cur);
    for (int s = 0; s < game.num_states(); ++s) {
      if (mu_y[static_cast<std::size_t>(s)] > 0.0 && mu_x[static_cast<std::size_t>(s)] <= 0.0) {
        report.holds = false;
        report.witness =
            detail_bisim::describe(cur, "state " + std::to_string(s) + " unreachable ideally");
        return false;
      }
    }
    return true;
  });
  return report;
}

// The user process's argmax set must be contained in the ideal one.
inline ConditionReport check_condition_action_subset(const Game& game, const ProcessConfig& x,
                                                     const ProcessConfig& y, int horizon) {
  ConditionReport report;
  History h(game.initial_state());
  detail_bisim::walk_histories(game, h, horizon, [&](const History& cur) {
    if (game.is_terminal(cur.current_state())) return true;
    std::vector<int> ay = detail_bisim::process_argmax(game, y, cur);
    std::vector<int> ax = detail_bisim::process_argmax(game, x, cur);
    for (int a : ay) {
      if (std::find(ax.begin(), ax.end(), a) == ax.end()) {
        report.holds = false;
        report.witness = detail_bisim::describe(cur, "action " + std::to_string(a) +
                                                         " outside the ideal argmax set");
        return false;
      }
    }
    return true;
  });
  return report;
}

}  // namespace sbg

// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "sbg/lp.hpp"
#include "sbg/planner.hpp"

namespace sbg {

enum class PriorMethod {
  uniform,
  random_half,
  utility,
  stackelberg,
  welfare,
  fairness,
  lp_utility,
  lp_stackelberg,
  lp_welfare,
  lp_fairness
};

inline const char* prior_method_name(PriorMethod m) {
  switch (m) {
    case PriorMethod::uniform: return "uniform";
    case PriorMethod::random_half: return "random";
    case PriorMethod::utility: return "utility";
    case PriorMethod::stackelberg: return "stackelberg";
    case PriorMethod::welfare: return "welfare";
    case PriorMethod::fairness: return "fairness";
    case PriorMethod::lp_utility: return "lp-utility";
    case PriorMethod::lp_stackelberg: return "lp-stackelberg";
    case PriorMethod::lp_welfare: return "lp-welfare";
    case PriorMethod::lp_fairness: return "lp-fairness";
  }
  return "?";
}

inline const std::vector<PriorMethod>& all_prior_methods() {
  static const std::vector<PriorMethod> methods = {
      PriorMethod::uniform,       PriorMethod::random_half, PriorMethod::utility,
      PriorMethod::stackelberg,   PriorMethod::welfare,     PriorMethod::fairness,
      PriorMethod::lp_utility,    PriorMethod::lp_stackelberg, PriorMethod::lp_welfare,
      PriorMethod::lp_fairness};
  return methods;
}

struct PriorSpec {
  PriorMethod method = PriorMethod::uniform;
  int horizon = 5;          // valuation steps t
  double booster = 10.0;    // exponent magnifying value differences
  double lp_floor = 1e-4;   // keeps every type alive in the LP variants
  std::uint64_t seed = 0;   // random-half selection
  long long node_budget = 50'000'000;

  void validate() const {
    if (horizon < 1) throw ModelError("prior horizon must be >= 1");
    if (booster < 1.0) throw ModelError("booster must be >= 1");
    if (lp_floor <= 0.0) throw ModelError("lp floor must be positive");
  }
};

// Expected cumulative payoff profile over `steps` steps when the opponent
// plays `true_type` while our player plans optimally under the belief that
// the opponent is `believed` (with the planning horizon shrinking to the
// remaining steps). Exact expectation: our side mixes uniformly over its
// argmax set, the opponent mixes per its strategy, transitions per the
// kernel.
class ValuationOracle {
 public:
  ValuationOracle(const Game& game, int hba_player, int opponent, long long budget)
      : game_(game), hba_player_(hba_player), opponent_(opponent), budget_(budget) {}

  std::vector<double> profile(const BehaviourPtr& true_type, const BehaviourPtr& believed,
                              int steps) {
    History h(game_.initial_state());
    return recurse(true_type, believed, steps, h);
  }

 private:
  std::vector<double> recurse(const BehaviourPtr& true_type, const BehaviourPtr& believed,
                              int steps, History& h) {
    std::vector<double> total(static_cast<std::size_t>(game_.num_players()), 0.0);
    if (steps == 0 || game_.is_terminal(h.current_state())) return total;
    if (--budget_ < 0) throw BudgetExceededError("valuation budget exceeded");

    PlannerConfig cfg;
    cfg.player = hba_player_;
    cfg.mode = PlannerConfig::Mode::depth_limited;
    cfg.horizon = steps;
    cfg.node_budget = budget_;
    Planner planner(cfg);
    BeliefState belief(BeliefMode::product, {opponent_}, {{believed}}, {{1.0}});
    std::vector<int> best = planner.argmax_set(planner.action_values(game_, belief, h));

    std::vector<double> opp = true_type->action_probabilities(game_, h, opponent_);
    double own_w = 1.0 / static_cast<double>(best.size());
    int s = h.current_state();
    for (int own : best) {
      for (int a_opp = 0; a_opp < game_.num_actions(opponent_); ++a_opp) {
        double w = own_w * opp[static_cast<std::size_t>(a_opp)];
        if (w == 0.0) continue;
        JointAction a(2);
        a[static_cast<std::size_t>(hba_player_)] = own;
        a[static_cast<std::size_t>(opponent_)] = a_opp;
        for (int k = 0; k < game_.num_players(); ++k)
          total[static_cast<std::size_t>(k)] += w * game_.payoff(k, s, a);
        for (const auto& [next, p] : game_.transitions(s, a)) {
          if (p == 0.0) continue;
          h.append(a, next);
          std::vector<double> tail = recurse(true_type, believed, steps - 1, h);
          h.pop();
          for (int k = 0; k < game_.num_players(); ++k)
            total[static_cast<std::size_t>(k)] += w * p * tail[static_cast<std::size_t>(k)];
        }
      }
    }
    return total;
  }

  const Game& game_;
  int hba_player_;
  int opponent_;
  long long budget_;
};

inline double valuation(const Game& game, const BehaviourPtr& true_type,
                        const BehaviourPtr& believed, int steps, int for_player,
                        int hba_player = 0, int opponent = 1,
                        long long budget = 50'000'000) {
  ValuationOracle oracle(game, hba_player, opponent, budget);
  return oracle.profile(true_type, believed, steps).at(static_cast<std::size_t>(for_player));
}

struct PriorResult {
  std::vector<double> probs;
  bool fallback = false;  // LP failure, replaced by uniform
  std::string note;
};

inline PriorResult compute_prior(const PriorSpec& spec, const Game& game,
                                 const std::vector<BehaviourPtr>& types, int hba_player = 0,
                                 int opponent = 1) {
  spec.validate();
  std::size_t n = types.size();
  if (n == 0) throw ModelError("compute_prior needs at least one type");
  PriorResult out;
  out.probs.assign(n, 1.0 / static_cast<double>(n));

  auto normalise = [&](std::vector<double> v) {
    double total = std::accumulate(v.begin(), v.end(), 0.0);
    if (total <= 0.0) throw std::domain_error("prior weights must have positive mass");
    for (double& x : v) x /= total;
    return v;
  };

  switch (spec.method) {
    case PriorMethod::uniform:
      return out;

    case PriorMethod::random_half: {
      std::size_t floor_count = n / 2;
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      auto rng = RngStream(spec.seed).sub("random-prior").engine();
      std::shuffle(order.begin(), order.end(), rng);
      double floor_mass = 1e-4;
      double rest = (1.0 - floor_mass * static_cast<double>(floor_count)) /
                    static_cast<double>(n - floor_count);
      for (std::size_t k = 0; k < n; ++k)
        out.probs[order[k]] = k < floor_count ? floor_mass : rest;
      return out;
    }

    case PriorMethod::utility:
    case PriorMethod::stackelberg:
    case PriorMethod::welfare:
    case PriorMethod::fairness: {
      std::vector<double> psi(n);
      for (std::size_t m = 0; m < n; ++m) {
        ValuationOracle oracle(game, hba_player, opponent, spec.node_budget);
        std::vector<double> u = oracle.profile(types[m], types[m], spec.horizon);
        double ui = u.at(static_cast<std::size_t>(hba_player));
        double uj = u.at(static_cast<std::size_t>(opponent));
        switch (spec.method) {
          case PriorMethod::utility: psi[m] = ui; break;
          case PriorMethod::stackelberg: psi[m] = uj; break;
          case PriorMethod::welfare: psi[m] = ui + uj; break;
          default: psi[m] = ui * uj; break;
        }
        if (psi[m] < 0.0)
          throw std::domain_error("value prior weight is negative; boosting is undefined");
      }
      std::vector<double> weights(n);
      for (std::size_t m = 0; m < n; ++m) weights[m] = std::pow(psi[m], spec.booster);
      out.probs = normalise(std::move(weights));
      return out;
    }

    case PriorMethod::lp_utility:
    case PriorMethod::lp_stackelberg:
    case PriorMethod::lp_welfare:
    case PriorMethod::lp_fairness: {
      if (n == 1) {
        out.probs = {1.0};
        return out;
      }
      if (spec.lp_floor * static_cast<double>(n) > 1.0) {
        out.fallback = true;
        out.note = "lp floor exceeds the simplex";
        return out;
      }
      auto composite = [&](const std::vector<double>& u) {
        double ui = u.at(static_cast<std::size_t>(hba_player));
        double uj = u.at(static_cast<std::size_t>(opponent));
        switch (spec.method) {
          case PriorMethod::lp_utility: return ui;
          case PriorMethod::lp_stackelberg: return uj;
          case PriorMethod::lp_welfare: return ui + uj;
          default: return ui * uj;
        }
      };
      // Loss matrix: ideal metric for the true type minus the metric when
      // planning against the wrong one. Diagonal entries are zero.
      std::vector<std::vector<double>> loss(n, std::vector<double>(n, 0.0));
      for (std::size_t jt = 0; jt < n; ++jt) {
        ValuationOracle ideal(game, hba_player, opponent, spec.node_budget);
        double psi = composite(ideal.profile(types[jt], types[jt], spec.horizon));
        for (std::size_t jb = 0; jb < n; ++jb) {
          if (jb == jt) continue;
          ValuationOracle conditional(game, hba_player, opponent, spec.node_budget);
          loss[jt][jb] = psi - composite(conditional.profile(types[jt], types[jb], spec.horizon));
        }
      }
      // min l  s.t.  sum_jb loss[jt][jb] p_jb <= l,  sum p = 1,  p >= floor.
      // Variables: l = l+ - l-, y = p - floor >= 0.
      double eps = spec.lp_floor;
      std::size_t vars = 2 + n;
      std::vector<double> c(vars, 0.0);
      c[0] = 1.0;
      c[1] = -1.0;
      std::vector<std::vector<double>> A;
      std::vector<double> b;
      for (std::size_t jt = 0; jt < n; ++jt) {
        std::vector<double> row(vars, 0.0);
        row[0] = -1.0;
        row[1] = 1.0;
        double shift = 0.0;
        for (std::size_t jb = 0; jb < n; ++jb) {
          row[2 + jb] = loss[jt][jb];
          shift += loss[jt][jb] * eps;
        }
        A.push_back(std::move(row));
        b.push_back(-shift);
      }
      std::vector<double> sum_row(vars, 0.0);
      for (std::size_t jb = 0; jb < n; ++jb) sum_row[2 + jb] = 1.0;
      A.push_back(sum_row);
      b.push_back(1.0 - eps * static_cast<double>(n));
      for (double& v : sum_row) v = -v;
      A.push_back(sum_row);
      b.push_back(-(1.0 - eps * static_cast<double>(n)));

      LpResult lp = solve_lp(c, A, b);
      if (lp.status != LpResult::Status::optimal) {
        out.fallback = true;
        out.note = lp.status == LpResult::Status::infeasible ? "lp infeasible" : "lp unbounded";
        return out;
      }
      std::vector<double> p(n);
      for (std::size_t jb = 0; jb < n; ++jb) p[jb] = eps + lp.x[2 + jb];
      out.probs = normalise(std::move(p));
      return out;
    }
  }
  return out;
}

}  // namespace sbg

// Apache License, Version 2.0, refer to LICENSE.txt

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "planner_oracle.hpp"
#include "sbg/lft.hpp"
#include "sbg/priors.hpp"
#include "test_util.hpp"

using namespace sbg;
using sbg_test::OracleSpec;
using sbg_test::oracle_expected_payoff;
using sbg_test::pd_game;

namespace {

// Independent valuation oracle: plans via the brute-force enumerator of
// planner_oracle.hpp instead of the production planner, and accumulates the
// payoff profile over an explicitly enumerated history tree.
std::vector<double> enumerated_valuation(const Game& g, const BehaviourPtr& true_type,
                                         const BehaviourPtr& believed, int steps, History& h) {
  std::vector<double> total(2, 0.0);
  if (steps == 0) return total;
  OracleSpec spec{&g, {believed}, {1.0}, BeliefMode::product, 0, 1};
  std::vector<double> values(2);
  for (int a = 0; a < 2; ++a) values[static_cast<std::size_t>(a)] = oracle_expected_payoff(spec, h, a, steps);
  double best = std::max(values[0], values[1]);
  std::vector<int> argmax;
  for (int a = 0; a < 2; ++a)
    if (values[static_cast<std::size_t>(a)] >= best - 1e-9) argmax.push_back(a);
  std::vector<double> opp = true_type->action_probabilities(g, h, 1);
  for (int own : argmax) {
    for (int o = 0; o < 2; ++o) {
      double w = opp[static_cast<std::size_t>(o)] / static_cast<double>(argmax.size());
      if (w == 0.0) continue;
      JointAction joint{own, o};
      h.append(joint, 0);
      std::vector<double> tail = enumerated_valuation(g, true_type, believed, steps - 1, h);
      h.pop();
      for (int k = 0; k < 2; ++k)
        total[static_cast<std::size_t>(k)] +=
            w * (g.payoff(k, 0, joint) + tail[static_cast<std::size_t>(k)]);
    }
  }
  return total;
}

std::vector<BehaviourPtr> ten_type_pool(const Game& g) {
  std::vector<BehaviourPtr> pool;
  auto targets = default_lft_targets(g);
  pool.push_back(std::make_shared<LftBehaviour>("trig", LftRole::trigger, targets[0]));
  pool.push_back(std::make_shared<LftBehaviour>("lead", LftRole::leader, targets[1]));
  pool.push_back(always_action("a0", 0, 2));
  pool.push_back(always_action("a1", 1, 2));
  for (int k = 0; k < 6; ++k) pool.push_back(random_behaviour(2, 100 + static_cast<std::uint64_t>(k)));
  return pool;
}

}  // namespace

TEST_CASE("valuation fixtures") {
  SUBCASE("constant payoffs accumulate linearly") {
    Game g = Game::repeated_matrix({{2.5, 2.5}, {2.5, 2.5}}, {{1, 1}, {1, 1}});
    auto opp = random_behaviour(2, 3);
    CHECK(valuation(g, opp, opp, 5, 0) == doctest::Approx(5 * 2.5));
  }

  SUBCASE("one step against a fixed column is the best row entry") {
    Game g = pd_game();
    auto col0 = always_action("c0", 0, 2);
    double expect = std::max(g.payoff(0, 0, {0, 0}), g.payoff(0, 0, {1, 0}));
    CHECK(valuation(g, col0, col0, 1, 0) == doctest::Approx(expect));
  }

  SUBCASE("five steps against a trigger agent matches the enumeration oracle") {
    Game g = pd_game();
    auto trigger = std::make_shared<LftBehaviour>("trig", LftRole::trigger,
                                                  std::vector<JointAction>{{0, 0}});
    History h(g.initial_state());
    std::vector<double> want = enumerated_valuation(g, trigger, trigger, 5, h);
    CHECK(valuation(g, trigger, trigger, 5, 0) == doctest::Approx(want[0]).epsilon(1e-9));
    CHECK(valuation(g, trigger, trigger, 5, 1) == doctest::Approx(want[1]).epsilon(1e-9));
  }

  SUBCASE("conditional valuation with a wrong belief matches the oracle too") {
    Game g = pd_game();
    auto trigger = std::make_shared<LftBehaviour>("trig", LftRole::trigger,
                                                  std::vector<JointAction>{{0, 0}});
    auto naive = always_action("c0", 0, 2);
    History h(g.initial_state());
    std::vector<double> want = enumerated_valuation(g, trigger, naive, 4, h);
    CHECK(valuation(g, trigger, naive, 4, 0) == doctest::Approx(want[0]).epsilon(1e-9));
  }

  SUBCASE("budget overruns raise the explicit error") {
    Game g = pd_game();
    auto opp = random_behaviour(2, 9);
    CHECK_THROWS_AS(valuation(g, opp, opp, 6, 0, 0, 1, /*budget=*/5), BudgetExceededError);
  }
}

TEST_CASE("uniform and random priors") {
  Game g = pd_game();
  auto pool = ten_type_pool(g);

  PriorSpec uniform;
  uniform.method = PriorMethod::uniform;
  PriorResult u = compute_prior(uniform, g, pool);
  for (double p : u.probs) CHECK(p == doctest::Approx(0.1));

  PriorSpec random_spec;
  random_spec.method = PriorMethod::random_half;
  random_spec.seed = 42;
  PriorResult r = compute_prior(random_spec, g, pool);
  int floored = 0;
  double total = 0.0;
  for (double p : r.probs) {
    total += p;
    if (p == doctest::Approx(1e-4)) ++floored;
  }
  CHECK(floored == 5);
  CHECK(total == doctest::Approx(1.0));
  for (double p : r.probs)
    if (p != doctest::Approx(1e-4)) CHECK(p == doctest::Approx((1.0 - 5e-4) / 5));

  // Same seed, same halves.
  PriorResult again = compute_prior(random_spec, g, pool);
  CHECK(again.probs == r.probs);
}

TEST_CASE("value priors weight types by boosted metrics") {
  Game g = pd_game();

  SUBCASE("equal metrics give the uniform prior for any booster") {
    Game flat = Game::repeated_matrix({{2, 2}, {2, 2}}, {{3, 3}, {3, 3}});
    std::vector<BehaviourPtr> pool = {random_behaviour(2, 1), random_behaviour(2, 2),
                                      always_action("x", 0, 2)};
    for (double b : {1.0, 10.0, 25.0}) {
      PriorSpec spec;
      spec.method = PriorMethod::utility;
      spec.booster = b;
      PriorResult r = compute_prior(spec, flat, pool);
      for (double p : r.probs) CHECK(p == doctest::Approx(1.0 / 3.0));
    }
  }

  SUBCASE("utility prior puts its mode on the payoff-maximising type") {
    std::vector<BehaviourPtr> pool = {always_action("c0", 0, 2), always_action("c1", 1, 2),
                                      random_behaviour(2, 77)};
    PriorSpec spec;
    spec.method = PriorMethod::utility;
    spec.horizon = 3;
    PriorResult r = compute_prior(spec, g, pool);
    std::size_t best_type = 0;
    double best_value = -1.0;
    for (std::size_t m = 0; m < pool.size(); ++m) {
      double v = valuation(g, pool[m], pool[m], 3, 0);
      if (v > best_value) {
        best_value = v;
        best_type = m;
      }
    }
    CHECK(std::distance(r.probs.begin(), std::max_element(r.probs.begin(), r.probs.end())) ==
          static_cast<std::ptrdiff_t>(best_type));
  }

  SUBCASE("booster widens the gap between ranked types") {
    std::vector<BehaviourPtr> pool = {always_action("c0", 0, 2), always_action("c1", 1, 2)};
    double v0 = valuation(g, pool[0], pool[0], 3, 0);
    double v1 = valuation(g, pool[1], pool[1], 3, 0);
    REQUIRE(v0 != v1);
    PriorSpec weak;
    weak.method = PriorMethod::utility;
    weak.horizon = 3;
    weak.booster = 2.0;
    PriorSpec strong = weak;
    strong.booster = 10.0;
    PriorResult rw = compute_prior(weak, g, pool);
    PriorResult rs = compute_prior(strong, g, pool);
    std::size_t hi = v0 > v1 ? 0 : 1;
    std::size_t lo = 1 - hi;
    CHECK(rw.probs[hi] > rw.probs[lo]);
    CHECK(rs.probs[hi] / rs.probs[lo] > rw.probs[hi] / rw.probs[lo]);
  }
}

TEST_CASE("lp priors return floored full-support distributions") {
  Game g = pd_game();
  auto pool = ten_type_pool(g);
  for (PriorMethod m : {PriorMethod::lp_utility, PriorMethod::lp_stackelberg,
                        PriorMethod::lp_welfare, PriorMethod::lp_fairness}) {
    PriorSpec spec;
    spec.method = m;
    spec.horizon = 3;
    PriorResult r = compute_prior(spec, g, pool);
    CHECK_FALSE(r.fallback);
    double total = 0.0;
    for (double p : r.probs) {
      CHECK(p >= spec.lp_floor * 0.5);  // renormalisation may shave the floor slightly
      total += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("single-type pools short-circuit to certainty") {
    PriorSpec spec;
    spec.method = PriorMethod::lp_utility;
    PriorResult r = compute_prior(spec, g, {pool[0]});
    CHECK(r.probs == std::vector<double>{1.0});
  }
}

TEST_CASE("every method yields a full-support distribution summing to one") {
  Game g = pd_game();
  auto pool = ten_type_pool(g);
  for (PriorMethod m : all_prior_methods()) {
    PriorSpec spec;
    spec.method = m;
    spec.horizon = 2;  // keep the valuation cheap here
    spec.seed = 7;
    PriorResult r = compute_prior(spec, g, pool);
    REQUIRE(r.probs.size() == pool.size());
    double total = 0.0;
    for (double p : r.probs) {
      CHECK(p > 0.0);
      total += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

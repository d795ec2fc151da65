// Apache License, Version 2.0, refer to LICENSE.txt

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "planner_oracle.hpp"
#include "sbg/planner.hpp"
#include "test_util.hpp"

using namespace sbg;
using sbg_test::OracleSpec;
using sbg_test::oracle_expected_payoff;
using sbg_test::pd_game;

namespace {

Game match_game() {
  // Payoff 1 when both players pick the same action.
  return Game::repeated_matrix({{1, 0}, {0, 1}}, {{0, 0}, {0, 0}});
}

BeliefState point_belief(const Game&, BehaviourPtr type) {
  return BeliefState(BeliefMode::product, {1}, {{std::move(type)}}, {{1.0}});
}

PlannerConfig depth_cfg(int horizon) {
  PlannerConfig cfg;
  cfg.mode = PlannerConfig::Mode::depth_limited;
  cfg.horizon = horizon;
  return cfg;
}

}  // namespace

TEST_CASE("horizon zero and one are both myopic best responses") {
  Game g = pd_game();
  BeliefState belief = point_belief(g, always_action("col0", 0, 2));
  History h(g.initial_state());
  for (int horizon : {0, 1}) {
    Planner planner(depth_cfg(horizon));
    for (int row = 0; row < 2; ++row) {
      double expect = g.payoff(0, 0, {row, 0});
      CHECK(planner.expected_payoff(g, belief, h, row) == doctest::Approx(expect));
    }
  }
}

TEST_CASE("strictly dominant actions become one-hot choices") {
  Game g = pd_game();  // defect strictly dominates for the row player
  BeliefState belief = point_belief(g, random_behaviour(2, 17));
  Planner planner(depth_cfg(1));
  History h(g.initial_state());
  auto rng = RngStream(2).engine();
  auto [action, dist] = planner.choose_action(g, belief, h, rng);
  CHECK(action == 1);
  CHECK(dist == std::vector<double>{0.0, 1.0});
}

TEST_CASE("full ties give the uniform argmax distribution") {
  Game g = Game::repeated_matrix({{2, 2}, {2, 2}}, {{2, 2}, {2, 2}});
  BeliefState belief = point_belief(g, random_behaviour(2, 18));
  Planner planner(depth_cfg(2));
  History h(g.initial_state());
  auto rng = RngStream(3).engine();
  auto [action, dist] = planner.choose_action(g, belief, h, rng);
  CHECK(dist == std::vector<double>{0.5, 0.5});
}

TEST_CASE("two-step expansion matches a hand-unrolled expectimax") {
  // Opponent alternates between the two actions starting with the first; a
  // single hypothesised type makes the branch weights explicit.
  Game g = match_game();
  auto lr = std::make_shared<CycleBehaviour>("tLR", std::vector<int>{0, 1});
  BeliefState belief = point_belief(g, lr);
  Planner planner(depth_cfg(2));
  History h(g.initial_state());

  // By hand: opponent plays 0 now and 1 next. Q(a0) = u(a0,0) + max_a u(a,1).
  double expect0 = 1.0 + 1.0;
  double expect1 = 0.0 + 1.0;
  CHECK(planner.expected_payoff(g, belief, h, 0) == doctest::Approx(expect0));
  CHECK(planner.expected_payoff(g, belief, h, 1) == doctest::Approx(expect1));

  // And against the independent enumerator.
  OracleSpec spec{&g, {lr}, {1.0}, BeliefMode::product, 0, 1};
  for (int a = 0; a < 2; ++a)
    CHECK(planner.expected_payoff(g, belief, h, a) ==
          doctest::Approx(oracle_expected_payoff(spec, h, a, 2)).epsilon(1e-12));
}

TEST_CASE("after one observation the matching task is completed whatever the prior") {
  // Hypothesised types: always-second and the 0,1,1 cycle. After seeing the
  // opponent open with the first action, both surviving predictions agree on
  // the second action, so the planner matches it for any prior weighting.
  Game g = match_game();
  auto always_r = always_action("tR", 1, 2);
  auto lrr = std::make_shared<CycleBehaviour>("tLRR", std::vector<int>{0, 1, 1});
  for (double prior : {0.1, 0.5, 0.9}) {
    BeliefState belief(BeliefMode::product, {1}, {{always_r, lrr}}, {{prior, 1.0 - prior}});
    History h(g.initial_state());
    JointAction first{0, 0};  // true opponent opens with the first action
    belief.update(g, h, first);
    h.append(first, 0);
    Planner planner(depth_cfg(1));
    auto rng = RngStream(4).engine();
    auto [action, dist] = planner.choose_action(g, belief, h, rng);
    CHECK(action == 1);  // matches the opponent's next move
  }
}

TEST_CASE("expected payoffs match the enumerator on random instances") {
  auto rng = RngStream(999).engine();
  std::uniform_real_distribution<double> pay(0.0, 4.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<std::vector<double>> u1 = {{pay(rng), pay(rng)}, {pay(rng), pay(rng)}};
    std::vector<std::vector<double>> u2 = {{pay(rng), pay(rng)}, {pay(rng), pay(rng)}};
    Game g = Game::repeated_matrix(u1, u2);

    int num_types = 2 + static_cast<int>(rng() % 3);
    std::vector<BehaviourPtr> types;
    std::vector<double> prior;
    double total = 0.0;
    for (int m = 0; m < num_types; ++m) {
      types.push_back(random_behaviour(2, rng()));
      double w = 0.05 + unit(rng);
      prior.push_back(w);
      total += w;
    }
    for (double& w : prior) w /= total;

    BeliefMode mode = trial % 2 == 0 ? BeliefMode::product : BeliefMode::sum;
    BeliefState belief(mode, {1}, {types}, {prior});
    History h(g.initial_state());
    int warmup = static_cast<int>(rng() % 5);
    for (int t = 0; t < warmup; ++t) {
      JointAction a{static_cast<int>(rng() % 2), static_cast<int>(rng() % 2)};
      belief.update(g, h, a);
      h.append(a, 0);
    }

    int horizon = 1 + static_cast<int>(rng() % 3);
    PlannerConfig cfg = depth_cfg(horizon);
    Planner planner(cfg);
    OracleSpec spec{&g, types, prior, mode, 0, 1};
    for (int a = 0; a < 2; ++a) {
      double got = planner.expected_payoff(g, belief, h, a);
      double want = oracle_expected_payoff(spec, h, a, horizon);
      CHECK(got == doctest::Approx(want).epsilon(1e-9));
    }
  }
}

TEST_CASE("argmax set is invariant to constant payoff shifts") {
  auto rng = RngStream(1001).engine();
  std::uniform_real_distribution<double> pay(0.0, 4.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<double>> u1 = {{pay(rng), pay(rng)}, {pay(rng), pay(rng)}};
    std::vector<std::vector<double>> shifted = u1;
    for (auto& row : shifted)
      for (double& v : row) v += 7.5;
    std::vector<std::vector<double>> u2 = {{pay(rng), pay(rng)}, {pay(rng), pay(rng)}};
    Game g = Game::repeated_matrix(u1, u2);
    Game g_shift = Game::repeated_matrix(shifted, u2);

    std::vector<BehaviourPtr> types = {random_behaviour(2, rng()), random_behaviour(2, rng())};
    BeliefState belief(BeliefMode::product, {1}, {types}, {{0.5, 0.5}});
    Planner planner(depth_cfg(2));
    History h(g.initial_state());
    auto base = planner.argmax_set(planner.action_values(g, belief, h));
    auto moved = planner.argmax_set(planner.action_values(g_shift, belief, h));
    CHECK(base == moved);
  }
}

TEST_CASE("discount zero and horizon one choose identically") {
  Game g = pd_game();
  std::vector<BehaviourPtr> types = {random_behaviour(2, 31), random_behaviour(2, 32)};
  BeliefState belief(BeliefMode::product, {1}, {types}, {{0.5, 0.5}});

  PlannerConfig discounted;
  discounted.mode = PlannerConfig::Mode::discounted;
  discounted.gamma = 0.0;
  discounted.max_depth = 3;
  Planner p_gamma(discounted);
  Planner p_depth(depth_cfg(1));

  auto rng = RngStream(5).engine();
  History h(g.initial_state());
  for (int t = 0; t < 30; ++t) {
    auto a_gamma = p_gamma.argmax_set(p_gamma.action_values(g, belief, h));
    auto a_depth = p_depth.argmax_set(p_depth.action_values(g, belief, h));
    CHECK(a_gamma == a_depth);
    JointAction a{static_cast<int>(rng() % 2), static_cast<int>(rng() % 2)};
    belief.update(g, h, a);
    h.append(a, 0);
  }
}

TEST_CASE("branch beliefs are updated with the branch's simulated actions") {
  // With disjoint one-hot types and a fair prior, the first simulated
  // opponent action pins the branch posterior, so the second step is
  // predicted perfectly: each branch earns the match payoff at step two.
  Game g = match_game();
  auto ta = always_action("tA", 0, 2);
  auto tb = always_action("tB", 1, 2);
  BeliefState belief(BeliefMode::product, {1}, {{ta, tb}}, {{0.5, 0.5}});
  Planner planner(depth_cfg(2));
  History h(g.initial_state());
  // Playing first action: step-1 value 0.5 (match if opponent is tA), plus a
  // guaranteed 1 at step two in both branches.
  CHECK(planner.expected_payoff(g, belief, h, 0) == doctest::Approx(1.5));
  CHECK(planner.expected_payoff(g, belief, h, 1) == doctest::Approx(1.5));
}

TEST_CASE("correlated beliefs with a factorising prior match independent planning") {
  // Three players, two opponents. When the joint prior is the product of the
  // marginals and no updates have landed, correlated-mode expansion must
  // agree with the independent product mode.
  Game g(1, 0, {}, {2, 2, 2});
  for (int j = 0; j < g.num_joint_actions(); ++j) {
    JointAction a = g.joint_from_index(j);
    g.set_payoff(0, 0, a, static_cast<double>(a[0] + 2 * a[1] - a[2]));
  }
  g.finalize();

  std::vector<BehaviourPtr> set1 = {always_action("x0", 0, 2), random_behaviour(2, 61)};
  std::vector<BehaviourPtr> set2 = {random_behaviour(2, 62), random_behaviour(2, 63)};
  std::vector<std::vector<double>> priors = {{0.3, 0.7}, {0.6, 0.4}};
  BeliefState independent(BeliefMode::product, {1, 2}, {set1, set2}, priors);
  BeliefState correlated(BeliefMode::correlated, {1, 2}, {set1, set2}, priors);

  Planner planner(depth_cfg(2));
  History h(g.initial_state());
  for (int a = 0; a < 2; ++a)
    CHECK(planner.expected_payoff(g, independent, h, a) ==
          doctest::Approx(planner.expected_payoff(g, correlated, h, a)).epsilon(1e-12));
}

TEST_CASE("node budget overruns raise an explicit error") {
  Game g = pd_game();
  BeliefState belief = point_belief(g, random_behaviour(2, 77));
  PlannerConfig cfg = depth_cfg(6);
  cfg.node_budget = 10;
  Planner planner(cfg);
  History h(g.initial_state());
  CHECK_THROWS_AS(planner.action_values(g, belief, h), BudgetExceededError);
}

TEST_CASE("task-completion planning values are termination probabilities") {
  // Chain: from s0 the joint action (0,0) moves to s1, from s1 the action
  // (0,0) reaches the terminal state; anything else stays put.
  Game g(3, 0, {2}, {2, 2});
  g.set_transition(0, {0, 0}, {{1, 1.0}});
  g.set_transition(1, {0, 0}, {{2, 1.0}});
  g.finalize();

  BeliefState belief = point_belief(g, always_action("opp0", 0, 2));
  PlannerConfig cfg;
  cfg.mode = PlannerConfig::Mode::discounted;
  cfg.gamma = 1.0;
  cfg.max_depth = 3;
  cfg.task_completion = true;
  Planner planner(cfg);
  History h(g.initial_state());
  // Best play reaches the terminal state with certainty within the depth.
  CHECK(planner.expected_payoff(g, belief, h, 0) == doctest::Approx(1.0));
  // Wrong first action wastes a step but still terminates in-depth.
  CHECK(planner.expected_payoff(g, belief, h, 1) == doctest::Approx(1.0));

  cfg.max_depth = 2;
  Planner tight(cfg);
  CHECK(tight.expected_payoff(g, belief, h, 0) == doctest::Approx(1.0));
  CHECK(tight.expected_payoff(g, belief, h, 1) == doctest::Approx(0.0));
}

TEST_CASE("sampled expansion stays close to the exact values") {
  Game g = pd_game();
  std::vector<BehaviourPtr> types = {random_behaviour(2, 41), random_behaviour(2, 42)};
  BeliefState belief(BeliefMode::product, {1}, {types}, {{0.5, 0.5}});
  PlannerConfig exact_cfg = depth_cfg(2);
  PlannerConfig approx_cfg = exact_cfg;
  approx_cfg.sample_width = 64;
  approx_cfg.sample_seed = 7;
  Planner exact(exact_cfg);
  Planner approx(approx_cfg);
  History h(g.initial_state());
  double e = exact.expected_payoff(g, belief, h, 0);
  double a = approx.expected_payoff(g, belief, h, 0);
  CHECK(a == doctest::Approx(e).epsilon(0.25));
}

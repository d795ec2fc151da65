// Apache License, Version 2.0, refer to LICENSE.txt

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sbg/dataset.hpp"
#include "sbg/serialize.hpp"
#include "sbg/stats.hpp"
#include "test_util.hpp"

using namespace sbg;
using sbg_test::random_history;

TEST_CASE("games round-trip through the versioned schema") {
  Game g(3, 0, {2}, {2, 3});
  g.set_transition(0, {0, 0}, {{1, 0.25}, {0, 0.75}});
  g.set_transition(0, {1, 2}, {{2, 1.0}});
  g.set_payoff(0, 0, {0, 0}, 1.5);
  g.set_payoff(1, 1, {1, 1}, -2.0);
  g.finalize();

  nlohmann::json doc = game_to_json(g);
  CHECK(doc["schema"] == kGameSchema);
  Game copy = game_from_json(doc);
  CHECK(copy.num_states() == g.num_states());
  CHECK(copy.num_actions(1) == 3);
  CHECK(copy.is_terminal(2));
  for (int j = 0; j < g.num_joint_actions(); ++j) {
    JointAction a = g.joint_from_index(j);
    CHECK(copy.transitions(0, a) == g.transitions(0, a));
    for (int i = 0; i < 2; ++i) CHECK(copy.payoff(i, 0, a) == g.payoff(i, 0, a));
  }

  nlohmann::json wrong = doc;
  wrong["schema"] = "sbg-game/0";
  CHECK_THROWS_AS(game_from_json(wrong), ModelError);
}

TEST_CASE("behaviour pools round-trip and evaluate identically") {
  Game g = sbg_test::pd_game();
  DecisionTreeOps ops;
  auto rng = RngStream(50).engine();
  std::vector<BehaviourPtr> pool = {
      std::make_shared<ConstantBehaviour>("c", std::vector<double>{0.25, 0.75}),
      std::make_shared<CycleBehaviour>("cy", std::vector<int>{0, 1, 1}),
      random_behaviour(2, 77),
      std::make_shared<DecisionTreeBehaviour>("dt", ops.random(rng)),
      std::make_shared<NeuralNetBehaviour>("nn", NeuralNet::from_genome(NeuralNetOps{}.random(rng))),
      std::make_shared<LftBehaviour>("lft", LftRole::trigger,
                                     std::vector<JointAction>{{0, 0}, {1, 1}}),
      fictitious_play(FictitiousVariant::conditioned),
  };

  std::vector<BehaviourPtr> copy = pool_from_json(pool_to_json(pool));
  REQUIRE(copy.size() == pool.size());
  for (std::size_t k = 0; k < pool.size(); ++k) {
    CHECK(copy[k]->id() == pool[k]->id());
    for (int trial = 0; trial < 25; ++trial) {
      History h = random_history(g, static_cast<int>(rng() % 7), rng);
      CHECK(copy[k]->action_probabilities(g, h, 1) == pool[k]->action_probabilities(g, h, 1));
    }
  }
}

TEST_CASE("chains round-trip through sparse triples") {
  LabelledChain c;
  c.initial = 0;
  c.term = {false, false, true};
  c.rows = {{{0, 0.25}, {1, 0.75}}, {{2, 1.0}}, {{2, 1.0}}};
  c.validate();
  LabelledChain copy = chain_from_json(chain_to_json(c));
  CHECK(copy.initial == c.initial);
  CHECK(copy.term == c.term);
  CHECK(copy.rows == c.rows);
}

TEST_CASE("datasets emit deterministically and re-parse losslessly") {
  Dataset ds({"name", "value", "count"});
  ds.set_meta("seed", "17");
  ds.set_meta("plan_hash", "abc123");
  ds.add_row({std::string("row-a"), 0.1234567890123456789, 3.0});
  ds.add_row({std::string("row-b"), -7.25e-9, 4.0});

  std::string csv = ds.to_csv();
  CHECK(csv == ds.to_csv());  // byte-identical re-emission

  Dataset back = Dataset::from_csv_text(csv);
  CHECK(back.columns() == ds.columns());
  CHECK(back.meta().at("seed") == "17");
  REQUIRE(back.rows().size() == 2);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 3; ++c) {
      const Cell& lhs = ds.rows()[r][c];
      const Cell& rhs = back.rows()[r][c];
      if (std::holds_alternative<double>(lhs))
        CHECK(std::get<double>(lhs) == std::get<double>(rhs));
      else
        CHECK(std::get<std::string>(lhs) == std::get<std::string>(rhs));
    }

  Dataset empty({"only", "header"});
  Dataset parsed = Dataset::from_csv_text(empty.to_csv());
  CHECK(parsed.columns() == empty.columns());
  CHECK(parsed.rows().empty());
}

TEST_CASE("student-t machinery matches reference values") {
  // Quantiles: P(T <= 1.8125) = 0.95 at 10 df; the 1-df case is a Cauchy.
  CHECK(student_t_cdf(1.8125, 10) == doctest::Approx(0.95).epsilon(1e-3));
  CHECK(student_t_cdf(1.0, 1) == doctest::Approx(0.75).epsilon(1e-6));
  CHECK(student_t_cdf(0.0, 7) == doctest::Approx(0.5));
  CHECK(student_t_cdf(-1.8125, 10) == doctest::Approx(0.05).epsilon(1e-3));

  // Regularised incomplete beta sanity: I_x(1,1) = x.
  for (double x : {0.1, 0.5, 0.9}) CHECK(regularised_incomplete_beta(1, 1, x) == doctest::Approx(x));

  SUBCASE("paired test on a constructed sample") {
    std::vector<double> a = {2.1, 2.4, 1.9, 2.8, 2.2, 2.6};
    std::vector<double> b = {2.0, 2.1, 2.0, 2.5, 2.1, 2.2};
    TTestResult r = paired_t_test(a, b);
    // Hand-computed: diffs mean 0.18333, sd 0.18348, t = 2.4475 at 5 df.
    CHECK(r.statistic == doctest::Approx(2.4475).epsilon(1e-3));
    CHECK(r.df == 5);
    CHECK(r.p_two_sided ==
          doctest::Approx(2.0 * (1.0 - student_t_cdf(r.statistic, 5))).epsilon(1e-9));
    CHECK(r.p_two_sided > 0.05);  // just misses the 5% level
    CHECK(r.p_two_sided < 0.07);
    CHECK(r.p_right == doctest::Approx(r.p_two_sided / 2.0).epsilon(1e-9));

    TTestResult same = paired_t_test(a, a);
    CHECK(same.degenerate);
    CHECK(same.p_two_sided == 1.0);
  }

  SUBCASE("null data is non-significant at the 5% level most of the time") {
    auto rng = RngStream(31).engine();
    std::normal_distribution<double> gauss(0.0, 1.0);
    int significant = 0;
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> a(30), b(30);
      for (int k = 0; k < 30; ++k) {
        double shared = gauss(rng);
        a[static_cast<std::size_t>(k)] = shared + gauss(rng);
        b[static_cast<std::size_t>(k)] = shared + gauss(rng);
      }
      if (paired_t_test(a, b).p_two_sided < 0.05) ++significant;
    }
    CHECK(significant <= 20);  // ~5% expected
  }
}

TEST_CASE("type distributions travel with the game document") {
  Game g = sbg_test::pd_game();
  auto a = always_action("tA", 0, 2);
  auto b = always_action("tB", 1, 2);
  TypeDistribution dist({1}, {{a}, {b}}, {0.25, 0.75}, TypeDistributionKind::mixed);
  nlohmann::json doc = game_to_json(g, dist);

  auto loaded = type_distribution_of(doc);
  REQUIRE(loaded.has_value());
  CHECK(loaded->kind() == TypeDistributionKind::mixed);
  CHECK(loaded->players() == std::vector<int>{1});
  CHECK(loaded->probabilities() == std::vector<double>{0.25, 0.75});
  CHECK(loaded->support()[1][0]->id() == "tB");

  CHECK_FALSE(type_distribution_of(game_to_json(g)).has_value());

  // Anti-correlated two-player tuples survive too.
  TypeDistribution corr({1, 2}, {{a, b}, {b, a}}, {0.5, 0.5}, TypeDistributionKind::correlated);
  TypeDistribution corr2 = type_distribution_from_json(type_distribution_to_json(corr));
  CHECK(corr2.kind() == TypeDistributionKind::correlated);
  CHECK(corr2.support().size() == 2);
}

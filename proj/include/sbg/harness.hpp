// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbg/bisim.hpp"
#include "sbg/dataset.hpp"
#include "sbg/decision_tree.hpp"
#include "sbg/episode.hpp"
#include "sbg/fictitious_play.hpp"
#include "sbg/games78.hpp"
#include "sbg/hyptest.hpp"
#include "sbg/lft.hpp"
#include "sbg/neural_net.hpp"
#include "sbg/planner.hpp"
#include "sbg/priors.hpp"
#include "sbg/qlearning.hpp"
#include "sbg/stats.hpp"

namespace sbg {

// Declarative description of one experiment run. Every stochastic component
// derives from `seed`; `scale` shrinks repetitions, rounds and process
// counts without changing any code path.
struct ExperimentPlan {
  std::string kind = "matrix-priors";  // matrix-priors | hyptest-random |
                                       // hyptest-adaptive | belief-convergence
  std::vector<std::string> games;      // catalogue ids; empty = full selection
  std::string generator = "random";    // random | lft | cdt | cnn
  std::vector<std::string> prior_methods = {"uniform"};
  std::string opponent = "rt";  // rt | fp | cfp
  int rounds = 100;
  int repetitions = 3;
  int horizon = 2;       // planning depth
  int slices = 10;       // time slices per play
  int prior_horizon = 3; // valuation steps for value/LP priors

  int processes = 50;
  int steps = 1000;
  int null_vectors = 50;
  std::vector<int> scores = {1, 2, 3};
  std::string weight_scheme = "uniform";
  double alpha = 0.01;
  int num_actions = 2;

  std::string fixture = "all";  // belief-convergence fixture selector
  int rl_states = 10;
  int rl_actions = 4;
  int convergence_steps = 3000;

  std::uint64_t seed = 1;
  double scale = 1.0;

  nlohmann::json to_json() const {
    nlohmann::json doc;
    doc["kind"] = kind;
    doc["games"] = games;
    doc["generator"] = generator;
    doc["prior_methods"] = prior_methods;
    doc["opponent"] = opponent;
    doc["rounds"] = rounds;
    doc["repetitions"] = repetitions;
    doc["horizon"] = horizon;
    doc["slices"] = slices;
    doc["prior_horizon"] = prior_horizon;
    doc["processes"] = processes;
    doc["steps"] = steps;
    doc["null_vectors"] = null_vectors;
    doc["scores"] = scores;
    doc["weight_scheme"] = weight_scheme;
    doc["alpha"] = alpha;
    doc["num_actions"] = num_actions;
    doc["fixture"] = fixture;
    doc["rl_states"] = rl_states;
    doc["rl_actions"] = rl_actions;
    doc["convergence_steps"] = convergence_steps;
    doc["seed"] = seed;
    doc["scale"] = scale;
    return doc;
  }

  static ExperimentPlan from_json(const nlohmann::json& doc) {
    ExperimentPlan plan;
    plan.kind = doc.value("kind", plan.kind);
    plan.games = doc.value("games", plan.games);
    plan.generator = doc.value("generator", plan.generator);
    plan.prior_methods = doc.value("prior_methods", plan.prior_methods);
    plan.opponent = doc.value("opponent", plan.opponent);
    plan.rounds = doc.value("rounds", plan.rounds);
    plan.repetitions = doc.value("repetitions", plan.repetitions);
    plan.horizon = doc.value("horizon", plan.horizon);
    plan.slices = doc.value("slices", plan.slices);
    plan.prior_horizon = doc.value("prior_horizon", plan.prior_horizon);
    plan.processes = doc.value("processes", plan.processes);
    plan.steps = doc.value("steps", plan.steps);
    plan.null_vectors = doc.value("null_vectors", plan.null_vectors);
    plan.scores = doc.value("scores", plan.scores);
    plan.weight_scheme = doc.value("weight_scheme", plan.weight_scheme);
    plan.alpha = doc.value("alpha", plan.alpha);
    plan.num_actions = doc.value("num_actions", plan.num_actions);
    plan.fixture = doc.value("fixture", plan.fixture);
    plan.rl_states = doc.value("rl_states", plan.rl_states);
    plan.rl_actions = doc.value("rl_actions", plan.rl_actions);
    plan.convergence_steps = doc.value("convergence_steps", plan.convergence_steps);
    plan.seed = doc.value("seed", plan.seed);
    plan.scale = doc.value("scale", plan.scale);
    return plan;
  }

  std::string hash() const {
    std::uint64_t h = hash_string(to_json().dump());
    char buffer[20];
    std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(h));
    return buffer;
  }

  int scaled(int value) const {
    return std::max(1, static_cast<int>(std::lround(value * scale)));
  }
};

inline void emit(const Dataset& dataset, DataFormat format, const std::string& path) {
  dataset.write(path, format);
}

inline PriorMethod prior_method_from_string(const std::string& name) {
  for (PriorMethod m : all_prior_methods())
    if (name == prior_method_name(m)) return m;
  throw ModelError("unknown prior method: " + name);
}

namespace detail_harness {

inline std::vector<const OrdinalGame*> game_selection(const ExperimentPlan& plan) {
  std::vector<const OrdinalGame*> out;
  bool filter_dominance = plan.opponent == "fp" || plan.opponent == "cfp";
  for (const OrdinalGame& g : enumerate_games()) {
    if (!plan.games.empty() &&
        std::find(plan.games.begin(), plan.games.end(), g.id) == plan.games.end())
      continue;
    if (filter_dominance && has_dominant_action(g, 1)) continue;
    out.push_back(&g);
  }
  if (out.empty()) throw ModelError("experiment plan selects no games");
  return out;
}

// Hypothesised type pool of the requested generator class for one game.
inline std::vector<BehaviourPtr> generator_pool(const std::string& generator, const Game& game,
                                                const RngStream& root, int count) {
  if (generator == "random") {
    std::vector<BehaviourPtr> pool;
    for (int k = 0; k < count; ++k)
      pool.push_back(random_behaviour(game.num_actions(1), root.sub("rb", static_cast<std::uint64_t>(k)).seed()));
    return pool;
  }
  if (generator == "lft") {
    std::vector<BehaviourPtr> all = make_lft_pool(game, default_lft_targets(game));
    auto rng = root.sub("lft").engine();
    std::shuffle(all.begin(), all.end(), rng);
    if (static_cast<int>(all.size()) < count) throw ModelError("lft pool too small");
    all.resize(static_cast<std::size_t>(count));
    return all;
  }
  EvoParams params;
  params.population = 20;
  params.generations = 8;
  params.rounds_per_eval = 10;
  params.opponents_per_eval = 2;
  if (generator == "cdt") return evolve_cdt_pool(game, params, root.sub("cdt"), 1, count).behaviours;
  if (generator == "cnn") return evolve_cnn_pool(game, params, root.sub("cnn"), 1, count).behaviours;
  throw ModelError("unknown type generator: " + generator);
}

inline BehaviourPtr opponent_behaviour(const ExperimentPlan& plan, const Game& game,
                                       const RngStream& root) {
  if (plan.opponent == "rt") return generator_pool(plan.generator, game, root.sub("true"), 1)[0];
  if (plan.opponent == "fp") return fictitious_play(FictitiousVariant::plain);
  if (plan.opponent == "cfp") return fictitious_play(FictitiousVariant::conditioned);
  throw ModelError("unknown opponent kind: " + plan.opponent);
}

}  // namespace detail_harness

// Matrix-game prior study: per play, nine generated types plus the true
// opponent type form the hypothesis set, a prior method weights them, and a
// depth-limited planning agent with a product posterior plays the repeated
// game. Slice metrics land in one row per (play, slice). Failed plays are
// recorded with a reason code, never dropped.
inline Dataset run_matrix_experiment(const ExperimentPlan& plan) {
  Dataset ds({"game", "class", "opponent", "prior", "rep", "slice", "status", "converged_1",
              "converged_2", "payoff_1", "payoff_2", "welfare", "fairness", "nash", "pareto",
              "welfare_opt", "fairness_opt", "degeneracy_resets"});
  ds.set_meta("plan_hash", plan.hash());
  ds.set_meta("seed", std::to_string(plan.seed));
  ds.set_meta("kind", plan.kind);
  int skipped = 0;

  int rounds = plan.scaled(plan.rounds);
  int reps = plan.scaled(plan.repetitions);
  std::vector<const OrdinalGame*> games = detail_harness::game_selection(plan);
  for (std::size_t gi = 0; gi < games.size(); ++gi) {
    const OrdinalGame& og = *games[gi];
    Game game = og.to_game();
    for (const std::string& method_name : plan.prior_methods) {
      PriorMethod method = prior_method_from_string(method_name);
      for (int rep = 0; rep < reps; ++rep) {
        // Shared across prior methods: plays with equal (game, rep) use
        // identical seeds so prior comparisons pair up.
        RngStream play_root = RngStream(plan.seed).sub("play", gi * 1000 + static_cast<std::uint64_t>(rep));
        auto fail = [&](const std::string& reason) {
          ++skipped;
          std::vector<Cell> row = {og.id,
                                   og.no_conflict ? "no-conflict" : "conflict",
                                   plan.opponent,
                                   method_name,
                                   double(rep),
                                   -1.0,
                                   "skipped:" + reason,
                                   0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
          ds.add_row(std::move(row));
        };
        try {
          std::vector<BehaviourPtr> hypothesis =
              detail_harness::generator_pool(plan.generator, game, play_root.sub("pool"), 9);
          BehaviourPtr truth = detail_harness::opponent_behaviour(plan, game, play_root);
          hypothesis.push_back(truth);

          PriorSpec prior_spec;
          prior_spec.method = method;
          prior_spec.horizon = plan.prior_horizon;
          prior_spec.seed = play_root.sub("prior").seed();
          PriorResult prior = compute_prior(prior_spec, game, hypothesis);

          PlannerConfig cfg;
          cfg.player = 0;
          cfg.mode = PlannerConfig::Mode::depth_limited;
          cfg.horizon = plan.horizon;
          BeliefState belief(BeliefMode::product, {1}, {hypothesis}, {prior.probs});
          auto agent = std::make_shared<PlanningAgent>(cfg, std::move(belief));

          std::vector<std::shared_ptr<ActionSource>> sources = {
              agent, std::make_shared<BehaviourSource>(truth)};
          EpisodeConfig ecfg;
          ecfg.max_steps = rounds;
          ecfg.record_traces = true;
          EpisodeResult res = run_episode(game, sources, std::nullopt, ecfg, play_root.sub("episode"));

          std::vector<std::array<std::vector<double>, 2>> traces;
          for (const auto& step : res.traces) traces.push_back({step[0], step[1]});
          int slice_len = std::max(1, rounds / plan.slices);
          for (int begin = 0, slice = 0; begin < res.history.length(); begin += slice_len, ++slice) {
            int end = std::min(begin + slice_len, res.history.length());
            SliceMetrics m = slice_metrics(og, res.history, begin, end, traces);
            ds.add_row({og.id,
                        og.no_conflict ? "no-conflict" : "conflict",
                        plan.opponent,
                        method_name,
                        double(rep),
                        double(slice),
                        "ok",
                        m.converged[0] ? 1.0 : 0.0,
                        m.converged[1] ? 1.0 : 0.0,
                        m.avg_payoff[0],
                        m.avg_payoff[1],
                        m.welfare,
                        m.fairness,
                        m.nash ? 1.0 : 0.0,
                        m.pareto ? 1.0 : 0.0,
                        m.welfare_opt ? 1.0 : 0.0,
                        m.fairness_opt ? 1.0 : 0.0,
                        double(agent->degeneracy_resets())});
          }
        } catch (const std::exception& err) {
          fail(err.what());
        }
      }
    }
  }
  ds.set_meta("skipped", std::to_string(skipped));
  return ds;
}

// Behavioural-hypothesis-testing study: in half of the processes the
// hypothesis equals the true type; accuracy is the fraction of steps whose
// reject decision is right.
inline Dataset run_hyptest_experiment(const ExperimentPlan& plan) {
  Dataset ds({"process", "condition", "accuracy", "final_p", "reject_rate", "steps"});
  ds.set_meta("plan_hash", plan.hash());
  ds.set_meta("seed", std::to_string(plan.seed));
  ds.set_meta("kind", plan.kind);
  ds.set_meta("scores", [&] {
    std::string s;
    for (int k : plan.scores) s += std::to_string(k);
    return s;
  }());

  bool adaptive = plan.kind == "hyptest-adaptive";
  Game game = adaptive ? detail_harness::game_selection(plan)[0]->to_game()
                       : Game::single_state({plan.num_actions, plan.num_actions});

  int processes = plan.scaled(plan.processes);
  int steps = plan.scaled(plan.steps);
  for (int proc = 0; proc < processes; ++proc) {
    bool matching = proc < processes / 2;
    RngStream root = RngStream(plan.seed).sub("process", static_cast<std::uint64_t>(proc));

    BehaviourPtr self, truth, hypothesis;
    if (adaptive) {
      std::vector<BehaviourPtr> pool =
          detail_harness::generator_pool(plan.generator, game, root.sub("pool"), 4);
      self = pool[0];
      truth = pool[1];
      hypothesis = matching ? pool[1] : pool[2];
    } else {
      self = random_behaviour(plan.num_actions, root.sub("self").seed());
      truth = random_behaviour(plan.num_actions, root.sub("truth").seed());
      hypothesis = matching ? truth : random_behaviour(plan.num_actions, root.sub("alt").seed());
    }

    HypTestConfig cfg;
    cfg.scores = plan.scores;
    cfg.scheme = weight_scheme_from_string(plan.weight_scheme);
    cfg.null_vectors = plan.null_vectors;
    cfg.alpha = plan.alpha;
    HypTest test(hypothesis, 1, cfg, root.sub("test").seed());

    auto self_rng = root.sub("controller", 0).engine();
    auto truth_rng = root.sub("controller", 1).engine();
    History h(game.initial_state());
    int correct = 0, rejects = 0;
    double p = 1.0;
    for (int t = 0; t < steps; ++t) {
      int own = sample_index(self->action_probabilities(game, h, 0), self_rng);
      int opp = sample_index(truth->action_probabilities(game, h, 1), truth_rng);
      p = test.observe(game, h, opp);
      bool reject = p < plan.alpha;
      rejects += reject ? 1 : 0;
      if (reject == !matching) ++correct;
      h.append({own, opp}, h.current_state());
    }
    ds.add_row({double(proc), matching ? "match" : "mismatch",
                double(correct) / steps, p, double(rejects) / steps, double(steps)});
  }
  return ds;
}

// Belief-convergence traces: worked fixtures plus a reinforcement-learning
// scenario whose types decay their exploration over time.
inline Dataset run_belief_convergence(const ExperimentPlan& plan) {
  Dataset ds({"fixture", "mode", "t", "error", "p0", "p1", "ao", "as", "degenerate"});
  ds.set_meta("plan_hash", plan.hash());
  ds.set_meta("seed", std::to_string(plan.seed));
  ds.set_meta("kind", plan.kind);
  int steps = plan.scaled(plan.convergence_steps);

  auto want = [&](const std::string& name) {
    return plan.fixture == "all" || plan.fixture == name;
  };
  auto emit_row = [&](const std::string& fixture, const std::string& mode, int t, double err,
                      double p0, double p1, double ao, double as, bool degenerate) {
    ds.add_row({fixture, mode, double(t), err, p0, p1, ao, as, degenerate ? 1.0 : 0.0});
  };
  auto thin = [](int t) { return t < 100 || t % 10 == 0; };

  Game g2 = Game::single_state({2, 2});
  auto type_a = always_action("tA", 0, 2);
  auto type_b = always_action("tB", 1, 2);
  auto type_ab = std::make_shared<ConstantBehaviour>("tAB", std::vector<double>{0.5, 0.5});

  if (want("mixed-pair")) {
    // Two disjoint one-hot types under a fair mixed assignment: the running
    // products collapse while the running sums settle on the truth.
    BeliefState prod(BeliefMode::product, {1}, {{type_a, type_b}}, {{0.5, 0.5}});
    BeliefState sum(BeliefMode::sum, {1}, {{type_a, type_b}}, {{0.5, 0.5}});
    auto rng = RngStream(plan.seed).sub("mixed").engine();
    History h(g2.initial_state());
    for (int t = 1; t <= steps; ++t) {
      JointAction a{0, static_cast<int>(rng() % 2)};
      prod.update(g2, h, a);
      sum.update(g2, h, a);
      h.append(a, 0);
      if (!thin(t)) continue;
      std::vector<double> ps = sum.posterior(0);
      double err = std::abs(ps[0] - 0.5) + std::abs(ps[1] - 0.5);
      double ao = average_overlap(g2, h, {type_a, type_b}, 1);
      double as = average_stochasticity(g2, h, {type_a, type_b}, 1);
      emit_row("mixed-pair", "sum", t, err, ps[0], ps[1], ao, as, false);
      std::vector<double> pp = prod.posterior(0);
      emit_row("mixed-pair", "product", t, std::abs(pp[0] - 0.5) + std::abs(pp[1] - 0.5), pp[0],
               pp[1], ao, as, prod.degenerate());
    }
  }

  if (want("overlap-pair")) {
    // True type always plays the first action; the alternative mixes evenly.
    BeliefState sum(BeliefMode::sum, {1}, {{type_a, type_ab}}, {{0.5, 0.5}});
    History h(g2.initial_state());
    for (int t = 1; t <= steps; ++t) {
      JointAction a{0, 0};
      sum.update(g2, h, a);
      h.append(a, 0);
      if (!thin(t)) continue;
      std::vector<double> ps = sum.posterior(0);
      double err = std::abs(ps[0] - 1.0) + std::abs(ps[1] - 0.0);
      emit_row("overlap-pair", "sum", t, err, ps[0], ps[1],
               average_overlap(g2, h, {type_a, type_ab}, 1),
               average_stochasticity(g2, h, {type_a, type_ab}, 1), false);
    }
  }

  if (want("pure-random")) {
    // Pure assignment of a stochastic type; the product posterior's one-step
    // prediction error decays.
    auto truth = random_behaviour(2, RngStream(plan.seed).sub("pr-truth").seed());
    std::vector<BehaviourPtr> pool = {truth};
    for (int k = 0; k < 4; ++k)
      pool.push_back(random_behaviour(2, RngStream(plan.seed).sub("pr", static_cast<std::uint64_t>(k)).seed()));
    BeliefState prod(BeliefMode::product, {1}, {pool},
                     {std::vector<double>(pool.size(), 1.0 / pool.size())});
    auto rng = RngStream(plan.seed).sub("pr-act").engine();
    History h(g2.initial_state());
    for (int t = 1; t <= steps; ++t) {
      JointAction a{0, sample_index(truth->action_probabilities(g2, h, 1), rng)};
      prod.update(g2, h, a);
      h.append(a, 0);
      if (!thin(t)) continue;
      std::vector<double> predicted = prod.predictive(g2, h, 0);
      std::vector<double> actual = truth->action_probabilities(g2, h, 1);
      double err = 0.0;
      for (std::size_t k = 0; k < predicted.size(); ++k) err += std::abs(predicted[k] - actual[k]);
      std::vector<double> pp = prod.posterior(0);
      emit_row("pure-random", "product", t, err, pp[0], pp[1], 0.0, 0.0, prod.degenerate());
    }
  }

  if (want("anti-correlated")) {
    Game g3 = Game::single_state({2, 2, 2});
    TypeDistribution dist({1, 2}, {{type_a, type_b}, {type_b, type_a}}, {0.5, 0.5},
                          TypeDistributionKind::correlated);
    BeliefState corr(BeliefMode::correlated, {1, 2}, {{type_a, type_b}, {type_a, type_b}},
                     {{0.5, 0.5}, {0.5, 0.5}});
    BeliefState sum(BeliefMode::sum, {1, 2}, {{type_a, type_b}, {type_a, type_b}},
                    {{0.5, 0.5}, {0.5, 0.5}});
    std::vector<double> truth = {0.0, 0.5, 0.5, 0.0};
    auto rng = RngStream(plan.seed).sub("corr").engine();
    History h(g3.initial_state());
    for (int t = 1; t <= steps; ++t) {
      const auto& tuple = sample_types(dist, rng);
      JointAction a{0, tuple[0]->id() == "tA" ? 0 : 1, tuple[1]->id() == "tA" ? 0 : 1};
      corr.update(g3, h, a);
      sum.update(g3, h, a);
      h.append(a, 0);
      if (!thin(t)) continue;
      auto err_of = [&](const std::vector<double>& joint) {
        double err = 0.0;
        for (std::size_t k = 0; k < joint.size(); ++k) err += std::abs(joint[k] - truth[k]);
        return err;
      };
      std::vector<double> jc = corr.joint_posterior();
      std::vector<double> js = sum.joint_posterior();
      emit_row("anti-correlated", "correlated", t, err_of(jc), jc[1], jc[2], 0.0, 0.0, false);
      emit_row("anti-correlated", "sum", t, err_of(js), js[1], js[2], 0.0, 0.0, false);
    }
  }

  if (want("rl")) {
    // Random game; three tabular learners with distinct reward views and a
    // linearly decaying exploration schedule, assigned by a mixed
    // distribution. The sum posterior error against the assignment
    // probabilities is the trace of interest.
    RngStream root = RngStream(plan.seed).sub("rl");
    auto build_rng = root.sub("game").engine();
    Game game(plan.rl_states, 0, {}, {plan.rl_actions, plan.rl_actions});
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int s = 0; s < plan.rl_states; ++s)
      for (int j = 0; j < game.num_joint_actions(); ++j) {
        JointAction a = game.joint_from_index(j);
        std::vector<std::pair<int, double>> row;
        double total = 0.0;
        for (int k = 0; k < 3; ++k) {
          int target = static_cast<int>(build_rng() % static_cast<std::uint64_t>(plan.rl_states));
          double w = 0.1 + unit(build_rng);
          row.emplace_back(target, w);
          total += w;
        }
        for (auto& [target, w] : row) w /= total;
        game.set_transition(s, a, row);
      }
    game.finalize();

    QLearningParams params;
    params.epsilon.t_start = std::max(steps / 3, 10);
    params.epsilon.t_end = std::max(2 * steps / 3, 20);
    std::vector<BehaviourPtr> types;
    for (int k = 0; k < 3; ++k) {
      // Reward view: each learner prefers a different own action, scaled by
      // a state-dependent term so the tables differ across states.
      int preferred = k % plan.rl_actions;
      types.push_back(q_learning_behaviour(
          "rl-" + std::to_string(k),
          [preferred](const Game&, int state, const JointAction& a) {
            double base = a[1] == preferred ? 1.0 : 0.0;
            return base + 0.1 * ((state + a[1]) % 3);
          },
          params));
    }
    std::vector<double> truth = {0.3, 0.4, 0.3};
    TypeDistribution dist({1}, {{types[0]}, {types[1]}, {types[2]}}, truth,
                          TypeDistributionKind::mixed);
    BeliefState sum(BeliefMode::sum, {1}, {types}, {{1.0 / 3, 1.0 / 3, 1.0 / 3}});

    auto type_rng = root.sub("types").engine();
    auto self_rng = root.sub("self").engine();
    auto act_rng = root.sub("act").engine();
    auto trans_rng = root.sub("trans").engine();
    History h(game.initial_state());
    double ao_acc = 0.0, as_acc = 0.0;
    for (int t = 1; t <= steps; ++t) {
      const auto& tuple = sample_types(dist, type_rng);
      std::vector<double> opp = tuple[0]->action_probabilities(game, h, 1);
      JointAction a(2);
      a[0] = static_cast<int>(self_rng() % static_cast<std::uint64_t>(plan.rl_actions));
      a[1] = sample_index(opp, act_rng);
      // Incremental overlap/stochasticity terms for this step.
      int supporters = 0;
      double mass = 0.0, stoch = 0.0;
      for (const auto& type : types) {
        std::vector<double> p = type->action_probabilities(game, h, 1);
        double taken = p[static_cast<std::size_t>(a[1])];
        if (taken > 0.0) ++supporters;
        mass += taken;
        stoch += (1.0 - *std::max_element(p.begin(), p.end())) /
                 (1.0 - 1.0 / plan.rl_actions);
      }
      if (supporters >= 2) ao_acc += mass / static_cast<double>(types.size());
      as_acc += stoch / static_cast<double>(types.size());

      sum.update(game, h, a);
      step(game, h, a, trans_rng);
      if (!thin(t)) continue;
      std::vector<double> ps = sum.posterior(0);
      double err = 0.0;
      for (std::size_t k = 0; k < ps.size(); ++k) err += std::abs(ps[k] - truth[k]);
      emit_row("rl", "sum", t, err, ps[0], ps[1], ao_acc / t, as_acc / t, false);
    }
  }
  return ds;
}

inline Dataset run_experiment(const ExperimentPlan& plan) {
  if (plan.kind == "matrix-priors") return run_matrix_experiment(plan);
  if (plan.kind == "hyptest-random" || plan.kind == "hyptest-adaptive")
    return run_hyptest_experiment(plan);
  if (plan.kind == "belief-convergence") return run_belief_convergence(plan);
  throw ModelError("unknown experiment kind: " + plan.kind);
}

// Compares every prior method in a matrix-experiment dataset against the
// uniform baseline on one metric column. Plays pair up by (game, rep) since
// those share seeds; reported are the per-prior mean, the paired t statistic
// against uniform and both p-values. Tendencies are reported, not asserted.
inline Dataset prior_comparison(const Dataset& runs, const std::string& metric) {
  std::size_t metric_c = runs.columns().size();
  std::size_t game_c = 0, prior_c = 0, rep_c = 0, status_c = 0;
  for (std::size_t c = 0; c < runs.columns().size(); ++c) {
    if (runs.columns()[c] == metric) metric_c = c;
    if (runs.columns()[c] == "game") game_c = c;
    if (runs.columns()[c] == "prior") prior_c = c;
    if (runs.columns()[c] == "rep") rep_c = c;
    if (runs.columns()[c] == "status") status_c = c;
  }
  if (metric_c == runs.columns().size()) throw ModelError("unknown metric column: " + metric);

  // Per-play mean of the metric, keyed by prior then (game, rep).
  std::map<std::string, std::map<std::string, std::pair<double, int>>> plays;
  for (const auto& row : runs.rows()) {
    if (Dataset::cell_to_string(row[status_c]) != "ok") continue;
    std::string prior = Dataset::cell_to_string(row[prior_c]);
    std::string key = Dataset::cell_to_string(row[game_c]) + "|" +
                      Dataset::cell_to_string(row[rep_c]);
    auto& slot = plays[prior][key];
    slot.first += std::get<double>(row[metric_c]);
    slot.second += 1;
  }
  if (!plays.count("uniform"))
    throw ModelError("prior comparison needs the uniform baseline in the dataset");

  Dataset out({"prior", "metric", "pairs", "mean", "baseline_mean", "t", "p_two_sided",
               "p_right", "significant_5pct"});
  out.set_meta("metric", metric);
  const auto& base = plays.at("uniform");
  for (const auto& [prior, per_play] : plays) {
    if (prior == "uniform") continue;
    std::vector<double> candidate, baseline;
    for (const auto& [key, slot] : per_play) {
      auto it = base.find(key);
      if (it == base.end()) continue;
      candidate.push_back(slot.first / slot.second);
      baseline.push_back(it->second.first / it->second.second);
    }
    if (candidate.size() < 2) continue;
    TTestResult t = paired_t_test(candidate, baseline);
    out.add_row({prior, metric, double(candidate.size()), mean_of(candidate), mean_of(baseline),
                 t.statistic, t.p_two_sided, t.p_right,
                 t.p_two_sided < 0.05 ? 1.0 : 0.0});
  }
  return out;
}

// Per-decision trace of the first play of a matrix plan: per-action values,
// the argmax set and the belief snapshot at every decision.
inline nlohmann::json run_decision_trace(const ExperimentPlan& plan) {
  const OrdinalGame& og = *detail_harness::game_selection(plan)[0];
  Game game = og.to_game();
  RngStream play_root = RngStream(plan.seed).sub("play", 0);
  std::vector<BehaviourPtr> hypothesis =
      detail_harness::generator_pool(plan.generator, game, play_root.sub("pool"), 9);
  BehaviourPtr truth = detail_harness::opponent_behaviour(plan, game, play_root);
  hypothesis.push_back(truth);

  PriorSpec prior_spec;
  prior_spec.method = prior_method_from_string(plan.prior_methods.at(0));
  prior_spec.horizon = plan.prior_horizon;
  prior_spec.seed = play_root.sub("prior").seed();
  PriorResult prior = compute_prior(prior_spec, game, hypothesis);

  PlannerConfig cfg;
  cfg.player = 0;
  cfg.horizon = plan.horizon;
  BeliefState belief(BeliefMode::product, {1}, {hypothesis}, {prior.probs});
  auto agent = std::make_shared<PlanningAgent>(cfg, std::move(belief));
  agent->enable_decision_log();

  std::vector<std::shared_ptr<ActionSource>> sources = {agent,
                                                        std::make_shared<BehaviourSource>(truth)};
  EpisodeConfig ecfg;
  ecfg.max_steps = plan.scaled(plan.rounds);
  run_episode(game, sources, std::nullopt, ecfg, play_root.sub("episode"));

  nlohmann::json doc;
  doc["schema"] = "sbg-decisions/1";
  doc["game"] = og.id;
  doc["prior"] = plan.prior_methods.at(0);
  doc["plan_hash"] = plan.hash();
  nlohmann::json list = nlohmann::json::array();
  for (const DecisionRecord& r : agent->decision_log())
    list.push_back({{"t", r.t},
                    {"values", r.values},
                    {"argmax", r.argmax},
                    {"posterior", r.posterior}});
  doc["decisions"] = std::move(list);
  return doc;
}

}  // namespace sbg

// Apache License, Version 2.0, refer to LICENSE.txt

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sbg/harness.hpp"
#include "sbg/serialize.hpp"

using namespace sbg;

namespace {

const OrdinalGame* find_catalogue_game(const std::string& id) {
  for (const OrdinalGame& g : enumerate_games())
    if (g.id == id) return &g;
  return nullptr;
}

// `--game` accepts a catalogue id (g01..g78) or a path to a game JSON file.
Game resolve_game(const std::string& spec) {
  if (const OrdinalGame* g = find_catalogue_game(spec)) return g->to_game();
  if (std::filesystem::exists(spec)) return game_from_json(load_json(spec));
  throw ModelError("unknown game id or file: " + spec);
}

void write_or_print(const nlohmann::json& doc, const std::string& out) {
  if (out.empty())
    std::cout << doc.dump(2) << "\n";
  else
    save_json(doc, out);
}

void write_dataset(const Dataset& ds, const std::string& out, const std::string& format) {
  DataFormat f = data_format_from_string(format);
  if (out.empty()) {
    if (f == DataFormat::csv)
      std::cout << ds.to_csv();
    else
      std::cout << ds.to_json().dump(2) << "\n";
  } else {
    emit(ds, f, out);
  }
}

std::vector<int> parse_scores(const std::string& digits) {
  std::vector<int> scores;
  for (char c : digits) {
    if (c < '1' || c > '3') throw ModelError("scores must be digits from 1 to 3");
    scores.push_back(c - '0');
  }
  return scores;
}

int run_games78_list(const std::string& out, const std::string& format) {
  if (format == "json") {
    nlohmann::json list = nlohmann::json::array();
    for (const OrdinalGame& g : enumerate_games()) {
      list.push_back({{"id", g.id},
                      {"key", g.key()},
                      {"class", g.no_conflict ? "no-conflict" : "conflict"},
                      {"u1", g.u1},
                      {"u2", g.u2},
                      {"dominant_row", has_dominant_action(g, 0)},
                      {"dominant_col", has_dominant_action(g, 1)}});
    }
    write_or_print({{"schema", "sbg-games78/1"}, {"games", list}}, out);
  } else {
    Dataset ds({"id", "key", "class", "dominant_row", "dominant_col"});
    for (const OrdinalGame& g : enumerate_games())
      ds.add_row({g.id, g.key(), g.no_conflict ? "no-conflict" : "conflict",
                  has_dominant_action(g, 0) ? 1.0 : 0.0, has_dominant_action(g, 1) ? 1.0 : 0.0});
    write_dataset(ds, out, "csv");
  }
  return 0;
}

int run_gen_types(const std::string& game_spec, const std::string& method, int count,
                  std::uint64_t seed, const std::string& out) {
  Game game = resolve_game(game_spec);
  std::vector<BehaviourPtr> pool =
      detail_harness::generator_pool(method, game, RngStream(seed).sub("gen-types"), count);
  nlohmann::json doc = pool_to_json(pool);
  doc["generator"] = method;
  doc["seed"] = seed;
  write_or_print(doc, out);
  return 0;
}

int run_priors(const std::string& game_spec, const std::string& pool_path,
               const std::string& methods, int horizon, double booster, std::uint64_t seed,
               const std::string& out) {
  Game game = resolve_game(game_spec);
  std::vector<BehaviourPtr> pool = pool_from_json(load_json(pool_path));
  std::vector<PriorMethod> selected;
  if (methods == "all") {
    selected = all_prior_methods();
  } else {
    std::stringstream ss(methods);
    std::string name;
    while (std::getline(ss, name, ',')) selected.push_back(prior_method_from_string(name));
  }
  nlohmann::json table;
  table["schema"] = "sbg-priors/1";
  table["game"] = game_spec;
  table["seed"] = seed;
  for (PriorMethod m : selected) {
    PriorSpec spec;
    spec.method = m;
    spec.horizon = horizon;
    spec.booster = booster;
    spec.seed = seed;
    PriorResult r = compute_prior(spec, game, pool);
    table["methods"][prior_method_name(m)] = {{"probs", r.probs}, {"fallback", r.fallback}};
    if (!r.note.empty()) table["methods"][prior_method_name(m)]["note"] = r.note;
  }
  write_or_print(table, out);
  return 0;
}

// Exit code 0 only when every assertion attached to the plan holds.
int check_plan_assertions(const nlohmann::json& assertions, const Dataset& ds,
                          const ExperimentPlan& plan) {
  if (assertions.is_null()) return 0;
  auto mean_where = [&](const std::string& column, const std::string& filter_col,
                        const std::string& filter_val) {
    std::size_t idx = 0, fidx = 0;
    for (std::size_t c = 0; c < ds.columns().size(); ++c) {
      if (ds.columns()[c] == column) idx = c;
      if (!filter_col.empty() && ds.columns()[c] == filter_col) fidx = c;
    }
    double total = 0.0;
    int n = 0;
    for (const auto& row : ds.rows()) {
      if (!filter_col.empty() && Dataset::cell_to_string(row[fidx]) != filter_val) continue;
      total += std::get<double>(row[idx]);
      ++n;
    }
    return n == 0 ? 0.0 : total / n;
  };

  int failures = 0;
  auto verdict = [&](const std::string& name, bool ok, double got, double bound) {
    std::fprintf(stderr, "[%s] %s: %.6g vs %.6g\n", ok ? "pass" : "FAIL", name.c_str(), got,
                 bound);
    if (!ok) ++failures;
  };
  if (assertions.contains("max_skipped")) {
    double got = std::stod(ds.meta().count("skipped") ? ds.meta().at("skipped") : "0");
    verdict("max_skipped", got <= assertions["max_skipped"].get<double>(), got,
            assertions["max_skipped"].get<double>());
  }
  if (assertions.contains("min_accuracy_match")) {
    double got = mean_where("accuracy", "condition", "match");
    verdict("min_accuracy_match", got >= assertions["min_accuracy_match"].get<double>(), got,
            assertions["min_accuracy_match"].get<double>());
  }
  if (assertions.contains("min_accuracy_mismatch")) {
    double got = mean_where("accuracy", "condition", "mismatch");
    verdict("min_accuracy_mismatch", got >= assertions["min_accuracy_mismatch"].get<double>(),
            got, assertions["min_accuracy_mismatch"].get<double>());
  }
  if (assertions.contains("max_final_error")) {
    // Final error per (fixture, mode) trace.
    std::map<std::string, double> final_error;
    for (const auto& row : ds.rows())
      final_error[Dataset::cell_to_string(row[0]) + "/" + Dataset::cell_to_string(row[1])] =
          std::get<double>(row[3]);
    double worst = 0.0;
    for (const auto& [key, err] : final_error) worst = std::max(worst, err);
    verdict("max_final_error", worst <= assertions["max_final_error"].get<double>(), worst,
            assertions["max_final_error"].get<double>());
  }
  (void)plan;
  return failures == 0 ? 0 : 1;
}

int run_hyptest_trace(const ExperimentPlan& plan, const std::string& out,
                      const std::string& format) {
  // Single-process streaming trace: (t, T, xi, omega, beta, mu, p).
  Game game = Game::single_state({plan.num_actions, plan.num_actions});
  RngStream root = RngStream(plan.seed).sub("process", 0);
  auto truth = random_behaviour(plan.num_actions, root.sub("truth").seed());
  auto hypothesis = plan.processes > 1
                        ? random_behaviour(plan.num_actions, root.sub("alt").seed())
                        : truth;
  HypTestConfig cfg;
  cfg.scores = plan.scores;
  cfg.scheme = weight_scheme_from_string(plan.weight_scheme);
  cfg.null_vectors = plan.null_vectors;
  cfg.alpha = plan.alpha;
  HypTest test(hypothesis, 1, cfg, root.sub("test").seed());
  auto truth_rng = root.sub("controller", 1).engine();
  History h(game.initial_state());
  Dataset ds({"t", "statistic", "xi", "omega", "beta", "mode", "p"});
  ds.set_meta("plan_hash", plan.hash());
  for (int t = 1; t <= plan.scaled(plan.steps); ++t) {
    int opp = sample_index(truth->action_probabilities(game, h, 1), truth_rng);
    double p = test.observe(game, h, opp);
    ds.add_row({double(t), test.statistic(), test.params().xi, test.params().omega,
                test.params().beta, test.mode(), p});
    h.append({0, opp}, h.current_state());
  }
  write_dataset(ds, out, format);
  return 0;
}

int run_bisim_check(const std::string& a_path, const std::string& b_path, const std::string& out) {
  LabelledChain a = chain_from_json(load_json(a_path));
  LabelledChain b = chain_from_json(load_json(b_path));
  BisimResult r = bisimulation_check(a, b);
  nlohmann::json doc;
  doc["schema"] = "sbg-bisim/1";
  doc["bisimilar"] = r.bisimilar;
  doc["num_blocks"] = r.num_blocks;
  doc["partition"] = r.block_of;
  if (!r.bisimilar) doc["distinguishing_class"] = r.distinguishing_class;
  nlohmann::json probes = nlohmann::json::array();
  for (int t : {1, 5, 10, 25, 50})
    probes.push_back({{"t", t},
                      {"p_first", termination_probability(a, t)},
                      {"p_second", termination_probability(b, t)}});
  doc["termination"] = std::move(probes);
  write_or_print(doc, out);
  return r.bisimilar ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic Bayesian game toolkit: type-based planning agents, "
               "posterior-belief analysis, prior computation, behavioural hypothesis "
               "testing, and bisimulation checking."};
  app.require_subcommand(1);

  std::string out, format = "csv", plan_path;
  std::uint64_t seed = 1;
  double scale = 1.0;

  auto add_io = [&](CLI::App* cmd, bool with_format = true) {
    cmd->add_option("--out", out, "Output file (stdout when omitted)");
    if (with_format) cmd->add_option("--format", format, "csv or json");
    cmd->add_option("--seed", seed, "Root random seed");
    cmd->add_option("--scale", scale, "Scale factor for rounds/repetitions");
  };

  // games78
  auto* games = app.add_subcommand("games78", "Strictly ordinal 2x2 game catalogue");
  auto* games_list = games->add_subcommand("list", "Print the 78-game catalogue");
  std::string games_format = "json";
  games_list->add_option("--format", games_format, "json or csv");
  games_list->add_option("--out", out, "Output file (stdout when omitted)");

  // gen-types
  auto* gen = app.add_subcommand("gen-types", "Generate a behaviour pool for a game");
  std::string game_spec = "g01", method = "random";
  int count = 10;
  gen->add_option("--game", game_spec, "Catalogue id (g01..g78) or game JSON path");
  gen->add_option("--method", method, "random | lft | cdt | cnn");
  gen->add_option("--count", count, "Number of behaviours");
  add_io(gen, false);

  // priors
  auto* priors_cmd = app.add_subcommand("priors", "Compute prior beliefs over a pool");
  std::string pool_path, methods = "all";
  int prior_horizon = 5;
  double booster = 10.0;
  priors_cmd->add_option("--game", game_spec, "Catalogue id or game JSON path");
  priors_cmd->add_option("--pool", pool_path, "Behaviour pool JSON")->required();
  priors_cmd->add_option("--methods", methods, "Comma list or 'all'");
  priors_cmd->add_option("--horizon", prior_horizon, "Valuation steps");
  priors_cmd->add_option("--booster", booster, "Booster exponent");
  add_io(priors_cmd, false);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run a matrix-game experiment plan");
  std::string opponent = "rt", generator = "random", prior_list = "uniform", game_list;
  std::string decision_trace;
  int rounds = 100, reps = 3, horizon = 2;
  sim->add_option("--plan", plan_path, "Plan JSON (overrides the flags)");
  sim->add_option("--games", game_list, "Comma list of catalogue ids (default: all)");
  sim->add_option("--opponent", opponent, "rt | fp | cfp");
  sim->add_option("--generator", generator, "random | lft | cdt | cnn");
  sim->add_option("--priors", prior_list, "Comma list of prior methods");
  sim->add_option("--rounds", rounds, "Rounds per play");
  sim->add_option("--reps", reps, "Plays per game and prior");
  sim->add_option("--horizon", horizon, "Planning depth");
  sim->add_option("--decision-trace", decision_trace,
                  "Write a per-decision JSON trace of the first play to this path");
  std::string compare_metric;
  sim->add_option("--compare", compare_metric,
                  "After the run, print paired t-tests of each prior vs uniform on this metric");
  add_io(sim);

  // hyptest
  auto* hyp = app.add_subcommand("hyptest", "Behavioural hypothesis testing experiments");
  std::string scores = "123", scheme = "uniform", kind = "random";
  int processes = 50, steps = 1000, nsamples = 50, actions = 2;
  bool trace = false;
  hyp->add_option("--plan", plan_path, "Plan JSON (overrides the flags)");
  hyp->add_option("--kind", kind, "random | adaptive");
  hyp->add_option("--generator", generator, "Behaviour class for adaptive runs");
  hyp->add_option("--games", game_list, "Catalogue game for adaptive runs");
  hyp->add_option("--processes", processes, "Number of interaction processes");
  hyp->add_option("--steps", steps, "Steps per process");
  hyp->add_option("--actions", actions, "Actions per player");
  hyp->add_option("--n-samples", nsamples, "Null vectors N");
  hyp->add_option("--scores", scores, "Score functions, e.g. 13 for z1+z3");
  hyp->add_option("--scheme", scheme, "uniform | truemax | truemin | max | min");
  hyp->add_flag("--trace", trace, "Per-step trace of a single process");
  add_io(hyp);

  // belief-trace
  auto* belief = app.add_subcommand("belief-trace", "Posterior-belief convergence traces");
  std::string fixture = "all";
  int conv_steps = 3000;
  belief->add_option("--plan", plan_path, "Plan JSON (overrides the flags)");
  belief->add_option("--fixture", fixture,
                     "mixed-pair | overlap-pair | pure-random | anti-correlated | rl | all");
  belief->add_option("--steps", conv_steps, "Trace length");
  add_io(belief);

  // bisim
  auto* bisim_cmd = app.add_subcommand("bisim", "Probabilistic bisimulation tools");
  auto* bisim_check = bisim_cmd->add_subcommand("check", "Compare two chain JSON files");
  std::string chain_a, chain_b;
  bisim_check->add_option("first", chain_a, "Chain JSON")->required();
  bisim_check->add_option("second", chain_b, "Chain JSON")->required();
  bisim_check->add_option("--out", out, "Output file (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (games_list->parsed()) return run_games78_list(out, games_format);
    if (gen->parsed()) return run_gen_types(game_spec, method, count, seed, out);
    if (priors_cmd->parsed())
      return run_priors(game_spec, pool_path, methods, prior_horizon, booster, seed, out);

    if (sim->parsed() || hyp->parsed() || belief->parsed()) {
      ExperimentPlan plan;
      nlohmann::json assertions;
      if (!plan_path.empty()) {
        nlohmann::json doc = load_json(plan_path);
        plan = ExperimentPlan::from_json(doc);
        if (doc.contains("assertions")) assertions = doc["assertions"];
      } else if (sim->parsed()) {
        plan.kind = "matrix-priors";
        if (!game_list.empty()) {
          std::stringstream ss(game_list);
          std::string id;
          while (std::getline(ss, id, ',')) plan.games.push_back(id);
        }
        plan.opponent = opponent;
        plan.generator = generator;
        plan.prior_methods.clear();
        std::stringstream ss(prior_list);
        std::string name;
        while (std::getline(ss, name, ',')) plan.prior_methods.push_back(name);
        plan.rounds = rounds;
        plan.repetitions = reps;
        plan.horizon = horizon;
      } else if (hyp->parsed()) {
        plan.kind = kind == "adaptive" ? "hyptest-adaptive" : "hyptest-random";
        plan.generator = generator;
        if (!game_list.empty()) {
          std::stringstream ss(game_list);
          std::string id;
          while (std::getline(ss, id, ',')) plan.games.push_back(id);
        }
        plan.processes = processes;
        plan.steps = steps;
        plan.num_actions = actions;
        plan.null_vectors = nsamples;
        plan.scores = parse_scores(scores);
        plan.weight_scheme = scheme;
      } else {
        plan.kind = "belief-convergence";
        plan.fixture = fixture;
        plan.convergence_steps = conv_steps;
      }
      if (seed != 1) plan.seed = seed;
      if (scale != 1.0) plan.scale = scale;

      if (hyp->parsed() && trace) return run_hyptest_trace(plan, out, format);
      if (sim->parsed() && !decision_trace.empty())
        save_json(run_decision_trace(plan), decision_trace);
      Dataset ds = run_experiment(plan);
      write_dataset(ds, out, format);
      if (sim->parsed() && !compare_metric.empty())
        std::cout << prior_comparison(ds, compare_metric).to_csv();
      return check_plan_assertions(assertions, ds, plan);
    }

    if (bisim_check->parsed()) return run_bisim_check(chain_a, chain_b, out);
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 3;
  }
  return 0;
}

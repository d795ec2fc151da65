// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sbg/beliefs.hpp"
#include "sbg/episode.hpp"
#include "sbg/game.hpp"

namespace sbg {

struct BudgetExceededError : std::runtime_error {
  explicit BudgetExceededError(const std::string& what) : std::runtime_error(what) {}
};

struct PlannerConfig {
  enum class Mode { depth_limited, discounted };

  int player = 0;
  Mode mode = Mode::depth_limited;
  int horizon = 1;        // depth-limited: number of predicted future steps
  double gamma = 0.95;    // discounted mode
  int max_depth = 3;      // recursion cut-off in discounted mode
  bool task_completion = false;  // value 1 on reaching a terminal state, 0 elsewhere
  double tie_tolerance = 1e-9;
  long long node_budget = 4'000'000;
  // Width-limited sampled expansion (approximate planning); exact when unset.
  std::optional<int> sample_width = std::nullopt;
  std::uint64_t sample_seed = 0;
};

// Expected-payoff tree expansion: beliefs weight type tuples, types weight
// opponent actions, the transition kernel weights successor states, and the
// recursion maximises over our own replies. Beliefs along a hypothetical
// branch are updated with the branch's simulated actions, never the real
// future.
class Planner {
 public:
  explicit Planner(PlannerConfig cfg) : cfg_(cfg) {
    if (cfg_.mode == PlannerConfig::Mode::depth_limited && cfg_.horizon < 0)
      throw ModelError("planner horizon must be >= 0");
    if (cfg_.mode == PlannerConfig::Mode::discounted &&
        (cfg_.gamma < 0.0 || cfg_.gamma > 1.0))
      throw ModelError("discount factor must lie in [0, 1]");
  }

  const PlannerConfig& config() const { return cfg_; }

  std::vector<double> action_values(const Game& game, const BeliefState& belief,
                                    const History& h) const {
    Context ctx{game, cfg_.node_budget, 0};
    History scratch = h;
    BeliefState root = belief;
    std::vector<double> values(static_cast<std::size_t>(game.num_actions(cfg_.player)));
    int depth = cfg_.mode == PlannerConfig::Mode::depth_limited ? std::max(cfg_.horizon, 1)
                                                                : std::max(cfg_.max_depth, 1);
    for (int a = 0; a < game.num_actions(cfg_.player); ++a)
      values[static_cast<std::size_t>(a)] = expand_action(ctx, scratch, root, a, depth);
    return values;
  }

  double expected_payoff(const Game& game, const BeliefState& belief, const History& h,
                         int action) const {
    return action_values(game, belief, h).at(static_cast<std::size_t>(action));
  }

  std::vector<int> argmax_set(const std::vector<double>& values) const {
    double best = *std::max_element(values.begin(), values.end());
    std::vector<int> out;
    for (std::size_t a = 0; a < values.size(); ++a)
      if (values[a] >= best - cfg_.tie_tolerance) out.push_back(static_cast<int>(a));
    return out;
  }

  // Uniform distribution over the argmax set plus one action sampled from it.
  std::pair<int, std::vector<double>> choose_action(const Game& game, const BeliefState& belief,
                                                    const History& h, std::mt19937_64& rng) const {
    std::vector<double> values = action_values(game, belief, h);
    std::vector<int> best = argmax_set(values);
    std::vector<double> dist(values.size(), 0.0);
    for (int a : best) dist[static_cast<std::size_t>(a)] = 1.0 / static_cast<double>(best.size());
    return {sample_index(dist, rng), dist};
  }

 private:
  struct Context {
    const Game& game;
    long long budget;
    std::uint64_t draw_counter;
  };

  double continuation_factor() const {
    return cfg_.mode == PlannerConfig::Mode::discounted ? cfg_.gamma : 1.0;
  }

  double immediate_payoff(const Game& game, int state, const JointAction& a) const {
    return cfg_.task_completion ? 0.0 : game.payoff(cfg_.player, state, a);
  }

  // Value of a freshly-entered state with `depth` payoff terms remaining.
  double state_value(Context& ctx, History& h, const BeliefState& belief, int depth) const {
    int s = h.current_state();
    if (ctx.game.is_terminal(s)) return cfg_.task_completion ? 1.0 : 0.0;
    if (depth <= 0) return 0.0;
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < ctx.game.num_actions(cfg_.player); ++a)
      best = std::max(best, expand_action(ctx, h, belief, a, depth));
    return best;
  }

  double expand_action(Context& ctx, History& h, const BeliefState& belief, int own_action,
                       int depth) const {
    if (--ctx.budget < 0) throw BudgetExceededError("planner node budget exceeded");
    int s = h.current_state();
    const BeliefState& b = belief;

    // Belief-weighted joint opponent action distribution at this node.
    std::vector<std::vector<std::vector<double>>> type_probs(
        static_cast<std::size_t>(b.num_opponents()));
    for (int k = 0; k < b.num_opponents(); ++k) {
      type_probs[static_cast<std::size_t>(k)].resize(b.types(k).size());
      for (std::size_t m = 0; m < b.types(k).size(); ++m)
        type_probs[static_cast<std::size_t>(k)][m] =
            b.types(k)[m]->action_probabilities(ctx.game, h, b.opponents()[static_cast<std::size_t>(k)]);
    }

    std::vector<std::pair<JointAction, double>> joint_weights;
    std::vector<double> tuple_post = b.joint_posterior();
    std::size_t combos = 1;
    for (int k = 0; k < b.num_opponents(); ++k)
      combos *= static_cast<std::size_t>(ctx.game.num_actions(b.opponents()[static_cast<std::size_t>(k)]));
    for (std::size_t combo = 0; combo < combos; ++combo) {
      JointAction a(static_cast<std::size_t>(ctx.game.num_players()), 0);
      a[static_cast<std::size_t>(cfg_.player)] = own_action;
      std::size_t rest = combo;
      std::vector<int> opp_actions(static_cast<std::size_t>(b.num_opponents()));
      for (int k = b.num_opponents() - 1; k >= 0; --k) {
        int player = b.opponents()[static_cast<std::size_t>(k)];
        int na = ctx.game.num_actions(player);
        opp_actions[static_cast<std::size_t>(k)] = static_cast<int>(rest % static_cast<std::size_t>(na));
        rest /= static_cast<std::size_t>(na);
        a[static_cast<std::size_t>(player)] = opp_actions[static_cast<std::size_t>(k)];
      }
      double w = 0.0;
      for (std::size_t idx = 0; idx < tuple_post.size(); ++idx) {
        if (tuple_post[idx] == 0.0) continue;
        double p = tuple_post[idx];
        for (std::size_t k = 0; k < static_cast<std::size_t>(b.num_opponents()); ++k)
          p *= type_probs[k][b.tuple_component(idx, k)]
                         [static_cast<std::size_t>(opp_actions[k])];
        w += p;
      }
      if (w > 0.0) joint_weights.emplace_back(std::move(a), w);
    }

    if (cfg_.sample_width && static_cast<int>(joint_weights.size()) > *cfg_.sample_width) {
      joint_weights = sample_joint(ctx, joint_weights);
    }

    double value = 0.0;
    for (const auto& [a, w] : joint_weights) {
      double q = immediate_payoff(ctx.game, s, a);
      if (depth > 0) {
        BeliefState child = belief;
        child.update(ctx.game, h, a);
        double cont = 0.0;
        for (const auto& [next, p] : ctx.game.transitions(s, a)) {
          if (p == 0.0) continue;
          h.append(a, next);
          cont += p * state_value(ctx, h, child, depth - 1);
          h.pop();
        }
        q += continuation_factor() * cont;
      }
      value += w * q;
    }
    return value;
  }

  std::vector<std::pair<JointAction, double>> sample_joint(
      Context& ctx, const std::vector<std::pair<JointAction, double>>& weights) const {
    std::vector<double> probs;
    probs.reserve(weights.size());
    for (const auto& [a, w] : weights) probs.push_back(w);
    std::vector<std::pair<JointAction, double>> out;
    double share = 1.0 / static_cast<double>(*cfg_.sample_width);
    for (int n = 0; n < *cfg_.sample_width; ++n) {
      double u = hashed_uniform(cfg_.sample_seed, ctx.draw_counter++);
      double acc = 0.0;
      std::size_t pick = probs.size() - 1;
      for (std::size_t k = 0; k < probs.size(); ++k) {
        acc += probs[k];
        if (u < acc) {
          pick = k;
          break;
        }
      }
      out.emplace_back(weights[pick].first, share);
    }
    return out;
  }

  PlannerConfig cfg_;
};

enum class DegeneracyPolicy { reset_to_prior, keep_prior_readout };

// One planning decision, kept when the decision log is enabled: the
// per-action values, the tied argmax set, and the belief snapshot that
// produced them.
struct DecisionRecord {
  int t = 0;
  std::vector<double> values;
  std::vector<int> argmax;
  std::vector<std::vector<double>> posterior;  // per opponent
};

// Planning agent: maintains a belief state over hypothesised opponent types
// and plays a uniform draw from the argmax of the expected-payoff expansion.
class PlanningAgent final : public ActionSource {
 public:
  PlanningAgent(PlannerConfig cfg, BeliefState belief,
                DegeneracyPolicy policy = DegeneracyPolicy::reset_to_prior)
      : planner_(cfg), belief_(std::move(belief)), policy_(policy) {}

  std::vector<double> distribution(const Game& game, const History& h, int player) override {
    if (player != planner_.config().player) throw ModelError("agent bound to a different player");
    auto values = planner_.action_values(game, belief_, h);
    auto best = planner_.argmax_set(values);
    std::vector<double> dist(values.size(), 0.0);
    for (int a : best) dist[static_cast<std::size_t>(a)] = 1.0 / static_cast<double>(best.size());
    if (log_decisions_) {
      DecisionRecord record;
      record.t = h.length();
      record.values = values;
      record.argmax = best;
      for (int k = 0; k < belief_.num_opponents(); ++k) record.posterior.push_back(belief_.posterior(k));
      decision_log_.push_back(std::move(record));
    }
    last_values_ = std::move(values);
    return dist;
  }

  void observe(const Game& game, const History& before, const JointAction& a) override {
    belief_.update(game, before, a);
    if (belief_.degenerate() && policy_ == DegeneracyPolicy::reset_to_prior) {
      belief_.reset_to_prior();
      ++degeneracy_resets_;
    }
  }

  const BeliefState& belief() const { return belief_; }
  BeliefState& belief() { return belief_; }
  int degeneracy_resets() const { return degeneracy_resets_; }
  const std::vector<double>& last_values() const { return last_values_; }

  void enable_decision_log() { log_decisions_ = true; }
  const std::vector<DecisionRecord>& decision_log() const { return decision_log_; }

 private:
  Planner planner_;
  BeliefState belief_;
  DegeneracyPolicy policy_;
  int degeneracy_resets_ = 0;
  std::vector<double> last_values_;
  bool log_decisions_ = false;
  std::vector<DecisionRecord> decision_log_;
};

}  // namespace sbg

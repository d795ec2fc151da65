// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "sbg/behaviour.hpp"
#include "sbg/game.hpp"

namespace sbg {

enum class BeliefMode { product, sum, correlated };

// Posterior belief over hypothesised opponent types. Three likelihood
// accumulations are supported:
//   product    — running product of per-step action probabilities (kept in
//                log space so long interactions do not underflow),
//   sum        — running sum of per-step action probabilities,
//   correlated — per type-tuple running sum of per-step probability products.
// A posterior whose normaliser is zero is reported via degenerate(); the
// fallback policy belongs to the caller.
class BeliefState {
 public:
  BeliefState(BeliefMode mode, std::vector<int> opponents,
              std::vector<std::vector<BehaviourPtr>> type_sets,
              std::vector<std::vector<double>> priors,
              std::optional<std::vector<double>> joint_prior = std::nullopt)
      : mode_(mode),
        opponents_(std::move(opponents)),
        types_(std::move(type_sets)),
        priors_(std::move(priors)) {
    if (types_.size() != opponents_.size() || priors_.size() != opponents_.size())
      throw ModelError("belief: opponents/types/priors arity mismatch");
    for (std::size_t k = 0; k < types_.size(); ++k) {
      if (types_[k].empty()) throw ModelError("belief: empty hypothesised type set");
      if (priors_[k].size() != types_[k].size())
        throw ModelError("belief: prior length mismatch");
      check_distribution(priors_[k]);
    }
    if (mode_ == BeliefMode::correlated) {
      std::size_t tuples = 1;
      for (const auto& ts : types_) tuples *= ts.size();
      if (joint_prior) {
        if (joint_prior->size() != tuples) throw ModelError("belief: joint prior length mismatch");
        check_distribution(*joint_prior);
        tuple_prior_ = *joint_prior;
      } else {
        // Default joint prior: product of the per-player priors.
        tuple_prior_.assign(tuples, 1.0);
        for (std::size_t idx = 0; idx < tuples; ++idx) {
          std::size_t rest = idx;
          for (std::size_t k = types_.size(); k-- > 0;) {
            std::size_t which = rest % types_[k].size();
            rest /= types_[k].size();
            tuple_prior_[idx] *= priors_[k][which];
          }
        }
      }
      tuple_acc_.assign(tuples, 0.0);
    } else {
      acc_.resize(types_.size());
      for (std::size_t k = 0; k < types_.size(); ++k)
        acc_[k].assign(types_[k].size(), 0.0);  // log 1 for product, 0 for sum
    }
  }

  BeliefMode mode() const { return mode_; }
  int time() const { return t_; }
  const std::vector<int>& opponents() const { return opponents_; }
  int num_opponents() const { return static_cast<int>(opponents_.size()); }
  const std::vector<BehaviourPtr>& types(int k) const {
    return types_.at(static_cast<std::size_t>(k));
  }
  const std::vector<double>& prior(int k) const { return priors_.at(static_cast<std::size_t>(k)); }

  // Raw likelihood accumulators: log-scale running products in product mode,
  // running sums otherwise.
  const std::vector<double>& accumulator(int k) const {
    return acc_.at(static_cast<std::size_t>(k));
  }
  const std::vector<double>& tuple_accumulator() const { return tuple_acc_; }

  // Incorporates one observed joint action taken after history prefix.
  void update(const Game& game, const History& prefix, const JointAction& a) {
    std::vector<std::vector<double>> step_probs(types_.size());
    for (std::size_t k = 0; k < types_.size(); ++k) {
      int player = opponents_[k];
      int observed = a.at(static_cast<std::size_t>(player));
      step_probs[k].resize(types_[k].size());
      for (std::size_t m = 0; m < types_[k].size(); ++m) {
        std::vector<double> p = types_[k][m]->action_probabilities(game, prefix, player);
        step_probs[k][m] = p.at(static_cast<std::size_t>(observed));
      }
    }
    if (mode_ == BeliefMode::correlated) {
      // Per-step probabilities are computed once per (player, type) and
      // reused across tuples.
      for (std::size_t idx = 0; idx < tuple_acc_.size(); ++idx) {
        double product = 1.0;
        std::size_t rest = idx;
        for (std::size_t k = types_.size(); k-- > 0;) {
          product *= step_probs[k][rest % types_[k].size()];
          rest /= types_[k].size();
        }
        tuple_acc_[idx] += product;
      }
    } else if (mode_ == BeliefMode::product) {
      for (std::size_t k = 0; k < types_.size(); ++k)
        for (std::size_t m = 0; m < types_[k].size(); ++m)
          acc_[k][m] += step_probs[k][m] > 0.0 ? std::log(step_probs[k][m])
                                               : -std::numeric_limits<double>::infinity();
    } else {
      for (std::size_t k = 0; k < types_.size(); ++k)
        for (std::size_t m = 0; m < types_[k].size(); ++m) acc_[k][m] += step_probs[k][m];
    }
    ++t_;
  }

  bool degenerate() const {
    if (t_ == 0) return false;
    if (mode_ == BeliefMode::correlated) {
      double total = 0.0;
      for (std::size_t i = 0; i < tuple_acc_.size(); ++i) total += tuple_acc_[i] * tuple_prior_[i];
      return total <= 0.0;
    }
    for (std::size_t k = 0; k < types_.size(); ++k)
      if (normaliser(k) <= 0.0) return true;
    return false;
  }

  // Posterior over opponent k's types; equals the prior at t = 0 and when
  // the normaliser has collapsed to zero.
  std::vector<double> posterior(int k) const {
    std::size_t kk = static_cast<std::size_t>(k);
    if (mode_ == BeliefMode::correlated) {
      std::vector<double> joint = joint_posterior();
      std::vector<double> out(types_[kk].size(), 0.0);
      for (std::size_t idx = 0; idx < joint.size(); ++idx)
        out[tuple_component(idx, kk)] += joint[idx];
      return out;
    }
    std::vector<double> weights(types_[kk].size());
    if (mode_ == BeliefMode::product) {
      double top = -std::numeric_limits<double>::infinity();
      for (double v : acc_[kk]) top = std::max(top, v);
      if (!std::isfinite(top)) return priors_[kk];
      double total = 0.0;
      for (std::size_t m = 0; m < weights.size(); ++m) {
        weights[m] = std::exp(acc_[kk][m] - top) * priors_[kk][m];
        total += weights[m];
      }
      if (total <= 0.0) return priors_[kk];
      for (double& w : weights) w /= total;
      return weights;
    }
    double total = normaliser(kk);
    if (t_ == 0 || total <= 0.0) return priors_[kk];
    for (std::size_t m = 0; m < weights.size(); ++m)
      weights[m] = acc_[kk][m] * priors_[kk][m] / total;
    return weights;
  }

  // Posterior over joint type tuples (indexing: first opponent varies
  // slowest). In independent modes this is the product of marginals.
  std::vector<double> joint_posterior() const {
    if (mode_ == BeliefMode::correlated) {
      std::vector<double> out(tuple_acc_.size());
      double total = 0.0;
      for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = (t_ == 0 ? 1.0 : tuple_acc_[i]) * tuple_prior_[i];
        total += out[i];
      }
      if (total <= 0.0) return tuple_prior_;
      for (double& v : out) v /= total;
      return out;
    }
    std::vector<std::vector<double>> marg(types_.size());
    std::size_t tuples = 1;
    for (std::size_t k = 0; k < types_.size(); ++k) {
      marg[k] = posterior(static_cast<int>(k));
      tuples *= marg[k].size();
    }
    std::vector<double> out(tuples, 1.0);
    for (std::size_t idx = 0; idx < tuples; ++idx)
      for (std::size_t k = 0; k < types_.size(); ++k)
        out[idx] *= marg[k][tuple_component(idx, k)];
    return out;
  }

  // Belief-weighted one-step prediction of opponent k's actions.
  std::vector<double> predictive(const Game& game, const History& h, int k) const {
    std::size_t kk = static_cast<std::size_t>(k);
    std::vector<double> post = posterior(k);
    std::vector<double> out(static_cast<std::size_t>(game.num_actions(opponents_[kk])), 0.0);
    for (std::size_t m = 0; m < types_[kk].size(); ++m) {
      if (post[m] == 0.0) continue;
      std::vector<double> p = types_[kk][m]->action_probabilities(game, h, opponents_[kk]);
      for (std::size_t a = 0; a < out.size(); ++a) out[a] += post[m] * p[a];
    }
    return out;
  }

  void reset_to_prior() {
    t_ = 0;
    for (auto& block : acc_) std::fill(block.begin(), block.end(), 0.0);
    std::fill(tuple_acc_.begin(), tuple_acc_.end(), 0.0);
  }

  std::size_t tuple_component(std::size_t tuple_index, std::size_t k) const {
    std::size_t rest = tuple_index;
    std::size_t which = 0;
    for (std::size_t j = types_.size(); j-- > 0;) {
      if (j == k) which = rest % types_[j].size();
      rest /= types_[j].size();
    }
    return which;
  }

 private:
  double normaliser(std::size_t k) const {
    double total = 0.0;
    for (std::size_t m = 0; m < acc_[k].size(); ++m) {
      double likelihood = mode_ == BeliefMode::product ? std::exp(acc_[k][m]) : acc_[k][m];
      total += likelihood * priors_[k][m];
    }
    return total;
  }

  BeliefMode mode_;
  std::vector<int> opponents_;
  std::vector<std::vector<BehaviourPtr>> types_;
  std::vector<std::vector<double>> priors_;
  std::vector<std::vector<double>> acc_;
  std::vector<double> tuple_prior_;
  std::vector<double> tuple_acc_;
  int t_ = 0;
};

// Average overlap of player j's hypothesised types over the history: the
// mean predicted probability of the observed action across types, counted
// only at steps where two or more types supported that action.
inline double average_overlap(const Game& game, const History& h,
                              const std::vector<BehaviourPtr>& types, int player) {
  int t = h.length();
  if (t < 1) throw ModelError("average_overlap needs t >= 1");
  double total = 0.0;
  for (int tau = 0; tau < t; ++tau) {
    History prefix = h.prefix(tau);
    int observed = h.action_at(tau).at(static_cast<std::size_t>(player));
    int supporters = 0;
    double mass = 0.0;
    for (const auto& type : types) {
      double p = type->action_probabilities(game, prefix, player)
                     .at(static_cast<std::size_t>(observed));
      if (p > 0.0) ++supporters;
      mass += p;
    }
    if (supporters >= 2) total += mass / static_cast<double>(types.size());
  }
  return total / static_cast<double>(t);
}

// Average stochasticity: how far the types are from deterministic play,
// normalised so uniform play scores 1. Modal-action ties resolve to the
// lowest index; the value only depends on the modal probability.
inline double average_stochasticity(const Game& game, const History& h,
                                    const std::vector<BehaviourPtr>& types, int player) {
  int t = h.length();
  if (t < 1) throw ModelError("average_stochasticity needs t >= 1");
  double denom = 1.0 - 1.0 / static_cast<double>(game.num_actions(player));
  if (denom <= 0.0) return 0.0;
  double total = 0.0;
  for (int tau = 0; tau < t; ++tau) {
    History prefix = h.prefix(tau);
    double per_type = 0.0;
    for (const auto& type : types) {
      std::vector<double> p = type->action_probabilities(game, prefix, player);
      double modal = *std::max_element(p.begin(), p.end());
      per_type += (1.0 - modal) / denom;
    }
    total += per_type / static_cast<double>(types.size());
  }
  return total / static_cast<double>(t);
}

}  // namespace sbg

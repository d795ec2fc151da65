// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "sbg/game.hpp"
#include "sbg/history.hpp"
#include "sbg/rng.hpp"

namespace sbg {

// A behaviour (a player "type") is a pure mapping from the interaction
// history to a probability distribution over that player's actions. Purity —
// the same history always yields the same vector — is what lets the planner
// evaluate hypothetical futures and the hypothesis tester resample
// counterfactual actions.
class Behaviour {
 public:
  virtual ~Behaviour() = default;
  virtual const std::string& id() const = 0;
  virtual std::vector<double> action_probabilities(const Game& game, const History& h,
                                                   int player) const = 0;
};

using BehaviourPtr = std::shared_ptr<const Behaviour>;

inline void check_distribution(const std::vector<double>& probs) {
  double total = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw ModelError("negative probability in action distribution");
    total += p;
  }
  if (std::abs(total - 1.0) > kDistributionTolerance)
    throw ModelError("action distribution does not sum to 1");
}

// Fixed action distribution, independent of the history.
class ConstantBehaviour final : public Behaviour {
 public:
  ConstantBehaviour(std::string id, std::vector<double> probs)
      : id_(std::move(id)), probs_(std::move(probs)) {
    check_distribution(probs_);
  }

  const std::string& id() const override { return id_; }
  std::vector<double> action_probabilities(const Game&, const History&, int) const override {
    return probs_;
  }
  const std::vector<double>& probabilities() const { return probs_; }

 private:
  std::string id_;
  std::vector<double> probs_;
};

inline BehaviourPtr always_action(std::string id, int action, int num_actions) {
  std::vector<double> p(static_cast<std::size_t>(num_actions), 0.0);
  p.at(static_cast<std::size_t>(action)) = 1.0;
  return std::make_shared<ConstantBehaviour>(std::move(id), std::move(p));
}

// Deterministic cycle indexed by the history length: seq[t mod |seq|].
class CycleBehaviour final : public Behaviour {
 public:
  CycleBehaviour(std::string id, std::vector<int> sequence)
      : id_(std::move(id)), sequence_(std::move(sequence)) {
    if (sequence_.empty()) throw ModelError("cycle behaviour needs a non-empty sequence");
  }

  const std::string& id() const override { return id_; }
  std::vector<double> action_probabilities(const Game& game, const History& h,
                                           int player) const override {
    std::vector<double> p(static_cast<std::size_t>(game.num_actions(player)), 0.0);
    int a = sequence_[static_cast<std::size_t>(h.length()) % sequence_.size()];
    p.at(static_cast<std::size_t>(a)) = 1.0;
    return p;
  }
  const std::vector<int>& sequence() const { return sequence_; }

 private:
  std::string id_;
  std::vector<int> sequence_;
};

// Memoryless alternator: plays first_action when no action has been taken
// yet, afterwards cycles to the next action after its own previous one. On
// real histories this matches the corresponding deterministic cycle, but it
// only reads the last joint action, which chain builders rely on.
class AlternatingBehaviour final : public Behaviour {
 public:
  AlternatingBehaviour(std::string id, int first_action) : id_(std::move(id)), first_(first_action) {}

  const std::string& id() const override { return id_; }
  std::vector<double> action_probabilities(const Game& game, const History& h,
                                           int player) const override {
    int n = game.num_actions(player);
    std::vector<double> p(static_cast<std::size_t>(n), 0.0);
    int a = first_;
    if (h.length() > 0) a = (h.action_at(h.length() - 1).at(static_cast<std::size_t>(player)) + 1) % n;
    p.at(static_cast<std::size_t>(a)) = 1.0;
    return p;
  }

 private:
  std::string id_;
  int first_;
};

// A fresh normalised uniform draw at every time step, derived from
// (behaviour seed, t) so the mapping stays pure. The full action set is
// always in the support.
class RandomBehaviour final : public Behaviour {
 public:
  RandomBehaviour(std::string id, std::uint64_t seed) : id_(std::move(id)), seed_(seed) {}

  const std::string& id() const override { return id_; }
  std::vector<double> action_probabilities(const Game& game, const History& h,
                                           int player) const override {
    int n = game.num_actions(player);
    std::vector<double> p(static_cast<std::size_t>(n));
    double total = 0.0;
    for (int a = 0; a < n; ++a) {
      double u = hashed_uniform(seed_, hash_combine(static_cast<std::uint64_t>(h.length()),
                                                    static_cast<std::uint64_t>(a)));
      // Avoids an exact zero so the support is complete.
      p[static_cast<std::size_t>(a)] = u + 1e-12;
      total += p[static_cast<std::size_t>(a)];
    }
    for (double& v : p) v /= total;
    return p;
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::string id_;
  std::uint64_t seed_;
};

inline BehaviourPtr random_behaviour(int num_actions, std::uint64_t seed) {
  if (num_actions < 2) throw ModelError("random behaviour needs at least two actions");
  return std::make_shared<RandomBehaviour>("random-" + std::to_string(seed), seed);
}

using WeightSource = std::function<std::vector<double>(const Game&, const History&)>;

// Convex combination of component behaviours under history-dependent
// weights; equivalent to sampling one component per step with those weights.
class MixtureBehaviour final : public Behaviour {
 public:
  MixtureBehaviour(std::string id, std::vector<BehaviourPtr> types, WeightSource weights)
      : id_(std::move(id)), types_(std::move(types)), weights_(std::move(weights)) {
    if (types_.empty()) throw ModelError("mixture needs at least one component");
  }

  const std::string& id() const override { return id_; }
  std::vector<double> action_probabilities(const Game& game, const History& h,
                                           int player) const override {
    std::vector<double> w = weights_(game, h);
    if (w.size() != types_.size()) throw ModelError("mixture weight/type length mismatch");
    check_distribution(w);
    std::vector<double> out(static_cast<std::size_t>(game.num_actions(player)), 0.0);
    for (std::size_t k = 0; k < types_.size(); ++k) {
      if (w[k] == 0.0) continue;
      std::vector<double> p = types_[k]->action_probabilities(game, h, player);
      for (std::size_t a = 0; a < out.size(); ++a) out[a] += w[k] * p[a];
    }
    return out;
  }

 private:
  std::string id_;
  std::vector<BehaviourPtr> types_;
  WeightSource weights_;
};

enum class TypeDistributionKind { pure, mixed, correlated, independent_product };

// Distribution over joint type assignments for a fixed list of players.
class TypeDistribution {
 public:
  TypeDistribution(std::vector<int> players, std::vector<std::vector<BehaviourPtr>> support,
                   std::vector<double> probs, TypeDistributionKind kind)
      : players_(std::move(players)),
        support_(std::move(support)),
        probs_(std::move(probs)),
        kind_(kind) {
    if (support_.empty()) throw ModelError("type distribution has empty support");
    if (support_.size() != probs_.size()) throw ModelError("support/probability length mismatch");
    for (const auto& tuple : support_)
      if (tuple.size() != players_.size()) throw ModelError("type tuple arity mismatch");
    check_distribution(probs_);
    bool has_unit = false;
    for (double p : probs_) has_unit = has_unit || std::abs(p - 1.0) <= kDistributionTolerance;
    if (kind_ == TypeDistributionKind::pure && !has_unit)
      throw ModelError("pure type distribution needs a probability-1 tuple");
    if (kind_ != TypeDistributionKind::pure && has_unit && probs_.size() > 1 &&
        kind_ != TypeDistributionKind::independent_product && kind_ != TypeDistributionKind::correlated)
      kind_ = TypeDistributionKind::pure;
    if (kind_ == TypeDistributionKind::independent_product) check_factorises();
  }

  static TypeDistribution pure(std::vector<int> players, std::vector<BehaviourPtr> tuple) {
    return TypeDistribution(std::move(players), {std::move(tuple)}, {1.0},
                            TypeDistributionKind::pure);
  }

  const std::vector<int>& players() const { return players_; }
  const std::vector<std::vector<BehaviourPtr>>& support() const { return support_; }
  const std::vector<double>& probabilities() const { return probs_; }
  TypeDistributionKind kind() const { return kind_; }

  const std::vector<BehaviourPtr>& sample(std::mt19937_64& rng) const {
    return support_[static_cast<std::size_t>(sample_index(probs_, rng))];
  }

 private:
  void check_factorises() const {
    // Marginal per (player, behaviour id), then compare the product against
    // the declared joint probabilities.
    for (std::size_t k = 0; k < support_.size(); ++k) {
      double product = 1.0;
      for (std::size_t j = 0; j < players_.size(); ++j) {
        double marginal = 0.0;
        for (std::size_t m = 0; m < support_.size(); ++m)
          if (support_[m][j]->id() == support_[k][j]->id()) marginal += probs_[m];
        product *= marginal;
      }
      if (std::abs(product - probs_[k]) > 1e-9)
        throw ModelError("type distribution does not factorise into per-player marginals");
    }
  }

  std::vector<int> players_;
  std::vector<std::vector<BehaviourPtr>> support_;
  std::vector<double> probs_;
  TypeDistributionKind kind_;
};

inline const std::vector<BehaviourPtr>& sample_types(const TypeDistribution& dist,
                                                     std::mt19937_64& rng) {
  return dist.sample(rng);
}

}  // namespace sbg

// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "sbg/behaviour.hpp"
#include "sbg/evolve.hpp"
#include "sbg/game.hpp"

namespace sbg {

inline constexpr int kNetInputs = 4;   // previous two actions of both players
inline constexpr int kNetHidden = 5;
inline constexpr int kNetGenomeSize = kNetInputs * kNetHidden + kNetHidden + kNetHidden + 1;

// Fully connected 4-5-1 network with sigmoidal thresholds. Inputs are the
// two previous actions of both players (0.5 before they exist); the output
// node gives the probability of the first action.
struct NeuralNet {
  std::vector<double> weights;  // ih[5][4], hidden bias[5], ho[5], out bias

  static NeuralNet from_genome(std::vector<double> genome) {
    if (static_cast<int>(genome.size()) != kNetGenomeSize)
      throw ModelError("neural net genome size mismatch");
    return NeuralNet{std::move(genome)};
  }
  const std::vector<double>& to_genome() const { return weights; }

  static double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

  double forward(const std::array<double, kNetInputs>& in) const {
    double out_acc = weights[kNetInputs * kNetHidden + kNetHidden + kNetHidden];
    for (int hidden = 0; hidden < kNetHidden; ++hidden) {
      double acc = weights[kNetInputs * kNetHidden + hidden];
      for (int i = 0; i < kNetInputs; ++i)
        acc += weights[hidden * kNetInputs + i] * in[static_cast<std::size_t>(i)];
      out_acc += weights[kNetInputs * kNetHidden + kNetHidden + hidden] * sigmoid(acc);
    }
    return sigmoid(out_acc);
  }
};

class NeuralNetBehaviour final : public Behaviour {
 public:
  NeuralNetBehaviour(std::string id, NeuralNet net) : id_(std::move(id)), net_(std::move(net)) {}

  const std::string& id() const override { return id_; }

  std::vector<double> action_probabilities(const Game& game, const History& h,
                                           int player) const override {
    if (game.num_actions(player) != 2) throw ModelError("neural net type expects 2 actions");
    int other = 1 - player;
    int t = h.length();
    auto encode = [&](int back, int who) -> double {
      if (t < back) return 0.5;
      return static_cast<double>(h.action_at(t - back).at(static_cast<std::size_t>(who)));
    };
    std::array<double, kNetInputs> in = {encode(1, player), encode(1, other), encode(2, player),
                                         encode(2, other)};
    double p_first = net_.forward(in);
    return {p_first, 1.0 - p_first};
  }

  const NeuralNet& net() const { return net_; }

 private:
  std::string id_;
  NeuralNet net_;
};

struct NeuralNetOps {
  using Genome = std::vector<double>;

  const std::string& name() const {
    static const std::string n = "cnn";
    return n;
  }

  Genome random(std::mt19937_64& rng) const {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Genome g(static_cast<std::size_t>(kNetGenomeSize));
    for (double& w : g) w = gauss(rng);
    return g;
  }

  Genome crossover(const Genome& a, const Genome& b, std::mt19937_64& rng) const {
    Genome out = a;
    std::size_t cut = rng() % out.size();
    for (std::size_t k = cut; k < out.size(); ++k) out[k] = b[k];
    return out;
  }

  Genome mutate(Genome g, std::mt19937_64& rng) const {
    std::normal_distribution<double> gauss(0.0, 0.5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    bool touched = false;
    for (double& w : g) {
      if (unit(rng) < 2.0 / static_cast<double>(g.size())) {
        w += gauss(rng);
        touched = true;
      }
    }
    if (!touched) g[rng() % g.size()] += gauss(rng);
    return g;
  }

  BehaviourPtr make(const Genome& g, const std::string& id) const {
    return std::make_shared<NeuralNetBehaviour>(id, NeuralNet::from_genome(g));
  }
};

inline EvolvedPool evolve_cnn_pool(const Game& game, const EvoParams& params, const RngStream& root,
                                   int player = 1, int unique_count = 0) {
  if (game.num_actions(player) != 2) throw ModelError("neural-net evolution expects 2 actions");
  return co_evolve(game, params, root, NeuralNetOps{}, player, unique_count);
}

}  // namespace sbg

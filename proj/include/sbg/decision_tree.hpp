// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <string>
#include <vector>

#include "sbg/behaviour.hpp"
#include "sbg/evolve.hpp"
#include "sbg/game.hpp"

namespace sbg {

inline constexpr int kTreeMemory = 3;  // tested lags of the other player

// Binary decision tree over the other player's past actions. Internal nodes
// test one lag (lags are distinct along any path, depth <= kTreeMemory);
// leaves name the action to play. Histories too short for a tested lag fall
// back to the declared default action.
struct DecisionTree {
  struct Node {
    int lag = 0;      // 0 marks a leaf
    int action = 0;   // leaf payload
    int child[2] = {-1, -1};
  };
  std::vector<Node> nodes;
  int root = 0;
  int default_action = 0;

  int decide(const History& h, int other_player) const {
    int idx = root;
    int t = h.length();
    while (true) {
      const Node& node = nodes.at(static_cast<std::size_t>(idx));
      if (node.lag == 0) return node.action;
      if (t < node.lag) return default_action;
      int observed = h.action_at(t - node.lag).at(static_cast<std::size_t>(other_player));
      idx = node.child[observed == 0 ? 0 : 1];
    }
  }
};

class DecisionTreeBehaviour final : public Behaviour {
 public:
  DecisionTreeBehaviour(std::string id, DecisionTree tree) : id_(std::move(id)), tree_(std::move(tree)) {}

  const std::string& id() const override { return id_; }
  std::vector<double> action_probabilities(const Game& game, const History& h,
                                           int player) const override {
    std::vector<double> p(static_cast<std::size_t>(game.num_actions(player)), 0.0);
    p.at(static_cast<std::size_t>(tree_.decide(h, 1 - player))) = 1.0;
    return p;
  }

  const DecisionTree& tree() const { return tree_; }

 private:
  std::string id_;
  DecisionTree tree_;
};

struct DecisionTreeOps {
  using Genome = DecisionTree;
  int num_actions = 2;

  const std::string& name() const {
    static const std::string n = "cdt";
    return n;
  }

  Genome random(std::mt19937_64& rng) const {
    Genome g;
    g.default_action = static_cast<int>(rng() % static_cast<std::uint64_t>(num_actions));
    std::vector<int> lags = {1, 2, 3};
    g.root = grow(g, rng, lags, 0);
    return g;
  }

  Genome crossover(const Genome& a, const Genome& b, std::mt19937_64& rng) const {
    // Graft a random subtree of b onto a random position of a, then repair
    // the lag/depth invariants.
    Genome out = a;
    int target = static_cast<int>(rng() % out.nodes.size());
    int source = static_cast<int>(rng() % b.nodes.size());
    int copied = copy_subtree(out, b, source);
    out.nodes[static_cast<std::size_t>(target)] = out.nodes[static_cast<std::size_t>(copied)];
    repair(out);
    return out;
  }

  Genome mutate(Genome g, std::mt19937_64& rng) const {
    std::size_t idx = rng() % g.nodes.size();
    bool is_leaf = g.nodes[idx].lag == 0;
    if (is_leaf) {
      if (rng() % 2 == 0) {
        g.nodes[idx].action = static_cast<int>(rng() % static_cast<std::uint64_t>(num_actions));
      } else {
        int lag = 1 + static_cast<int>(rng() % kTreeMemory);
        int first = static_cast<int>(g.nodes.size());
        for (int c = 0; c < 2; ++c) {
          DecisionTree::Node leaf;
          leaf.action = static_cast<int>(rng() % static_cast<std::uint64_t>(num_actions));
          g.nodes.push_back(leaf);
        }
        g.nodes[idx].lag = lag;
        g.nodes[idx].child[0] = first;
        g.nodes[idx].child[1] = first + 1;
      }
    } else {
      if (rng() % 2 == 0) {
        g.nodes[idx].lag = 1 + static_cast<int>(rng() % kTreeMemory);
      } else {
        g.nodes[idx].lag = 0;
        g.nodes[idx].action = static_cast<int>(rng() % static_cast<std::uint64_t>(num_actions));
        g.nodes[idx].child[0] = g.nodes[idx].child[1] = -1;
      }
    }
    if (rng() % 4 == 0) g.default_action = static_cast<int>(rng() % static_cast<std::uint64_t>(num_actions));
    repair(g);
    return g;
  }

  BehaviourPtr make(const Genome& g, const std::string& id) const {
    return std::make_shared<DecisionTreeBehaviour>(id, g);
  }

 private:
  int grow(Genome& g, std::mt19937_64& rng, std::vector<int> available, int depth) const {
    bool leaf = available.empty() || depth >= kTreeMemory || rng() % 3 == 0;
    DecisionTree::Node node;
    if (leaf) {
      node.action = static_cast<int>(rng() % static_cast<std::uint64_t>(num_actions));
      g.nodes.push_back(node);
      return static_cast<int>(g.nodes.size()) - 1;
    }
    std::size_t pick = rng() % available.size();
    node.lag = available[pick];
    available.erase(available.begin() + static_cast<std::ptrdiff_t>(pick));
    g.nodes.push_back(node);
    int idx = static_cast<int>(g.nodes.size()) - 1;
    for (int c = 0; c < 2; ++c) {
      int child = grow(g, rng, available, depth + 1);
      g.nodes[static_cast<std::size_t>(idx)].child[c] = child;
    }
    return idx;
  }

  int copy_subtree(Genome& into, const Genome& from, int idx) const {
    const DecisionTree::Node& node = from.nodes.at(static_cast<std::size_t>(idx));
    DecisionTree::Node copy = node;
    if (node.lag != 0)
      for (int c = 0; c < 2; ++c) copy.child[c] = copy_subtree(into, from, node.child[c]);
    into.nodes.push_back(copy);
    return static_cast<int>(into.nodes.size()) - 1;
  }

  // Enforces distinct lags along each path and depth <= kTreeMemory by
  // collapsing offending nodes into leaves, then drops unreachable nodes.
  void repair(Genome& g) const {
    Genome clean;
    clean.default_action = g.default_action;
    clean.root = repair_walk(clean, g, g.root, 0, 0);
    g = clean;
  }

  int repair_walk(Genome& into, const Genome& from, int idx, unsigned used_lags, int depth) const {
    const DecisionTree::Node& node = from.nodes.at(static_cast<std::size_t>(idx));
    DecisionTree::Node out = node;
    bool lag_clash = node.lag != 0 && (used_lags & (1u << node.lag)) != 0;
    if (node.lag != 0 && (depth >= kTreeMemory || lag_clash)) {
      out.lag = 0;
      out.action = first_leaf_action(from, idx);
      out.child[0] = out.child[1] = -1;
    }
    if (out.lag != 0) {
      into.nodes.push_back(out);
      int where = static_cast<int>(into.nodes.size()) - 1;
      for (int c = 0; c < 2; ++c) {
        int child = repair_walk(into, from, node.child[c], used_lags | (1u << node.lag), depth + 1);
        into.nodes[static_cast<std::size_t>(where)].child[c] = child;
      }
      return where;
    }
    into.nodes.push_back(out);
    return static_cast<int>(into.nodes.size()) - 1;
  }

  int first_leaf_action(const Genome& g, int idx) const {
    const DecisionTree::Node& node = g.nodes.at(static_cast<std::size_t>(idx));
    if (node.lag == 0) return node.action;
    return first_leaf_action(g, node.child[0]);
  }
};

inline EvolvedPool evolve_cdt_pool(const Game& game, const EvoParams& params, const RngStream& root,
                                   int player = 1, int unique_count = 0) {
  DecisionTreeOps ops;
  ops.num_actions = game.num_actions(player);
  if (ops.num_actions != 2) throw ModelError("decision-tree evolution expects 2 actions");
  return co_evolve(game, params, root, ops, player, unique_count);
}

}  // namespace sbg

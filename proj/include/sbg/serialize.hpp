// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <fstream>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "sbg/behaviour.hpp"
#include "sbg/bisim.hpp"
#include "sbg/decision_tree.hpp"
#include "sbg/fictitious_play.hpp"
#include "sbg/game.hpp"
#include "sbg/lft.hpp"
#include "sbg/neural_net.hpp"

namespace sbg {

inline constexpr const char* kGameSchema = "sbg-game/1";
inline constexpr const char* kPoolSchema = "sbg-pool/1";
inline constexpr const char* kChainSchema = "sbg-chain/1";

inline nlohmann::json game_to_json(const Game& g) {
  nlohmann::json doc;
  doc["schema"] = kGameSchema;
  doc["num_states"] = g.num_states();
  doc["initial_state"] = g.initial_state();
  nlohmann::json terminals = nlohmann::json::array();
  for (int s = 0; s < g.num_states(); ++s)
    if (g.is_terminal(s)) terminals.push_back(s);
  doc["terminal_states"] = std::move(terminals);
  nlohmann::json actions = nlohmann::json::array();
  for (int i = 0; i < g.num_players(); ++i) actions.push_back(g.num_actions(i));
  doc["actions"] = std::move(actions);

  nlohmann::json transitions = nlohmann::json::array();
  nlohmann::json payoffs = nlohmann::json::array();
  for (int s = 0; s < g.num_states(); ++s) {
    if (g.is_terminal(s)) continue;
    for (int j = 0; j < g.num_joint_actions(); ++j) {
      JointAction a = g.joint_from_index(j);
      nlohmann::json row = nlohmann::json::array();
      for (const auto& [next, p] : g.transitions(s, a)) row.push_back({next, p});
      transitions.push_back({{"state", s}, {"action", a}, {"next", std::move(row)}});
      for (int i = 0; i < g.num_players(); ++i) {
        double u = g.payoff(i, s, a);
        if (u != 0.0)
          payoffs.push_back({{"player", i}, {"state", s}, {"action", a}, {"value", u}});
      }
    }
  }
  doc["transitions"] = std::move(transitions);
  doc["payoffs"] = std::move(payoffs);
  return doc;
}

inline Game game_from_json(const nlohmann::json& doc) {
  if (doc.value("schema", "") != kGameSchema) throw ModelError("unexpected game schema");
  std::vector<int> terminals = doc.at("terminal_states").get<std::vector<int>>();
  Game g(doc.at("num_states").get<int>(), doc.at("initial_state").get<int>(), terminals,
         doc.at("actions").get<std::vector<int>>());
  for (const auto& t : doc.at("transitions")) {
    JointAction a = t.at("action").get<JointAction>();
    std::vector<std::pair<int, double>> row;
    for (const auto& entry : t.at("next"))
      row.emplace_back(entry.at(0).get<int>(), entry.at(1).get<double>());
    g.set_transition(t.at("state").get<int>(), a, std::move(row));
  }
  for (const auto& p : doc.at("payoffs"))
    g.set_payoff(p.at("player").get<int>(), p.at("state").get<int>(),
                 p.at("action").get<JointAction>(), p.at("value").get<double>());
  g.finalize();
  return g;
}

namespace detail_serialize {

inline nlohmann::json tree_node_to_json(const DecisionTree& tree, int idx) {
  const DecisionTree::Node& node = tree.nodes.at(static_cast<std::size_t>(idx));
  if (node.lag == 0) return {{"action", node.action}};
  return {{"lag", node.lag},
          {"children", nlohmann::json::array({tree_node_to_json(tree, node.child[0]),
                                              tree_node_to_json(tree, node.child[1])})}};
}

inline int tree_node_from_json(DecisionTree& tree, const nlohmann::json& doc) {
  DecisionTree::Node node;
  if (doc.contains("action")) {
    node.action = doc.at("action").get<int>();
    tree.nodes.push_back(node);
    return static_cast<int>(tree.nodes.size()) - 1;
  }
  node.lag = doc.at("lag").get<int>();
  int left = tree_node_from_json(tree, doc.at("children").at(0));
  int right = tree_node_from_json(tree, doc.at("children").at(1));
  node.child[0] = left;
  node.child[1] = right;
  tree.nodes.push_back(node);
  return static_cast<int>(tree.nodes.size()) - 1;
}

}  // namespace detail_serialize

inline nlohmann::json behaviour_to_json(const BehaviourPtr& b) {
  nlohmann::json doc;
  doc["id"] = b->id();
  if (auto* c = dynamic_cast<const ConstantBehaviour*>(b.get())) {
    doc["kind"] = "constant";
    doc["probs"] = c->probabilities();
    return doc;
  }
  if (auto* cyc = dynamic_cast<const CycleBehaviour*>(b.get())) {
    doc["kind"] = "cycle";
    doc["sequence"] = cyc->sequence();
    return doc;
  }
  if (auto* fp = dynamic_cast<const FictitiousPlayBehaviour*>(b.get())) {
    doc["kind"] = "fp";
    doc["variant"] = fp->variant() == FictitiousVariant::plain ? "plain" : "conditioned";
    return doc;
  }
  if (auto* r = dynamic_cast<const RandomBehaviour*>(b.get())) {
    doc["kind"] = "random";
    doc["seed"] = r->seed();
    return doc;
  }
  if (auto* t = dynamic_cast<const DecisionTreeBehaviour*>(b.get())) {
    doc["kind"] = "tree";
    doc["default_action"] = t->tree().default_action;
    doc["root"] = detail_serialize::tree_node_to_json(t->tree(), t->tree().root);
    return doc;
  }
  if (auto* n = dynamic_cast<const NeuralNetBehaviour*>(b.get())) {
    doc["kind"] = "net";
    doc["weights"] = n->net().to_genome();
    return doc;
  }
  if (auto* l = dynamic_cast<const LftBehaviour*>(b.get())) {
    doc["kind"] = "lft";
    doc["role"] = l->role() == LftRole::leader ? "leader"
                  : l->role() == LftRole::follower ? "follower"
                                                   : "trigger";
    doc["target"] = l->target();
    return doc;
  }
  throw ModelError("behaviour kind is not serialisable: " + b->id());
}

inline BehaviourPtr behaviour_from_json(const nlohmann::json& doc) {
  std::string kind = doc.at("kind").get<std::string>();
  std::string id = doc.at("id").get<std::string>();
  if (kind == "constant")
    return std::make_shared<ConstantBehaviour>(id, doc.at("probs").get<std::vector<double>>());
  if (kind == "cycle")
    return std::make_shared<CycleBehaviour>(id, doc.at("sequence").get<std::vector<int>>());
  if (kind == "fp")
    return std::make_shared<FictitiousPlayBehaviour>(
        id, doc.at("variant").get<std::string>() == "plain" ? FictitiousVariant::plain
                                                            : FictitiousVariant::conditioned);
  if (kind == "random") return std::make_shared<RandomBehaviour>(id, doc.at("seed").get<std::uint64_t>());
  if (kind == "tree") {
    DecisionTree tree;
    tree.default_action = doc.at("default_action").get<int>();
    tree.root = detail_serialize::tree_node_from_json(tree, doc.at("root"));
    return std::make_shared<DecisionTreeBehaviour>(id, std::move(tree));
  }
  if (kind == "net")
    return std::make_shared<NeuralNetBehaviour>(
        id, NeuralNet::from_genome(doc.at("weights").get<std::vector<double>>()));
  if (kind == "lft") {
    std::string role = doc.at("role").get<std::string>();
    LftRole r = role == "leader" ? LftRole::leader
                : role == "follower" ? LftRole::follower
                                     : LftRole::trigger;
    return std::make_shared<LftBehaviour>(id, r, doc.at("target").get<std::vector<JointAction>>());
  }
  throw ModelError("unknown behaviour kind: " + kind);
}

inline nlohmann::json pool_to_json(const std::vector<BehaviourPtr>& pool) {
  nlohmann::json doc;
  doc["schema"] = kPoolSchema;
  nlohmann::json list = nlohmann::json::array();
  for (const auto& b : pool) list.push_back(behaviour_to_json(b));
  doc["behaviours"] = std::move(list);
  return doc;
}

inline std::vector<BehaviourPtr> pool_from_json(const nlohmann::json& doc) {
  if (doc.value("schema", "") != kPoolSchema) throw ModelError("unexpected pool schema");
  std::vector<BehaviourPtr> pool;
  for (const auto& b : doc.at("behaviours")) pool.push_back(behaviour_from_json(b));
  return pool;
}

inline nlohmann::json type_distribution_to_json(const TypeDistribution& dist) {
  nlohmann::json doc;
  switch (dist.kind()) {
    case TypeDistributionKind::pure: doc["kind"] = "pure"; break;
    case TypeDistributionKind::mixed: doc["kind"] = "mixed"; break;
    case TypeDistributionKind::correlated: doc["kind"] = "correlated"; break;
    case TypeDistributionKind::independent_product: doc["kind"] = "independent-product"; break;
  }
  doc["players"] = dist.players();
  doc["probs"] = dist.probabilities();
  nlohmann::json support = nlohmann::json::array();
  for (const auto& tuple : dist.support()) {
    nlohmann::json entry = nlohmann::json::array();
    for (const auto& b : tuple) entry.push_back(behaviour_to_json(b));
    support.push_back(std::move(entry));
  }
  doc["support"] = std::move(support);
  return doc;
}

inline TypeDistribution type_distribution_from_json(const nlohmann::json& doc) {
  std::string kind = doc.at("kind").get<std::string>();
  TypeDistributionKind k = kind == "pure"     ? TypeDistributionKind::pure
                           : kind == "mixed"  ? TypeDistributionKind::mixed
                           : kind == "correlated" ? TypeDistributionKind::correlated
                                                  : TypeDistributionKind::independent_product;
  std::vector<std::vector<BehaviourPtr>> support;
  for (const auto& entry : doc.at("support")) {
    std::vector<BehaviourPtr> tuple;
    for (const auto& b : entry) tuple.push_back(behaviour_from_json(b));
    support.push_back(std::move(tuple));
  }
  return TypeDistribution(doc.at("players").get<std::vector<int>>(), std::move(support),
                          doc.at("probs").get<std::vector<double>>(), k);
}

// Bundles a game with the type distribution governing its opponents.
inline nlohmann::json game_to_json(const Game& g, const TypeDistribution& dist) {
  nlohmann::json doc = game_to_json(g);
  doc["type_distribution"] = type_distribution_to_json(dist);
  return doc;
}

inline std::optional<TypeDistribution> type_distribution_of(const nlohmann::json& game_doc) {
  if (!game_doc.contains("type_distribution")) return std::nullopt;
  return type_distribution_from_json(game_doc.at("type_distribution"));
}

// Sparse-triple chain format.
inline nlohmann::json chain_to_json(const LabelledChain& c) {
  nlohmann::json doc;
  doc["schema"] = kChainSchema;
  doc["initial"] = c.initial;
  doc["term"] = c.term;
  nlohmann::json triples = nlohmann::json::array();
  for (int v = 0; v < c.num_nodes(); ++v)
    for (const auto& [w, p] : c.rows[static_cast<std::size_t>(v)])
      triples.push_back({v, w, p});
  doc["transitions"] = std::move(triples);
  return doc;
}

inline LabelledChain chain_from_json(const nlohmann::json& doc) {
  if (doc.value("schema", "") != kChainSchema) throw ModelError("unexpected chain schema");
  LabelledChain c;
  c.initial = doc.at("initial").get<int>();
  c.term = doc.at("term").get<std::vector<bool>>();
  c.rows.resize(c.term.size());
  for (const auto& triple : doc.at("transitions"))
    c.rows.at(triple.at(0).get<std::size_t>())
        .emplace_back(triple.at(1).get<int>(), triple.at(2).get<double>());
  c.validate();
  return c;
}

inline nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open for reading: " + path);
  nlohmann::json doc;
  in >> doc;
  return doc;
}

inline void save_json(const nlohmann::json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ModelError("cannot open for writing: " + path);
  out << doc.dump(2) << "\n";
  if (!out) throw ModelError("write failed: " + path);
}

}  // namespace sbg

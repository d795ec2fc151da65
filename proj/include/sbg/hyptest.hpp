// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sbg/behaviour.hpp"
#include "sbg/game.hpp"
#include "sbg/skew_normal.hpp"

namespace sbg {

// Bounded score functions comparing an action vector against the sequence of
// hypothesised distributions delta = (pi(H^0), ..., pi(H^{t-1})).

// Mean ratio of the taken action's probability to the modal probability.
inline double score_z1(const std::vector<int>& actions,
                       const std::vector<std::vector<double>>& dists) {
  if (actions.empty() || actions.size() != dists.size())
    throw ModelError("score: action/distribution length mismatch");
  double total = 0.0;
  for (std::size_t tau = 0; tau < actions.size(); ++tau) {
    double top = *std::max_element(dists[tau].begin(), dists[tau].end());
    total += dists[tau].at(static_cast<std::size_t>(actions[tau])) / top;
  }
  return total / static_cast<double>(actions.size());
}

// One minus the expected absolute probability gap to the taken action.
inline double score_z2(const std::vector<int>& actions,
                       const std::vector<std::vector<double>>& dists) {
  if (actions.empty() || actions.size() != dists.size())
    throw ModelError("score: action/distribution length mismatch");
  double total = 0.0;
  for (std::size_t tau = 0; tau < actions.size(); ++tau) {
    double taken = dists[tau].at(static_cast<std::size_t>(actions[tau]));
    double gap = 0.0;
    for (double p : dists[tau]) gap += p * std::abs(taken - p);
    total += 1.0 - gap;
  }
  return total / static_cast<double>(actions.size());
}

// Overlap between the empirical frequency distribution and the mean
// hypothesised distribution.
inline double score_z3(const std::vector<int>& actions,
                       const std::vector<std::vector<double>>& dists) {
  if (actions.empty() || actions.size() != dists.size())
    throw ModelError("score: action/distribution length mismatch");
  std::size_t num_actions = dists[0].size();
  std::vector<double> freq(num_actions, 0.0), mean(num_actions, 0.0);
  double t = static_cast<double>(actions.size());
  for (std::size_t tau = 0; tau < actions.size(); ++tau) {
    freq[static_cast<std::size_t>(actions[tau])] += 1.0 / t;
    for (std::size_t a = 0; a < num_actions; ++a) mean[a] += dists[tau][a] / t;
  }
  double total = 0.0;
  for (std::size_t a = 0; a < num_actions; ++a) total += std::min(freq[a], mean[a]);
  return total;
}

inline double score_by_id(int id, const std::vector<int>& actions,
                          const std::vector<std::vector<double>>& dists) {
  switch (id) {
    case 1: return score_z1(actions, dists);
    case 2: return score_z2(actions, dists);
    case 3: return score_z3(actions, dists);
  }
  throw ModelError("unknown score function id");
}

enum class WeightScheme { uniform, truemax, truemin, max, min };

inline WeightScheme weight_scheme_from_string(const std::string& s) {
  if (s == "uniform") return WeightScheme::uniform;
  if (s == "truemax") return WeightScheme::truemax;
  if (s == "truemin") return WeightScheme::truemin;
  if (s == "max") return WeightScheme::max;
  if (s == "min") return WeightScheme::min;
  throw ModelError("unknown weight scheme: " + s);
}

// Prefix-averaged weighted test statistic
//   T(v1, v2) = (1/t) sum_tau sum_k w_k (z_k(v1^tau) - z_k(v2^tau)).
// The `truemax`/`truemin` schemes pick the score with the largest/smallest
// absolute summand of the observed pair (v1 unless `true_pair` is given);
// `max`/`min` pick per evaluated pair.
inline double test_statistic(const std::vector<int>& v1, const std::vector<int>& v2,
                             const std::vector<std::vector<double>>& dists,
                             const std::vector<int>& scores, WeightScheme scheme,
                             const std::vector<int>* true_pair_first = nullptr,
                             const std::vector<int>* true_pair_second = nullptr) {
  if (scores.empty()) throw ModelError("test statistic needs at least one score function");
  if (v1.size() != v2.size()) throw ModelError("test statistic needs equal-length vectors");
  std::size_t t = v1.size();
  const std::vector<int>& ref1 = true_pair_first ? *true_pair_first : v1;
  const std::vector<int>& ref2 = true_pair_second ? *true_pair_second : v2;
  double total = 0.0;
  for (std::size_t tau = 1; tau <= t; ++tau) {
    std::vector<int> p1(v1.begin(), v1.begin() + static_cast<std::ptrdiff_t>(tau));
    std::vector<int> p2(v2.begin(), v2.begin() + static_cast<std::ptrdiff_t>(tau));
    std::vector<std::vector<double>> pd(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(tau));
    std::vector<double> summand(scores.size());
    for (std::size_t k = 0; k < scores.size(); ++k)
      summand[k] = score_by_id(scores[k], p1, pd) - score_by_id(scores[k], p2, pd);
    std::vector<double> pick = summand;
    if (scheme == WeightScheme::truemax || scheme == WeightScheme::truemin) {
      std::vector<int> r1(ref1.begin(), ref1.begin() + static_cast<std::ptrdiff_t>(tau));
      std::vector<int> r2(ref2.begin(), ref2.begin() + static_cast<std::ptrdiff_t>(tau));
      for (std::size_t k = 0; k < scores.size(); ++k)
        pick[k] = score_by_id(scores[k], r1, pd) - score_by_id(scores[k], r2, pd);
    }
    double step = 0.0;
    if (scheme == WeightScheme::uniform) {
      for (double s : summand) step += s / static_cast<double>(scores.size());
    } else {
      std::size_t chosen = 0;
      for (std::size_t k = 1; k < scores.size(); ++k) {
        bool better = (scheme == WeightScheme::truemax || scheme == WeightScheme::max)
                          ? std::abs(pick[k]) > std::abs(pick[chosen])
                          : std::abs(pick[k]) < std::abs(pick[chosen]);
        if (better) chosen = k;
      }
      step = summand[chosen];
    }
    total += step;
  }
  return total / static_cast<double>(t);
}

struct HypTestConfig {
  std::vector<int> scores = {1, 2, 3};
  WeightScheme scheme = WeightScheme::uniform;
  int null_vectors = 50;  // N
  double alpha = 0.01;
  int fit_iterations = 200;
  std::optional<double> shape_clamp = std::nullopt;
};

// Streaming behavioural hypothesis test for one (opponent, hypothesis)
// pair. Each step extends the observed vector, one hypothesis-sampled
// vector, and N null-sampled vectors; every vector keeps incremental score
// accumulators so a step costs O(N K). The test distribution is re-fitted on
// a sqrt-spaced schedule and the p-value is the density ratio between the
// observed statistic and the fitted mode.
class HypTest {
 public:
  HypTest(BehaviourPtr hypothesis, int player, HypTestConfig cfg, std::uint64_t seed)
      : hypothesis_(std::move(hypothesis)),
        player_(player),
        cfg_(cfg),
        rng_(RngStream(seed).sub("hyptest").engine()) {
    if (cfg_.scores.empty()) throw ModelError("hypothesis test needs score functions");
    if (cfg_.null_vectors < 1) throw ModelError("hypothesis test needs N >= 1");
    vectors_.resize(static_cast<std::size_t>(cfg_.null_vectors) + 2);
    pair_sums_.assign(static_cast<std::size_t>(cfg_.null_vectors) + 1, 0.0);
  }

  // Consumes the opponent action observed after `prefix`; returns the
  // current p-value. The reject decision (p < alpha) stays with the caller.
  double observe(const Game& game, const History& prefix, int observed_action) {
    std::vector<double> dist = hypothesis_->action_probabilities(game, prefix, player_);
    dists_.push_back(dist);
    std::size_t num_actions = dist.size();
    double top = *std::max_element(dist.begin(), dist.end());

    extend(kObserved, observed_action, dist, top, num_actions);
    extend(kSampled, sample_index(dist, rng_), dist, top, num_actions);
    for (int n = 0; n < cfg_.null_vectors; ++n)
      extend(static_cast<std::size_t>(kNull0 + n), sample_index(dist, rng_), dist, top, num_actions);
    ++t_;

    // Prefix scores of every vector at the current length.
    std::vector<std::vector<double>> z(vectors_.size(), std::vector<double>(cfg_.scores.size()));
    for (std::size_t v = 0; v < vectors_.size(); ++v)
      for (std::size_t k = 0; k < cfg_.scores.size(); ++k)
        z[v][k] = incremental_score(cfg_.scores[k], vectors_[v]);

    std::vector<double> true_summand(cfg_.scores.size());
    for (std::size_t k = 0; k < cfg_.scores.size(); ++k)
      true_summand[k] = z[kObserved][k] - z[kSampled][k];

    pair_sums_[0] += combine(true_summand, true_summand);
    for (int n = 0; n < cfg_.null_vectors; ++n) {
      std::vector<double> summand(cfg_.scores.size());
      for (std::size_t k = 0; k < cfg_.scores.size(); ++k)
        summand[k] = z[static_cast<std::size_t>(kNull0 + n)][k] - z[kSampled][k];
      pair_sums_[static_cast<std::size_t>(1 + n)] += combine(summand, true_summand);
    }

    if (t_ == next_fit_) {
      refit();
      next_fit_ = t_ + static_cast<int>(std::floor(std::sqrt(static_cast<double>(t_))));
      fit_times_.push_back(t_);
    }
    return p_value();
  }

  double statistic() const { return t_ == 0 ? 0.0 : pair_sums_[0] / static_cast<double>(t_); }

  double p_value() const {
    if (!fitted_) return 1.0;
    double q = statistic();
    if (degenerate_) return std::abs(q - point_) <= 1e-9 ? 1.0 : 0.0;
    return skew_normal_p_value(q, params_, mode_);
  }

  bool reject() const { return p_value() < cfg_.alpha; }

  int time() const { return t_; }
  const SkewNormalParams& params() const { return params_; }
  double mode() const { return mode_; }
  bool distribution_degenerate() const { return degenerate_; }
  const std::vector<int>& fit_times() const { return fit_times_; }

  // Raw materials, exposed so tests can recompute everything from scratch.
  const std::vector<std::vector<double>>& distributions() const { return dists_; }
  const std::vector<int>& observed_actions() const { return vectors_[kObserved].actions; }
  const std::vector<int>& sampled_actions() const { return vectors_[kSampled].actions; }
  const std::vector<int>& null_actions(int n) const {
    return vectors_[static_cast<std::size_t>(kNull0 + n)].actions;
  }
  double null_statistic(int n) const {
    return t_ == 0 ? 0.0 : pair_sums_[static_cast<std::size_t>(1 + n)] / static_cast<double>(t_);
  }

 private:
  static constexpr std::size_t kObserved = 0;
  static constexpr std::size_t kSampled = 1;
  static constexpr int kNull0 = 2;

  struct VectorState {
    std::vector<int> actions;
    double ratio_sum = 0.0;  // z1 numerator
    double gap_sum = 0.0;    // z2 numerator
    std::vector<double> counts;
  };

  void extend(std::size_t v, int action, const std::vector<double>& dist, double top,
              std::size_t num_actions) {
    VectorState& state = vectors_[v];
    if (state.counts.empty()) state.counts.assign(num_actions, 0.0);
    state.actions.push_back(action);
    double taken = dist.at(static_cast<std::size_t>(action));
    state.ratio_sum += taken / top;
    double gap = 0.0;
    for (double p : dist) gap += p * std::abs(taken - p);
    state.gap_sum += 1.0 - gap;
    state.counts[static_cast<std::size_t>(action)] += 1.0;
    if (v == kObserved) {
      if (mean_dist_.empty()) mean_dist_.assign(num_actions, 0.0);
      for (std::size_t a = 0; a < num_actions; ++a) mean_dist_[a] += dist[a];
    }
  }

  double incremental_score(int id, const VectorState& v) const {
    double t = static_cast<double>(t_);
    switch (id) {
      case 1: return v.ratio_sum / t;
      case 2: return v.gap_sum / t;
      case 3: {
        double total = 0.0;
        for (std::size_t a = 0; a < v.counts.size(); ++a)
          total += std::min(v.counts[a] / t, mean_dist_[a] / t);
        return total;
      }
    }
    throw ModelError("unknown score function id");
  }

  double combine(const std::vector<double>& summand, const std::vector<double>& true_summand) const {
    if (cfg_.scheme == WeightScheme::uniform) {
      double total = 0.0;
      for (double s : summand) total += s;
      return total / static_cast<double>(summand.size());
    }
    const std::vector<double>& pick =
        (cfg_.scheme == WeightScheme::truemax || cfg_.scheme == WeightScheme::truemin)
            ? true_summand
            : summand;
    std::size_t chosen = 0;
    for (std::size_t k = 1; k < pick.size(); ++k) {
      bool better = (cfg_.scheme == WeightScheme::truemax || cfg_.scheme == WeightScheme::max)
                        ? std::abs(pick[k]) > std::abs(pick[chosen])
                        : std::abs(pick[k]) < std::abs(pick[chosen]);
      if (better) chosen = k;
    }
    return summand[chosen];
  }

  void refit() {
    std::vector<double> data(static_cast<std::size_t>(cfg_.null_vectors));
    for (int n = 0; n < cfg_.null_vectors; ++n) data[static_cast<std::size_t>(n)] = null_statistic(n);
    double lo = *std::min_element(data.begin(), data.end());
    double hi = *std::max_element(data.begin(), data.end());
    fitted_ = true;
    if (hi - lo < 1e-12 || data.size() < 3) {
      degenerate_ = true;
      point_ = lo;
      return;
    }
    degenerate_ = false;
    SkewNormalFit fit = fit_skew_normal(data, cfg_.fit_iterations, cfg_.shape_clamp);
    params_ = fit.params;
    mode_ = skew_normal_mode(params_);
  }

  BehaviourPtr hypothesis_;
  int player_;
  HypTestConfig cfg_;
  std::mt19937_64 rng_;
  int t_ = 0;
  int next_fit_ = 1;
  std::vector<VectorState> vectors_;
  std::vector<double> mean_dist_;
  std::vector<double> pair_sums_;  // [0] observed-vs-sampled, then null-vs-sampled
  std::vector<std::vector<double>> dists_;
  bool fitted_ = false;
  bool degenerate_ = false;
  double point_ = 0.0;
  SkewNormalParams params_;
  double mode_ = 0.0;
  std::vector<int> fit_times_;
};

}  // namespace sbg

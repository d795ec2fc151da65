// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "sbg/game.hpp"

namespace sbg {

inline constexpr double kLogSqrt2Pi = 0.9189385332046727;

inline double log_norm_pdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

// log Phi(z) with an asymptotic branch for the far left tail where erfc
// underflows.
inline double log_norm_cdf(double z) {
  if (z > -8.0) return std::log(0.5 * std::erfc(-z / std::sqrt(2.0)));
  double z2 = z * z;
  double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
  return log_norm_pdf(z) - std::log(-z) + std::log(series);
}

struct SkewNormalParams {
  double xi = 0.0;     // location
  double omega = 1.0;  // scale, > 0
  double beta = 0.0;   // shape
};

inline double skew_normal_log_pdf(double x, const SkewNormalParams& p) {
  double z = (x - p.xi) / p.omega;
  return std::log(2.0) - std::log(p.omega) + log_norm_pdf(z) + log_norm_cdf(p.beta * z);
}

inline double skew_normal_pdf(double x, const SkewNormalParams& p) {
  return std::exp(skew_normal_log_pdf(x, p));
}

inline double skew_normal_nll(const std::vector<double>& samples, const SkewNormalParams& p) {
  double total = 0.0;
  for (double x : samples) total -= skew_normal_log_pdf(x, p);
  return total;
}

// Method-of-moments estimate; also the optimiser's starting point.
inline SkewNormalParams skew_normal_mom(const std::vector<double>& samples) {
  std::size_t n = samples.size();
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(n);
  double m2 = 0.0, m3 = 0.0;
  for (double x : samples) {
    double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);
  double sd = std::sqrt(std::max(m2, 1e-300));
  double skew = m3 / (sd * sd * sd);

  constexpr double kMaxSkew = 0.9952;  // supremum of the family's skewness
  double g = std::clamp(skew, -kMaxSkew, kMaxSkew);
  double a23 = std::pow(std::abs(g), 2.0 / 3.0);
  double b23 = std::pow((4.0 - M_PI) / 2.0, 2.0 / 3.0);
  double delta = std::sqrt(M_PI / 2.0 * a23 / (a23 + b23));
  delta = std::copysign(std::min(delta, 0.995), g);

  SkewNormalParams p;
  p.beta = delta / std::sqrt(1.0 - delta * delta);
  p.omega = std::sqrt(m2 / (1.0 - 2.0 * delta * delta / M_PI));
  p.xi = mean - p.omega * delta * std::sqrt(2.0 / M_PI);
  return p;
}

// Derivative-free Nelder-Mead simplex minimisation with a fixed iteration
// budget; returns the best vertex found.
inline std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> start, double step, int iterations) {
  std::size_t dim = start.size();
  std::vector<std::vector<double>> simplex(dim + 1, start);
  std::vector<double> value(dim + 1);
  for (std::size_t k = 0; k < dim; ++k) simplex[k + 1][k] += step;
  for (std::size_t k = 0; k <= dim; ++k) value[k] = f(simplex[k]);

  for (int iter = 0; iter < iterations; ++iter) {
    std::vector<std::size_t> order(dim + 1);
    for (std::size_t k = 0; k <= dim; ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
    std::size_t best = order[0], worst = order[dim], second = order[dim - 1];

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t k = 0; k <= dim; ++k) {
      if (k == worst) continue;
      for (std::size_t d = 0; d < dim; ++d) centroid[d] += simplex[k][d] / static_cast<double>(dim);
    }
    auto blend = [&](double t) {
      std::vector<double> out(dim);
      for (std::size_t d = 0; d < dim; ++d)
        out[d] = centroid[d] + t * (simplex[worst][d] - centroid[d]);
      return out;
    };

    std::vector<double> reflected = blend(-1.0);
    double fr = f(reflected);
    if (fr < value[best]) {
      std::vector<double> expanded = blend(-2.0);
      double fe = f(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        value[worst] = fe;
      } else {
        simplex[worst] = reflected;
        value[worst] = fr;
      }
    } else if (fr < value[second]) {
      simplex[worst] = reflected;
      value[worst] = fr;
    } else {
      std::vector<double> contracted = blend(0.5);
      double fc = f(contracted);
      if (fc < value[worst]) {
        simplex[worst] = contracted;
        value[worst] = fc;
      } else {
        for (std::size_t k = 0; k <= dim; ++k) {
          if (k == best) continue;
          for (std::size_t d = 0; d < dim; ++d)
            simplex[k][d] = simplex[best][d] + 0.5 * (simplex[k][d] - simplex[best][d]);
          value[k] = f(simplex[k]);
        }
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k <= dim; ++k)
    if (value[k] < value[best]) best = k;
  return simplex[best];
}

struct SkewNormalFit {
  SkewNormalParams params;
  bool degenerate = false;  // point mass: all samples equal
  double point = 0.0;
  double nll = 0.0;
};

// Maximum-likelihood fit initialised by the method of moments; the scale is
// optimised through log(omega) so positivity needs no constraint. The
// likelihood near shape zero is a flat ridge where location and shape trade
// off, so the shape parameter is kept only when it beats the exact
// pure-normal maximum likelihood (closed form: sample mean and standard
// deviation) by more than one nat — the AIC bar for one extra parameter.
// The returned likelihood therefore never falls below the best pure normal.
inline SkewNormalFit fit_skew_normal(const std::vector<double>& samples, int iterations = 200,
                                     std::optional<double> shape_clamp = std::nullopt) {
  if (samples.size() < 3) throw ModelError("fit_skew_normal needs at least 3 samples");
  SkewNormalFit out;
  double lo = *std::min_element(samples.begin(), samples.end());
  double hi = *std::max_element(samples.begin(), samples.end());
  if (hi - lo < 1e-300) {
    out.degenerate = true;
    out.point = lo;
    return out;
  }

  auto clamp_shape = [&](double b) {
    if (shape_clamp) return std::clamp(b, -*shape_clamp, *shape_clamp);
    return b;
  };
  auto objective = [&](const std::vector<double>& v) {
    SkewNormalParams p{v[0], std::exp(v[1]), clamp_shape(v[2])};
    return skew_normal_nll(samples, p);
  };

  SkewNormalParams mom = skew_normal_mom(samples);
  mom.beta = clamp_shape(mom.beta);
  std::vector<double> start = {mom.xi, std::log(mom.omega), mom.beta};
  std::vector<double> best_v = nelder_mead(objective, start, 0.2, iterations);
  double best = objective(best_v);

  double mom_nll = objective(start);
  if (mom_nll < best) {
    best_v = start;
    best = mom_nll;
  }

  // Exact optimum of the shape-zero sub-family.
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  var /= static_cast<double>(samples.size());
  SkewNormalParams normal{mean, std::sqrt(std::max(var, 1e-300)), 0.0};
  double normal_nll = skew_normal_nll(samples, normal);

  if (best < normal_nll - 1.0) {
    out.params = {best_v[0], std::exp(best_v[1]), clamp_shape(best_v[2])};
    out.nll = best;
  } else {
    out.params = normal;
    out.nll = normal_nll;
  }
  return out;
}

// Mode of the density: exact for shape zero, otherwise a grid scan plus
// golden-section refinement over [xi - 3 omega, xi + 3 omega].
inline double skew_normal_mode(const SkewNormalParams& p) {
  if (p.omega <= 0.0) throw ModelError("skew-normal scale must be positive");
  if (p.beta == 0.0) return p.xi;
  auto density = [&](double x) { return skew_normal_log_pdf(x, p); };
  double lo = p.xi - 3.0 * p.omega;
  double hi = p.xi + 3.0 * p.omega;
  const int kGrid = 240;
  double best_x = lo;
  double best_v = density(lo);
  for (int k = 1; k <= kGrid; ++k) {
    double x = lo + (hi - lo) * static_cast<double>(k) / kGrid;
    double v = density(x);
    if (v > best_v) {
      best_v = v;
      best_x = x;
    }
  }
  double a = best_x - (hi - lo) / kGrid;
  double b = best_x + (hi - lo) / kGrid;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  for (int it = 0; it < 80; ++it) {
    if (density(c) > density(d))
      b = d;
    else
      a = c;
    c = b - phi * (b - a);
    d = a + phi * (b - a);
  }
  return 0.5 * (a + b);
}

// Density-ratio p-value relative to the mode.
inline double skew_normal_p_value(double statistic, const SkewNormalParams& p, double mode) {
  return std::exp(skew_normal_log_pdf(statistic, p) - skew_normal_log_pdf(mode, p));
}

}  // namespace sbg

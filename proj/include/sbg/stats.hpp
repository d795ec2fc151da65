// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cmath>
#include <vector>

#include "sbg/game.hpp"

namespace sbg {

inline double mean_of(const std::vector<double>& xs) {
  double total = 0.0;
  for (double x : xs) total += x;
  return xs.empty() ? 0.0 : total / static_cast<double>(xs.size());
}

inline double sample_variance(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double m = mean_of(xs);
  double total = 0.0;
  for (double x : xs) total += (x - m) * (x - m);
  return total / static_cast<double>(xs.size() - 1);
}

// Continued-fraction evaluation of the regularised incomplete beta function.
inline double regularised_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  auto betacf = [](double aa, double bb, double xx) {
    const double kFpMin = 1e-300;
    const double kEps = 3e-14;
    double qab = aa + bb, qap = aa + 1.0, qam = aa - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * xx / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 200; ++m) {
      int m2 = 2 * m;
      double coef = m * (bb - m) * xx / ((qam + m2) * (aa + m2));
      d = 1.0 + coef * d;
      if (std::abs(d) < kFpMin) d = kFpMin;
      c = 1.0 + coef / c;
      if (std::abs(c) < kFpMin) c = kFpMin;
      d = 1.0 / d;
      h *= d * c;
      coef = -(aa + m) * (qab + m) * xx / ((aa + m2) * (qap + m2));
      d = 1.0 + coef * d;
      if (std::abs(d) < kFpMin) d = kFpMin;
      c = 1.0 + coef / c;
      if (std::abs(c) < kFpMin) c = kFpMin;
      d = 1.0 / d;
      double delta = d * c;
      h *= delta;
      if (std::abs(delta - 1.0) < kEps) break;
    }
    return h;
  };
  double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                     b * std::log(1.0 - x);
  double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

inline double student_t_cdf(double t, int df) {
  double x = static_cast<double>(df) / (df + t * t);
  double tail = 0.5 * regularised_incomplete_beta(0.5 * df, 0.5, x);
  return t >= 0.0 ? 1.0 - tail : tail;
}

struct TTestResult {
  double statistic = 0.0;
  int df = 0;
  double p_two_sided = 1.0;
  double p_right = 1.0;  // alternative: mean(first) > mean(second)
  bool degenerate = false;  // zero variance of the differences
};

inline TTestResult paired_t_test(const std::vector<double>& first,
                                 const std::vector<double>& second) {
  if (first.size() != second.size() || first.size() < 2)
    throw ModelError("paired t-test needs two equal samples of size >= 2");
  std::vector<double> diff(first.size());
  for (std::size_t k = 0; k < first.size(); ++k) diff[k] = first[k] - second[k];
  TTestResult out;
  out.df = static_cast<int>(first.size()) - 1;
  double m = mean_of(diff);
  double var = sample_variance(diff);
  if (var <= 0.0) {
    out.degenerate = true;
    out.statistic = m == 0.0 ? 0.0 : std::copysign(1e12, m);
    out.p_two_sided = m == 0.0 ? 1.0 : 0.0;
    out.p_right = m > 0.0 ? 0.0 : 1.0;
    return out;
  }
  out.statistic = m / std::sqrt(var / static_cast<double>(first.size()));
  double x = static_cast<double>(out.df) / (out.df + out.statistic * out.statistic);
  out.p_two_sided = regularised_incomplete_beta(0.5 * out.df, 0.5, x);
  out.p_right = 1.0 - student_t_cdf(out.statistic, out.df);
  return out;
}

}  // namespace sbg

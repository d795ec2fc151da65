// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

// Vertex-enumeration oracle for small linear programs: tries every choice of
// n active constraints out of {Ax <= b, x >= 0}, solves the square system,
// and keeps the best feasible vertex. Valid for feasible bounded programs.
// Test-only; shares no code with the production solver.

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

namespace sbg_test {

inline std::optional<double> enumerate_lp_optimum(const std::vector<double>& c,
                                                  const std::vector<std::vector<double>>& A,
                                                  const std::vector<double>& b) {
  int n = static_cast<int>(c.size());
  int m = static_cast<int>(A.size());
  int total = m + n;
  std::vector<int> pick(static_cast<std::size_t>(n));
  std::optional<double> best;

  auto row_of = [&](int k, std::vector<double>& row, double& rhs) {
    if (k < m) {
      row = A[static_cast<std::size_t>(k)];
      rhs = b[static_cast<std::size_t>(k)];
    } else {
      row.assign(static_cast<std::size_t>(n), 0.0);
      row[static_cast<std::size_t>(k - m)] = 1.0;
      rhs = 0.0;
    }
  };

  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      std::vector<std::vector<double>> M(static_cast<std::size_t>(n),
                                         std::vector<double>(static_cast<std::size_t>(n) + 1));
      for (int r = 0; r < n; ++r) {
        std::vector<double> row;
        double rhs;
        row_of(pick[static_cast<std::size_t>(r)], row, rhs);
        for (int col = 0; col < n; ++col)
          M[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] =
              row[static_cast<std::size_t>(col)];
      M[static_cast<std::size_t>(r)][static_cast<std::size_t>(n)] = rhs;
      }
      for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r)
          if (std::abs(M[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) > 1e-9) {
            piv = r;
            break;
          }
        if (piv < 0) return;
        std::swap(M[static_cast<std::size_t>(col)], M[static_cast<std::size_t>(piv)]);
        double d = M[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
        for (double& v : M[static_cast<std::size_t>(col)]) v /= d;
        for (int r = 0; r < n; ++r) {
          if (r == col) continue;
          double f = M[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)];
          if (f == 0.0) continue;
          for (int cc = 0; cc <= n; ++cc)
            M[static_cast<std::size_t>(r)][static_cast<std::size_t>(cc)] -=
                f * M[static_cast<std::size_t>(col)][static_cast<std::size_t>(cc)];
        }
      }
      std::vector<double> x(static_cast<std::size_t>(n));
      for (int r = 0; r < n; ++r)
        x[static_cast<std::size_t>(r)] = M[static_cast<std::size_t>(r)][static_cast<std::size_t>(n)];
      for (double v : x)
        if (v < -1e-7) return;
      for (int r = 0; r < m; ++r) {
        double lhs = 0.0;
        for (int col = 0; col < n; ++col)
          lhs += A[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] *
                 x[static_cast<std::size_t>(col)];
        if (lhs > b[static_cast<std::size_t>(r)] + 1e-7) return;
      }
      double obj = 0.0;
      for (int col = 0; col < n; ++col)
        obj += c[static_cast<std::size_t>(col)] * x[static_cast<std::size_t>(col)];
      if (!best || obj < *best) best = obj;
      return;
    }
    for (int k = start; k < total; ++k) {
      pick[static_cast<std::size_t>(depth)] = k;
      rec(k + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

}  // namespace sbg_test

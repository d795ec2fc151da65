// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "sbg/game.hpp"

namespace sbg {

struct LpResult {
  enum class Status { optimal, infeasible, unbounded };
  Status status = Status::infeasible;
  std::vector<double> x;
  double objective = 0.0;
};

// Dense two-phase simplex for small programs:
//   minimise c^T x  subject to  A x <= b,  x >= 0.
// Entering and leaving variables follow Bland's rule, so the pivot sequence
// is deterministic and cannot cycle. Intended for programs with at most a
// few dozen variables.
class SimplexSolver {
 public:
  static constexpr double kTol = 1e-9;

  LpResult solve(const std::vector<double>& c, const std::vector<std::vector<double>>& A,
                 const std::vector<double>& b) {
    m_ = static_cast<int>(A.size());
    n_ = static_cast<int>(c.size());
    if (static_cast<int>(b.size()) != m_) throw ModelError("lp: row/rhs mismatch");
    for (const auto& row : A)
      if (static_cast<int>(row.size()) != n_) throw ModelError("lp: ragged constraint matrix");

    // Columns: n structural, m slack, plus one artificial per negated row.
    std::vector<int> artificial_rows;
    rows_.assign(static_cast<std::size_t>(m_), {});
    rhs_.assign(static_cast<std::size_t>(m_), 0.0);
    for (int i = 0; i < m_; ++i) {
      rows_[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(n_ + m_), 0.0);
      for (int j = 0; j < n_; ++j)
        rows_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      rows_[static_cast<std::size_t>(i)][static_cast<std::size_t>(n_ + i)] = 1.0;
      rhs_[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)];
      if (rhs_[static_cast<std::size_t>(i)] < 0.0) {
        for (double& v : rows_[static_cast<std::size_t>(i)]) v = -v;
        rhs_[static_cast<std::size_t>(i)] = -rhs_[static_cast<std::size_t>(i)];
        artificial_rows.push_back(i);
      }
    }
    n_art_ = static_cast<int>(artificial_rows.size());
    total_ = n_ + m_ + n_art_;
    basis_.assign(static_cast<std::size_t>(m_), -1);
    for (int i = 0; i < m_; ++i) basis_[static_cast<std::size_t>(i)] = n_ + i;
    for (int k = 0; k < n_art_; ++k) {
      int row = artificial_rows[static_cast<std::size_t>(k)];
      for (int i = 0; i < m_; ++i)
        rows_[static_cast<std::size_t>(i)].push_back(i == row ? 1.0 : 0.0);
      basis_[static_cast<std::size_t>(row)] = n_ + m_ + k;
    }

    LpResult result;
    if (n_art_ > 0) {
      // Phase 1: minimise the sum of artificials.
      obj_.assign(static_cast<std::size_t>(total_), 0.0);
      obj_rhs_ = 0.0;
      for (int k = 0; k < n_art_; ++k) obj_[static_cast<std::size_t>(n_ + m_ + k)] = 1.0;
      for (int row : artificial_rows) price_out(row);
      if (!iterate(/*forbid_artificials=*/false)) throw ModelError("lp: phase-1 cannot be unbounded");
      if (-obj_rhs_ > 1e-7) {
        result.status = LpResult::Status::infeasible;
        return result;
      }
      evict_artificials();
    }

    // Phase 2 with the real objective.
    obj_.assign(static_cast<std::size_t>(total_), 0.0);
    for (int j = 0; j < n_; ++j) obj_[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j)];
    obj_rhs_ = 0.0;
    for (int i = 0; i < m_; ++i)
      if (std::abs(obj_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])]) > 0.0)
        price_out(i);
    if (!iterate(/*forbid_artificials=*/true)) {
      result.status = LpResult::Status::unbounded;
      return result;
    }

    result.status = LpResult::Status::optimal;
    result.x.assign(static_cast<std::size_t>(n_), 0.0);
    for (int i = 0; i < m_; ++i)
      if (basis_[static_cast<std::size_t>(i)] < n_)
        result.x[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] =
            rhs_[static_cast<std::size_t>(i)];
    result.objective = 0.0;
    for (int j = 0; j < n_; ++j)
      result.objective += c[static_cast<std::size_t>(j)] * result.x[static_cast<std::size_t>(j)];
    return result;
  }

 private:
  void price_out(int row) {
    double factor = obj_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(row)])];
    if (factor == 0.0) return;
    for (int j = 0; j < total_; ++j)
      obj_[static_cast<std::size_t>(j)] -=
          factor * rows_[static_cast<std::size_t>(row)][static_cast<std::size_t>(j)];
    obj_rhs_ -= factor * rhs_[static_cast<std::size_t>(row)];
  }

  void pivot(int row, int col) {
    double p = rows_[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
    for (double& v : rows_[static_cast<std::size_t>(row)]) v /= p;
    rhs_[static_cast<std::size_t>(row)] /= p;
    for (int i = 0; i < m_; ++i) {
      if (i == row) continue;
      double f = rows_[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)];
      if (f == 0.0) continue;
      for (int j = 0; j < total_; ++j)
        rows_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -=
            f * rows_[static_cast<std::size_t>(row)][static_cast<std::size_t>(j)];
      rhs_[static_cast<std::size_t>(i)] -= f * rhs_[static_cast<std::size_t>(row)];
    }
    double f = obj_[static_cast<std::size_t>(col)];
    if (f != 0.0) {
      for (int j = 0; j < total_; ++j)
        obj_[static_cast<std::size_t>(j)] -=
            f * rows_[static_cast<std::size_t>(row)][static_cast<std::size_t>(j)];
      obj_rhs_ -= f * rhs_[static_cast<std::size_t>(row)];
    }
    basis_[static_cast<std::size_t>(row)] = col;
  }

  // Returns false when unbounded.
  bool iterate(bool forbid_artificials) {
    int limit = forbid_artificials ? n_ + m_ : total_;
    while (true) {
      int entering = -1;
      for (int j = 0; j < limit; ++j) {
        if (obj_[static_cast<std::size_t>(j)] < -kTol) {
          entering = j;
          break;  // Bland: lowest index
        }
      }
      if (entering < 0) return true;
      int leaving = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) {
        double a = rows_[static_cast<std::size_t>(i)][static_cast<std::size_t>(entering)];
        if (a > kTol) {
          double ratio = rhs_[static_cast<std::size_t>(i)] / a;
          if (ratio < best_ratio - kTol ||
              (ratio < best_ratio + kTol &&
               (leaving < 0 || basis_[static_cast<std::size_t>(i)] <
                                   basis_[static_cast<std::size_t>(leaving)]))) {
            best_ratio = ratio;
            leaving = i;
          }
        }
      }
      if (leaving < 0) return false;
      pivot(leaving, entering);
    }
  }

  // After phase 1, swap any artificial still in the basis (at level zero)
  // for a structural or slack column with a nonzero pivot.
  void evict_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < n_ + m_) continue;
      int col = -1;
      for (int j = 0; j < n_ + m_; ++j)
        if (std::abs(rows_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) > kTol) {
          col = j;
          break;
        }
      if (col >= 0) pivot(i, col);
      // A fully zero row is redundant; the artificial stays basic at zero.
    }
  }

  int m_ = 0, n_ = 0, n_art_ = 0, total_ = 0;
  std::vector<std::vector<double>> rows_;
  std::vector<double> rhs_;
  std::vector<double> obj_;
  double obj_rhs_ = 0.0;
  std::vector<int> basis_;
};

inline LpResult solve_lp(const std::vector<double>& c, const std::vector<std::vector<double>>& A,
                         const std::vector<double>& b) {
  SimplexSolver solver;
  return solver.solve(c, A, b);
}

}  // namespace sbg

// Copyright 2026 The mgope Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mgope/error.h"
#include "mgope/game.h"

namespace mgope {
namespace {

constexpr double kPivotEps = 1e-12;
constexpr double kSaddleTolerance = 1e-8;

// Dense tableau for: maximize sum(y) s.t. A y <= 1, y >= 0, where A > 0.
// Columns [0, n) are y, [n, n + m) are slacks, the last column is the rhs.
class Tableau {
 public:
  Tableau(std::span<const double> a, int m, int n)
      : m_(m), n_(n), width_(n + m + 1),
        cells_(static_cast<std::size_t>(m + 1) * (n + m + 1), 0.0),
        basis_(m) {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) at(i, j) = a[i * n + j];
      at(i, n + i) = 1.0;
      at(i, width_ - 1) = 1.0;
      basis_[i] = n + i;
    }
    for (int j = 0; j < n; ++j) at(m, j) = -1.0;
  }

  // Bland's rule: lowest-index improving column, lowest-index basic variable
  // among tied ratios. Returns false if the iteration cap is hit.
  bool Solve(int max_pivots) {
    for (int iter = 0; iter < max_pivots; ++iter) {
      int enter = -1;
      for (int j = 0; j < n_ + m_; ++j) {
        if (at(m_, j) < -kPivotEps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) {
        const double coef = at(i, enter);
        if (coef <= kPivotEps) continue;
        const double ratio = at(i, width_ - 1) / coef;
        if (ratio < best_ratio - kPivotEps ||
            (std::abs(ratio - best_ratio) <= kPivotEps &&
             basis_[i] < basis_[leave])) {
          best_ratio = ratio;
          leave = i;
        }
      }
      if (leave < 0) return false;  // unbounded; impossible for A > 0
      Pivot(leave, enter);
    }
    return false;
  }

  double objective() const { return at(m_, width_ - 1); }
  std::vector<double> primal() const {
    std::vector<double> y(n_, 0.0);
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) y[basis_[i]] = at(i, width_ - 1);
    }
    return y;
  }
  std::vector<double> dual() const {
    std::vector<double> x(m_);
    for (int i = 0; i < m_; ++i) x[i] = at(m_, n_ + i);
    return x;
  }

 private:
  double& at(int i, int j) { return cells_[static_cast<std::size_t>(i) * width_ + j]; }
  double at(int i, int j) const {
    return cells_[static_cast<std::size_t>(i) * width_ + j];
  }

  void Pivot(int row, int col) {
    const double p = at(row, col);
    for (int j = 0; j < width_; ++j) at(row, j) /= p;
    for (int i = 0; i <= m_; ++i) {
      if (i == row) continue;
      const double f = at(i, col);
      if (f == 0.0) continue;
      for (int j = 0; j < width_; ++j) at(i, j) -= f * at(row, j);
    }
    basis_[row] = col;
  }

  int m_, n_, width_;
  std::vector<double> cells_;
  std::vector<int> basis_;
};

std::vector<double> Normalized(std::vector<double> v) {
  double sum = 0.0;
  for (double& x : v) {
    x = std::max(0.0, x);
    sum += x;
  }
  for (double& x : v) x /= sum;
  return v;
}

}  // namespace

MatrixGameSolution SolveMatrixGame(std::span<const double> matrix, int rows,
                                   int cols) {
  if (rows <= 0 || cols <= 0 ||
      matrix.size() != static_cast<std::size_t>(rows) * cols) {
    Fail(ErrorCode::kInvalidArgument, "matrix game has inconsistent shape");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : matrix) {
    if (!std::isfinite(x)) {
      Fail(ErrorCode::kNumericalFailure, "matrix game has non-finite entry");
    }
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (hi - lo <= 1e-15 * std::max(1.0, std::abs(hi))) {
    return {std::vector<double>(rows, 1.0 / rows),
            std::vector<double>(cols, 1.0 / cols), matrix[0]};
  }

  // Shift so every entry is >= 1; the game value shifts by the same amount.
  const double shift = 1.0 - lo;
  std::vector<double> shifted(matrix.begin(), matrix.end());
  for (double& x : shifted) x += shift;

  Tableau tableau(shifted, rows, cols);
  if (!tableau.Solve(50 * (rows + cols) + 100)) {
    Fail(ErrorCode::kNumericalFailure, "simplex did not converge");
  }
  const double z = tableau.objective();
  if (!(z > 0.0)) Fail(ErrorCode::kNumericalFailure, "degenerate LP optimum");

  MatrixGameSolution sol;
  sol.col_strategy = Normalized(tableau.primal());
  sol.row_strategy = Normalized(tableau.dual());
  sol.value = 1.0 / z - shift;

  double lower = std::numeric_limits<double>::infinity();
  for (int j = 0; j < cols; ++j) {
    double payoff = 0.0;
    for (int i = 0; i < rows; ++i) payoff += sol.row_strategy[i] * matrix[i * cols + j];
    lower = std::min(lower, payoff);
  }
  double upper = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < rows; ++i) {
    double payoff = 0.0;
    for (int j = 0; j < cols; ++j) payoff += matrix[i * cols + j] * sol.col_strategy[j];
    upper = std::max(upper, payoff);
  }
  if (lower < sol.value - kSaddleTolerance || upper > sol.value + kSaddleTolerance) {
    Fail(ErrorCode::kNumericalFailure,
         "matrix game saddle certificate failed (gap " +
             std::to_string(upper - lower) + ")");
  }
  return sol;
}

}  // namespace mgope

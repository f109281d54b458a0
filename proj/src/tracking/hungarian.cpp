#include "hiper/tracking/hungarian.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace hiper::tracking {

std::vector<int> solve_assignment(const std::vector<double>& cost, int rows, int cols) {
  if (rows < 0 || cols < 0 || cost.size() != static_cast<size_t>(rows) * cols)
    throw std::invalid_argument("solve_assignment: bad matrix shape");
  if (rows == 0 || cols == 0) return std::vector<int>(rows, -1);

  // Pad to square. Dummy pairs cost more than any feasible pair but far
  // less than a forbidden one, so unmatchable rows fall on dummies.
  const int n = std::max(rows, cols);
  const double pad = 1e9;
  std::vector<double> a(static_cast<size_t>(n + 1) * (n + 1), pad);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      a[static_cast<size_t>(i + 1) * (n + 1) + (j + 1)] = cost[static_cast<size_t>(i) * cols + j];

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a[static_cast<size_t>(i0) * (n + 1) + j] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(rows, -1);
  for (int j = 1; j <= n; ++j) {
    const int i = p[j];
    if (i >= 1 && i <= rows && j <= cols) {
      if (cost[static_cast<size_t>(i - 1) * cols + (j - 1)] < kInfeasible)
        row_to_col[i - 1] = j - 1;
    }
  }
  return row_to_col;
}

}  // namespace hiper::tracking

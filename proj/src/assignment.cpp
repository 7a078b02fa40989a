#include "courtmot/assignment.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace courtmot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Hungarian algorithm with potentials, n <= m. Assigns every row.
std::vector<int> hungarian(const std::vector<std::vector<double>>& a, int n, int m) {
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
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
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j)
    if (p[j] >= 1) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace

AssignmentResult solve_assignment(const std::vector<std::vector<double>>& cost,
                                  const std::vector<std::vector<char>>& allowed) {
  const int n = static_cast<int>(cost.size());
  const int m = n > 0 ? static_cast<int>(cost[0].size()) : 0;
  AssignmentResult res;
  res.row_to_col.assign(n, -1);
  res.col_to_row.assign(m, -1);
  if (n == 0 || m == 0) return res;

  auto is_allowed = [&](int i, int j) {
    return allowed.empty() ? true : allowed[i][j] != 0;
  };

  // Forbidden pairs get a cost one order above anything a full valid
  // assignment could reach, so cardinality dominates cost.
  double scale = 0.0;
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(cost[i].size()) != m)
      throw std::invalid_argument("assignment: ragged cost matrix");
    for (int j = 0; j < m; ++j) {
      if (!std::isfinite(cost[i][j]))
        throw std::invalid_argument("assignment: non-finite cost");
      if (is_allowed(i, j)) scale = std::max(scale, std::abs(cost[i][j]));
    }
  }
  const double big = 2.0 * scale * std::max(n, m) + 1.0;

  const bool transposed = n > m;
  const int rows = transposed ? m : n;
  const int cols = transposed ? n : m;
  std::vector<std::vector<double>> a(rows, std::vector<double>(cols));
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const int ci = transposed ? j : i;
      const int cj = transposed ? i : j;
      a[i][j] = is_allowed(ci, cj) ? cost[ci][cj] : big;
    }

  std::vector<int> rc = hungarian(a, rows, cols);
  for (int i = 0; i < rows; ++i) {
    int j = rc[i];
    if (j < 0) continue;
    const int ci = transposed ? j : i;
    const int cj = transposed ? i : j;
    if (!is_allowed(ci, cj)) continue;
    res.row_to_col[ci] = cj;
    res.col_to_row[cj] = ci;
    res.total_cost += cost[ci][cj];
    ++res.matched;
  }
  return res;
}

}  // namespace courtmot

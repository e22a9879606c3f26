// Maximum-weight bipartite assignment (Kuhn-Munkres with potentials).
#pragma once

#include <Eigen/Core>

#include <limits>
#include <vector>

namespace coref {

/// Optimal assignment maximizing the summed weight of an r x c matrix.
/// Returns, for every row, the matched column or -1 when r > c leaves it free.
template <typename Scalar>
std::vector<int> max_weight_assignment(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& weights) {
  const int rows = static_cast<int>(weights.rows());
  const int cols = static_cast<int>(weights.cols());
  std::vector<int> match(static_cast<std::size_t>(rows), -1);
  if (rows == 0 || cols == 0) return match;

  // Square cost matrix, padded with zeros, solved as a minimization of -w.
  const int n = std::max(rows, cols);
  auto cost = [&](int i, int j) -> Scalar {
    return (i < rows && j < cols) ? -weights(i, j) : Scalar(0);
  };
  const Scalar inf = std::numeric_limits<Scalar>::max();
  std::vector<Scalar> u(n + 1, Scalar(0)), v(n + 1, Scalar(0));
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<Scalar> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      Scalar delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const Scalar cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
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
  for (int j = 1; j <= n; ++j)
    if (p[j] - 1 < rows && j - 1 < cols) match[p[j] - 1] = j - 1;
  return match;
}

/// Summed weight of the optimal assignment.
template <typename Scalar>
Scalar max_assignment_value(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& weights) {
  const auto match = max_weight_assignment(weights);
  Scalar total(0);
  for (int i = 0; i < static_cast<int>(match.size()); ++i)
    if (match[i] >= 0) total += weights(i, match[i]);
  return total;
}

}  // namespace coref

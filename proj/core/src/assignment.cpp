#include <limits>
#include <string>

#include "gaussot/oracle.hpp"

namespace gaussot {

Assignment solve_assignment(const Matrix& cost) {
  if (cost.rows() != cost.cols()) throw Error(ErrorKind::InvalidInput, "assignment cost matrix must be square");
  if (!cost.allFinite()) throw Error(ErrorKind::InvalidInput, "assignment cost matrix has non-finite entries");
  const Index n = cost.rows();
  const double inf = std::numeric_limits<double>::infinity();

  // 1-based potentials; column 0 is the virtual source of each augmentation.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<Index> match(n + 1, 0), way(n + 1, 0);
  for (Index row = 1; row <= n; ++row) {
    match[0] = row;
    Index col0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[col0] = 1;
      const Index i0 = match[col0];
      double delta = inf;
      Index col1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (reduced < minv[j]) {
          minv[j] = reduced;
          way[j] = col0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          col1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const Index col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  Assignment out;
  out.column_of_row.assign(static_cast<std::size_t>(n), 0);
  for (Index j = 1; j <= n; ++j) out.column_of_row[static_cast<std::size_t>(match[j] - 1)] = j - 1;
  for (Index i = 0; i < n; ++i) out.total_cost += cost(i, out.column_of_row[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace gaussot

#include "icd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "icd/errors.hpp"
#include "icd/partition.hpp"

namespace icd {

std::vector<int> max_weight_assignment(const MatrixXd& weights) {
  const Index n = weights.rows();
  if (weights.cols() != n) throw InputError("assignment matrix must be square");
  if (n == 0) return {};
  // Minimise cost = max - w. Rows/cols are 1-based inside the solver, with
  // column 0 acting as the virtual source.
  const double top = weights.maxCoeff();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<Index> match(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (Index row = 1; row <= n; ++row) {
    match[0] = row;
    Index col0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[col0] = 1;
      const Index r = match[col0];
      double delta = inf;
      Index col1 = 0;
      for (Index c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double cur = (top - weights(r - 1, c - 1)) - u[r] - v[c];
        if (cur < minv[c]) {
          minv[c] = cur;
          way[c] = col0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          col1 = c;
        }
      }
      for (Index c = 0; c <= n; ++c) {
        if (used[c]) {
          u[match[c]] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
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
  std::vector<int> assignment(n, -1);
  for (Index c = 1; c <= n; ++c) assignment[match[c] - 1] = static_cast<int>(c - 1);
  return assignment;
}

namespace {

void check_same_size(const Partition& a, const Partition& b) {
  if (a.num_nodes() != b.num_nodes()) {
    throw InputError("partitions cover " + std::to_string(a.num_nodes()) + " and " +
                     std::to_string(b.num_nodes()) + " nodes");
  }
}

double entropy(const std::vector<Index>& sizes, double n) {
  double h = 0.0;
  for (Index s : sizes) {
    if (s > 0) h -= (s / n) * std::log(s / n);
  }
  return h;
}

}  // namespace

MatrixXd contingency(const Partition& a, const Partition& b) {
  check_same_size(a, b);
  MatrixXd table = MatrixXd::Zero(a.num_communities(), b.num_communities());
  for (Index i = 0; i < a.num_nodes(); ++i) table(a[i], b[i]) += 1.0;
  return table;
}

double nmi(const Partition& truth, const Partition& result) {
  const MatrixXd table = contingency(truth, result);
  const double n = static_cast<double>(truth.num_nodes());
  const double h_truth = entropy(truth.community_sizes(), n);
  const double h_result = entropy(result.community_sizes(), n);
  if (h_truth == 0.0 && h_result == 0.0) return 1.0;
  if (h_truth == 0.0 || h_result == 0.0) return 0.0;
  const VectorXd rows = table.rowwise().sum();
  const VectorXd cols = table.colwise().sum().transpose();
  double mutual = 0.0;
  for (Index r = 0; r < table.rows(); ++r) {
    for (Index s = 0; s < table.cols(); ++s) {
      const double nrs = table(r, s);
      if (nrs == 0.0) continue;
      mutual += (nrs / n) * std::log(n * nrs / (rows[r] * cols[s]));
    }
  }
  return std::clamp(2.0 * mutual / std::abs(h_truth + h_result), 0.0, 1.0);
}

double accuracy(const Partition& truth, const Partition& result) {
  const MatrixXd table = contingency(result, truth);
  const Index k = std::max(table.rows(), table.cols());
  MatrixXd square = MatrixXd::Zero(k, k);
  square.topLeftCorner(table.rows(), table.cols()) = table;
  const auto map = max_weight_assignment(square);
  double matched = 0.0;
  for (Index r = 0; r < k; ++r) matched += square(r, map[r]);
  return matched / static_cast<double>(truth.num_nodes());
}

}  // namespace icd

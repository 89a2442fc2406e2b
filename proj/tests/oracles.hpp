#pragma once

// Brute-force reference implementations used as test oracles. Everything
// here works on dense matrices and explicit loops so it shares no code
// path with the library under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "icd/eigen_types.hpp"
#include "icd/graph.hpp"
#include "icd/partition.hpp"

namespace icd::oracle {

using Rng = std::mt19937_64;

inline Graph random_graph(int n, double p, Rng& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (coin(rng)) edges.emplace_back(i, j);
    }
  }
  return Graph::build(n, edges);
}

// Random graph guaranteed to have at least one edge and, optionally, no
// isolated node (a random spanning path is added).
inline Graph random_connected_graph(int n, double p, Rng& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(order[i], order[i + 1]);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (coin(rng)) edges.emplace_back(i, j);
    }
  }
  return Graph::build(n, edges);
}

inline std::vector<int> random_labels(int n, int k, Rng& rng) {
  std::uniform_int_distribution<int> pick(0, k - 1);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (auto& l : labels) l = pick(rng);
  return labels;
}

inline MatrixXd dense_adjacency(const Graph& g) {
  const Index n = g.num_nodes();
  MatrixXd a = MatrixXd::Zero(n, n);
  for (const auto& [u, v] : g.edges()) {
    a(u, v) = 1.0;
    a(v, u) = 1.0;
  }
  return a;
}

// Double sum over all node pairs sharing a label.
inline double modularity(const MatrixXd& a, const std::vector<int>& labels) {
  const Index n = a.rows();
  std::vector<double> d(static_cast<std::size_t>(n), 0.0);
  double two_e = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) d[i] += a(i, j);
    two_e += d[i];
  }
  double q = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (labels[i] == labels[j]) q += a(i, j) - d[i] * d[j] / two_e;
    }
  }
  return q / two_e;
}

// (1/2) sum over communities of cut / volume, by pair loops.
inline double ncut(const MatrixXd& a, const std::vector<int>& labels) {
  std::map<int, double> cut, vol;
  const Index n = a.rows();
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      vol[labels[i]] += a(i, j);
      if (labels[i] != labels[j]) cut[labels[i]] += a(i, j);
    }
  }
  double s = 0.0;
  for (const auto& [c, v] : vol) s += cut[c] / v;
  return 0.5 * s;
}

// Calls f for every 2-partition of n nodes with node 0 fixed in block 0
// (both blocks nonempty).
inline void for_each_bipartition(int n, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << (n - 1)); ++mask) {
    labels[0] = 0;
    for (int i = 1; i < n; ++i) labels[i] = static_cast<int>((mask >> (i - 1)) & 1u);
    f(labels);
  }
}

// NMI from an explicitly counted contingency table, natural log.
inline double nmi(const std::vector<int>& a, const std::vector<int>& b) {
  const double n = static_cast<double>(a.size());
  std::map<int, double> na, nb;
  std::map<std::pair<int, int>, double> nab;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na[a[i]] += 1;
    nb[b[i]] += 1;
    nab[{a[i], b[i]}] += 1;
  }
  double mi = 0.0;
  for (const auto& [rs, c] : nab) {
    mi += c / n * std::log(c * n / (na[rs.first] * nb[rs.second]));
  }
  double ha = 0.0, hb = 0.0;
  for (const auto& [r, c] : na) ha -= c / n * std::log(c / n);
  for (const auto& [s, c] : nb) hb -= c / n * std::log(c / n);
  if (ha == 0.0 && hb == 0.0) return 1.0;
  if (ha == 0.0 || hb == 0.0) return 0.0;
  return 2.0 * mi / (ha + hb);
}

// Best total weight over all permutations of a square matrix.
inline double best_assignment_weight(const MatrixXd& w) {
  std::vector<int> perm(static_cast<std::size_t>(w.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  double best = -std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (Index i = 0; i < w.rows(); ++i) s += w(i, perm[i]);
    best = std::max(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Best mapped accuracy over all injective result->truth label maps.
inline double accuracy(const std::vector<int>& truth, const std::vector<int>& result) {
  const int kt = *std::max_element(truth.begin(), truth.end()) + 1;
  const int kr = *std::max_element(result.begin(), result.end()) + 1;
  const int k = std::max(kt, kr);
  MatrixXd w = MatrixXd::Zero(k, k);
  for (std::size_t i = 0; i < truth.size(); ++i) w(result[i], truth[i]) += 1.0;
  return best_assignment_weight(w) / static_cast<double>(truth.size());
}

// Quotient-graph weights recomputed from scratch: sum of w(i,j) over edges
// whose endpoints land in different groups.
inline std::map<std::pair<int, int>, double> quotient_weights(
    const std::map<std::pair<int, int>, double>& edges, const std::vector<int>& group) {
  std::map<std::pair<int, int>, double> out;
  for (const auto& [e, w] : edges) {
    int a = group[e.first], b = group[e.second];
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    out[{a, b}] += w;
  }
  return out;
}

inline double inertia(const MatrixXd& points, const std::vector<int>& labels, int k) {
  MatrixXd centroids = MatrixXd::Zero(k, points.cols());
  std::vector<double> count(static_cast<std::size_t>(k), 0.0);
  for (Index i = 0; i < points.rows(); ++i) {
    centroids.row(labels[i]) += points.row(i);
    count[labels[i]] += 1.0;
  }
  for (int c = 0; c < k; ++c) {
    if (count[c] > 0) centroids.row(c) /= count[c];
  }
  double s = 0.0;
  for (Index i = 0; i < points.rows(); ++i) {
    s += (points.row(i) - centroids.row(labels[i])).squaredNorm();
  }
  return s;
}

// Minimum 2-means inertia by enumerating every bipartition.
inline double best_two_means_inertia(const MatrixXd& points) {
  double best = std::numeric_limits<double>::infinity();
  for_each_bipartition(static_cast<int>(points.rows()), [&](const std::vector<int>& labels) {
    best = std::min(best, inertia(points, labels, 2));
  });
  return best;
}

// The 8-node running example: two 4-node groups with a diagonal each and a
// single bridge (3, 4).
inline Graph running_example() {
  const std::vector<Edge> edges{{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2},
                                {7, 6}, {6, 5}, {5, 4}, {4, 7}, {7, 5}, {3, 4}};
  return Graph::build(8, edges);
}

inline Graph two_triangles(bool bridged) {
  std::vector<Edge> edges{{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}};
  if (bridged) edges.emplace_back(2, 3);
  return Graph::build(6, edges);
}

}  // namespace icd::oracle

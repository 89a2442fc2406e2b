#include "icd/coarsen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "icd/errors.hpp"
#include "icd/graph.hpp"

namespace icd {

LevelEdges supergraph_weights(const LevelEdges& edges, const std::vector<int>& parent) {
  LevelEdges next;
  for (const auto& [key, w] : edges) {
    int a = parent[key.first];
    int b = parent[key.second];
    if (a == b) continue;
    next[{std::min(a, b), std::max(a, b)}] += w;
  }
  return next;
}

namespace {

struct WeightedEdge {
  int a, b;
  double w;
};

CoarseningMap finish(std::vector<std::vector<int>> groups, Index n, int levels) {
  for (auto& grp : groups) std::sort(grp.begin(), grp.end());
  std::sort(groups.begin(), groups.end(),
            [](const auto& x, const auto& y) { return x.front() < y.front(); });
  CoarseningMap map;
  map.levels = levels;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(n);
  for (std::size_t j = 0; j < groups.size(); ++j) {
    const double c = 1.0 / std::sqrt(static_cast<double>(groups[j].size()));
    for (int i : groups[j]) triplets.emplace_back(i, static_cast<int>(j), c);
  }
  map.matrix.resize(n, static_cast<Index>(groups.size()));
  map.matrix.setFromTriplets(triplets.begin(), triplets.end());
  map.matrix.makeCompressed();
  map.supernodes = std::move(groups);
  return map;
}

}  // namespace

CoarseningMap hem_coarsen(const Graph& g, const StructMatrix& x, Index L) {
  if (L < 1) throw InputError("coarsening target L must be at least 1");
  const Index n = g.num_nodes();
  if (x.rows() != n) throw InputError("structural matrix does not match graph size");

  // Level-k state: members of each current supernode plus weighted edges.
  std::vector<std::vector<int>> groups(n);
  for (Index i = 0; i < n; ++i) groups[i] = {static_cast<int>(i)};
  if (n <= L) return finish(std::move(groups), n, 0);

  LevelEdges edges;
  for (auto [a, b] : g.edges()) edges[{a, b}] = x.coeff(a, b);

  Index remaining = n;
  int level = 0;
  while (remaining > L) {
    std::vector<WeightedEdge> queue;
    queue.reserve(edges.size());
    for (const auto& [key, w] : edges) queue.push_back({key.first, key.second, w});
    // Keys are already (min, max) ascending, so a stable sort by weight
    // keeps the lexicographic tie-break.
    std::stable_sort(queue.begin(), queue.end(),
                     [](const WeightedEdge& p, const WeightedEdge& q) { return p.w > q.w; });

    const int count = static_cast<int>(groups.size());
    std::vector<int> parent(count, -1);
    std::vector<std::vector<int>> next;
    bool done = false;
    for (const auto& e : queue) {
      if (parent[e.a] >= 0 || parent[e.b] >= 0) continue;
      parent[e.a] = parent[e.b] = static_cast<int>(next.size());
      std::vector<int> merged = groups[e.a];
      merged.insert(merged.end(), groups[e.b].begin(), groups[e.b].end());
      next.push_back(std::move(merged));
      if (--remaining == L) {
        done = true;
        break;
      }
    }

    if (next.empty()) {
      // No edge left at this level; merge the two smallest supernodes.
      std::vector<int> order(count);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](int p, int q) {
        return std::make_tuple(groups[p].size(), p) < std::make_tuple(groups[q].size(), q);
      });
      const int a = order[0], b = order[1];
      parent[a] = parent[b] = 0;
      std::vector<int> merged = groups[a];
      merged.insert(merged.end(), groups[b].begin(), groups[b].end());
      next.push_back(std::move(merged));
      --remaining;
      done = remaining == L;
    }

    // Unmatched supernodes carry over in id order.
    for (int v = 0; v < count; ++v) {
      if (parent[v] < 0) {
        parent[v] = static_cast<int>(next.size());
        next.push_back(std::move(groups[v]));
      }
    }
    groups = std::move(next);
    ++level;
    if (done) break;
    edges = supergraph_weights(edges, parent);
  }
  return finish(std::move(groups), n, level);
}

FeatureMatrix extract_features(const Graph& g, const StructMatrix& x, Index L) {
  const Index n = g.num_nodes();
  if (x.rows() != n) throw InputError("structural matrix does not match graph size");
  FeatureMatrix z;
  z.source = x.kind() == StructKind::Modularity ? FeatureSource::Modularity
                                                : FeatureSource::NormAdj;
  if (n <= L) {
    z.values = MatrixXd::Zero(n, L);
    if (x.is_dense()) {
      z.values.leftCols(n) = x.dense();
    } else {
      z.values.leftCols(n) = MatrixXd(x.sparse());
    }
    return z;
  }
  const CoarseningMap map = hem_coarsen(g, x, L);
  z.values = MatrixXd::Zero(n, L);
  // Column j accumulates C_ij * X[:, i] over the members of supernode j.
  for (Index j = 0; j < L; ++j) {
    const double c = 1.0 / std::sqrt(static_cast<double>(map.supernodes[j].size()));
    for (int i : map.supernodes[j]) {
      if (x.is_dense()) {
        z.values.col(j) += c * x.dense().col(i);
      } else {
        // X is symmetric, so row i of the row-major sparse matrix is column i.
        for (SparseXd::InnerIterator it(x.sparse(), i); it; ++it) {
          z.values(it.col(), j) += c * it.value();
        }
      }
    }
  }
  return z;
}

FeatureMatrix constant_features(Index n, Index L) {
  return {MatrixXd::Ones(n, L), FeatureSource::Constant};
}

}  // namespace icd

#pragma once

#include <map>
#include <utility>
#include <vector>

#include "icd/eigen_types.hpp"
#include "icd/structure.hpp"

namespace icd {

class Graph;

// Output of heavy-edge-matching coarsening: L supernodes that partition the
// node set, and the N x L coarsening matrix C with C_ij = |v_j|^{-1/2} for
// members of supernode j. C^T C = I_L.
struct CoarseningMap {
  std::vector<std::vector<int>> supernodes;  // sorted members, ordered by smallest member
  SparseXd matrix;
  int levels = 0;

  Index num_supernodes() const { return static_cast<Index>(supernodes.size()); }
};

// Weighted edge set of one coarsening level, keyed by (min id, max id).
using LevelEdges = std::map<std::pair<int, int>, double>;

// Maps level-k edges onto level-(k+1) ids given `parent[v]` for each level-k
// node. Parallel edges are summed; edges whose endpoints share a parent are
// dropped.
LevelEdges supergraph_weights(const LevelEdges& edges, const std::vector<int>& parent);

// Multilevel heavy-edge matching with edge weights w(i,j) = X_ij over the
// edges of g. Merging stops as soon as exactly L supernodes remain, which
// may happen mid-level. N <= L gives the identity map. Equal weights are
// broken by (min id, max id) ascending. When a level has no edges left but
// more than L supernodes remain, the two smallest supernodes (by size, then
// id) are merged until L remain.
CoarseningMap hem_coarsen(const Graph& g, const StructMatrix& x, Index L);

enum class FeatureSource { Modularity, NormAdj, Constant };

struct FeatureMatrix {
  MatrixXd values;  // N x L
  FeatureSource source = FeatureSource::Modularity;
};

// Z = X C for N > L, Z = [X, 0] for N <= L.
FeatureMatrix extract_features(const Graph& g, const StructMatrix& x, Index L);

// All-ones N x L block, used for the constant-feature ablation.
FeatureMatrix constant_features(Index n, Index L);

}  // namespace icd

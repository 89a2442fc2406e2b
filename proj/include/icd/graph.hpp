#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "icd/eigen_types.hpp"

namespace icd {

using NodeId = std::int32_t;
using Edge = std::pair<NodeId, NodeId>;

// Undirected simple graph. Immutable after construction; edges are stored
// once with first < second, sorted lexicographically.
class Graph {
 public:
  Graph() = default;

  // Deduplicates and symmetrizes `edges`. Self-loops are dropped.
  // Throws InputError for n == 0 or an endpoint outside [0, n).
  static Graph build(Index n, std::span<const Edge> edges);

  Index num_nodes() const { return n_; }
  Index num_edges() const { return static_cast<Index>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  // Symmetric 0/1 matrix, zero diagonal.
  const SparseXd& adjacency() const { return adjacency_; }
  const VectorXi& degrees() const { return degrees_; }
  int degree(Index i) const { return degrees_[i]; }

  // Neighbor ids of `i`, ascending.
  std::span<const int> neighbors(Index i) const {
    const auto* outer = adjacency_.outerIndexPtr();
    return {adjacency_.innerIndexPtr() + outer[i],
            static_cast<std::size_t>(outer[i + 1] - outer[i])};
  }

  bool has_isolated_nodes() const;

 private:
  Index n_ = 0;
  std::vector<Edge> edges_;
  SparseXd adjacency_;
  VectorXi degrees_;
};

// Edge-list text format: two whitespace-separated zero-based ids per line,
// '#' lines are comments, "# nodes <N>" fixes the node count.
Graph read_edge_list(std::istream& in);
Graph read_edge_list(const std::filesystem::path& path);
void write_edge_list(std::ostream& out, const Graph& g);
void write_edge_list(const std::filesystem::path& path, const Graph& g);

}  // namespace icd

#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "icd/eigen_types.hpp"

namespace icd {

class Graph;

// Disjoint assignment of N nodes to K nonempty communities. Labels are
// compacted on construction in order of first appearance, so community ids
// are always exactly [0, K).
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::span<const int> labels);
  explicit Partition(const std::vector<int>& labels)
      : Partition(std::span<const int>(labels)) {}

  Index num_nodes() const { return static_cast<Index>(labels_.size()); }
  int num_communities() const { return k_; }
  const std::vector<int>& labels() const { return labels_; }
  int operator[](Index i) const { return labels_[i]; }

  std::vector<Index> community_sizes() const;
  // Node ids of each community, ascending.
  std::vector<std::vector<int>> members() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<int> labels_;
  int k_ = 0;
};

// One integer community id per line, line i for node i.
Partition read_labels(std::istream& in);
Partition read_labels(const std::filesystem::path& path);
void write_labels(std::ostream& out, const Partition& p);
void write_labels(const std::filesystem::path& path, const Partition& p);

enum class IndicatorKind {
  BinaryR,      // one-hot rows
  ModularityH,  // same as BinaryR
  NcutH,        // sqrt(d_i / vol(C_r)) on members
};

// N x K membership indicator. NcutH needs the graph for degrees and throws
// InputError without one, DegenerateError on a zero-volume community.
MatrixXd indicator(const Partition& p, IndicatorKind kind, const Graph* g = nullptr);

// The label-induced graph A(g) = R R^T. It is kept implicit as per-community
// node blocks: every node is adjacent to every node of its own block,
// itself included.
class LabelInducedGraph {
 public:
  explicit LabelInducedGraph(Partition p);

  const Partition& partition() const { return partition_; }
  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  std::vector<Index> block_sizes() const;

  double operator()(Index i, Index j) const {
    return partition_[i] == partition_[j] ? 1.0 : 0.0;
  }

  // Dense R R^T. Throws CapabilityError when N exceeds `max_nodes`.
  MatrixXd dense(Index max_nodes = 4096) const;

  // Connected components of the off-diagonal support, computed by graph
  // search over the implicit adjacency. Component ids follow the smallest
  // member node.
  Partition components() const;

 private:
  Partition partition_;
  std::vector<std::vector<int>> blocks_;
};

// Connected components of an arbitrary dense 0/1 adjacency, by BFS.
Partition connected_components(const MatrixXd& adjacency);

}  // namespace icd

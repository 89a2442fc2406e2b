#include "icd/partition.hpp"

#include <cmath>
#include <deque>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "icd/errors.hpp"
#include "icd/graph.hpp"

namespace icd {

Partition::Partition(std::span<const int> labels) {
  labels_.reserve(labels.size());
  std::unordered_map<int, int> remap;
  for (int raw : labels) {
    auto [it, inserted] = remap.try_emplace(raw, static_cast<int>(remap.size()));
    labels_.push_back(it->second);
  }
  k_ = static_cast<int>(remap.size());
}

std::vector<Index> Partition::community_sizes() const {
  std::vector<Index> sizes(k_, 0);
  for (int c : labels_) ++sizes[c];
  return sizes;
}

std::vector<std::vector<int>> Partition::members() const {
  std::vector<std::vector<int>> out(k_);
  for (std::size_t i = 0; i < labels_.size(); ++i) out[labels_[i]].push_back(static_cast<int>(i));
  return out;
}

Partition read_labels(std::istream& in) {
  std::vector<int> labels;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    int c = 0;
    if (!(fields >> c)) {
      throw FormatError("label file line " + std::to_string(line_no) + ": expected an integer");
    }
    labels.push_back(c);
  }
  return Partition(labels);
}

Partition read_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open label file " + path.string());
  return read_labels(in);
}

void write_labels(std::ostream& out, const Partition& p) {
  for (int c : p.labels()) out << c << '\n';
}

void write_labels(const std::filesystem::path& path, const Partition& p) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write label file " + path.string());
  write_labels(out, p);
}

MatrixXd indicator(const Partition& p, IndicatorKind kind, const Graph* g) {
  const Index n = p.num_nodes();
  MatrixXd h = MatrixXd::Zero(n, p.num_communities());
  if (kind != IndicatorKind::NcutH) {
    for (Index i = 0; i < n; ++i) h(i, p[i]) = 1.0;
    return h;
  }
  if (g == nullptr) throw InputError("NcutH indicator requires the graph");
  if (g->num_nodes() != n) throw InputError("partition and graph sizes differ");
  std::vector<double> vol(p.num_communities(), 0.0);
  for (Index i = 0; i < n; ++i) vol[p[i]] += g->degree(i);
  for (std::size_t r = 0; r < vol.size(); ++r) {
    if (vol[r] <= 0.0) {
      throw DegenerateError("community " + std::to_string(r) + " has zero volume");
    }
  }
  for (Index i = 0; i < n; ++i) h(i, p[i]) = std::sqrt(g->degree(i) / vol[p[i]]);
  return h;
}

LabelInducedGraph::LabelInducedGraph(Partition p)
    : partition_(std::move(p)), blocks_(partition_.members()) {}

std::vector<Index> LabelInducedGraph::block_sizes() const {
  std::vector<Index> sizes;
  sizes.reserve(blocks_.size());
  for (const auto& b : blocks_) sizes.push_back(static_cast<Index>(b.size()));
  return sizes;
}

MatrixXd LabelInducedGraph::dense(Index max_nodes) const {
  const Index n = partition_.num_nodes();
  if (n > max_nodes) {
    throw CapabilityError("dense label-induced adjacency capped at " +
                          std::to_string(max_nodes) + " nodes");
  }
  MatrixXd a = MatrixXd::Zero(n, n);
  for (const auto& block : blocks_) {
    for (int i : block) {
      for (int j : block) a(i, j) = 1.0;
    }
  }
  return a;
}

Partition LabelInducedGraph::components() const {
  const Index n = partition_.num_nodes();
  std::vector<int> comp(n, -1);
  int next = 0;
  for (Index s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    // Neighbors of a node are its whole block, so one block scan per
    // visited node is enough; visit each block at most once.
    std::deque<int> queue{static_cast<int>(s)};
    comp[s] = next;
    std::vector<bool> block_done(blocks_.size(), false);
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      int b = partition_[v];
      if (block_done[b]) continue;
      block_done[b] = true;
      for (int u : blocks_[b]) {
        if (u != v && (*this)(v, u) != 0.0 && comp[u] < 0) {
          comp[u] = next;
          queue.push_back(u);
        }
      }
    }
    ++next;
  }
  return Partition(comp);
}

Partition connected_components(const MatrixXd& adjacency) {
  const Index n = adjacency.rows();
  if (adjacency.cols() != n) throw InputError("adjacency must be square");
  std::vector<int> comp(n, -1);
  int next = 0;
  for (Index s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    std::deque<Index> queue{s};
    comp[s] = next;
    while (!queue.empty()) {
      Index v = queue.front();
      queue.pop_front();
      for (Index u = 0; u < n; ++u) {
        if (u != v && adjacency(v, u) != 0.0 && comp[u] < 0) {
          comp[u] = next;
          queue.push_back(u);
        }
      }
    }
    ++next;
  }
  return Partition(comp);
}

}  // namespace icd

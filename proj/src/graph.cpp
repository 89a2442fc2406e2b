#include "icd/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "icd/errors.hpp"

namespace icd {

Graph Graph::build(Index n, std::span<const Edge> edges) {
  if (n <= 0) throw InputError("graph must have at least one node");
  Graph g;
  g.n_ = n;
  g.edges_.reserve(edges.size());
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n || b >= n) {
      throw InputError("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                       ") has an endpoint outside [0, " + std::to_string(n) + ")");
    }
    if (a == b) continue;
    g.edges_.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(g.edges_.begin(), g.edges_.end());
  g.edges_.erase(std::unique(g.edges_.begin(), g.edges_.end()), g.edges_.end());

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * g.edges_.size());
  g.degrees_ = VectorXi::Zero(n);
  for (auto [a, b] : g.edges_) {
    triplets.emplace_back(a, b, 1.0);
    triplets.emplace_back(b, a, 1.0);
    ++g.degrees_[a];
    ++g.degrees_[b];
  }
  g.adjacency_.resize(n, n);
  g.adjacency_.setFromTriplets(triplets.begin(), triplets.end());
  g.adjacency_.makeCompressed();
  return g;
}

bool Graph::has_isolated_nodes() const {
  return (degrees_.array() == 0).any();
}

Graph read_edge_list(std::istream& in) {
  std::vector<Edge> edges;
  Index declared = -1;
  Index max_id = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      std::istringstream header(line.substr(first + 1));
      std::string key;
      Index value = 0;
      if (header >> key >> value && key == "nodes") declared = value;
      continue;
    }
    std::istringstream fields(line);
    long long a = 0, b = 0;
    if (!(fields >> a >> b)) {
      throw FormatError("edge list line " + std::to_string(line_no) +
                        ": expected two integer node ids");
    }
    if (a < 0 || b < 0) {
      throw InputError("edge list line " + std::to_string(line_no) +
                       ": negative node id");
    }
    edges.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
    max_id = std::max<Index>(max_id, std::max(a, b));
  }
  Index n = declared >= 0 ? declared : max_id + 1;
  return Graph::build(n, edges);
}

Graph read_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open edge list " + path.string());
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# nodes " << g.num_nodes() << '\n';
  for (auto [a, b] : g.edges()) out << a << ' ' << b << '\n';
}

void write_edge_list(const std::filesystem::path& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write edge list " + path.string());
  write_edge_list(out, g);
}

}  // namespace icd

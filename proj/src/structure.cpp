#include "icd/structure.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "icd/errors.hpp"
#include "icd/graph.hpp"
#include "icd/partition.hpp"

namespace icd {

StructMatrix StructMatrix::from_dense(StructKind kind, MatrixXd values) {
  StructMatrix m;
  m.kind_ = kind;
  m.dense_ = std::move(values);
  return m;
}

StructMatrix StructMatrix::from_sparse(StructKind kind, SparseXd values) {
  StructMatrix m;
  m.kind_ = kind;
  m.sparse_ = std::move(values);
  m.sparse_.makeCompressed();
  return m;
}

MatrixXd StructMatrix::to_dense() const {
  if (is_dense()) return dense_;
  return MatrixXd(sparse_);
}

double StructMatrix::coeff(Index i, Index j) const {
  return is_dense() ? dense_(i, j) : sparse_.coeff(i, j);
}

namespace {

VectorXd inv_sqrt_degrees(const Graph& g, bool strict) {
  VectorXd out(g.num_nodes());
  for (Index i = 0; i < g.num_nodes(); ++i) {
    int d = g.degree(i);
    if (d == 0) {
      if (strict) throw DegenerateError("node " + std::to_string(i) + " is isolated");
      out[i] = 0.0;
    } else {
      out[i] = 1.0 / std::sqrt(static_cast<double>(d));
    }
  }
  return out;
}

void check_sizes(const Graph& g, const Partition& p) {
  if (p.num_nodes() != g.num_nodes()) {
    throw InputError("partition covers " + std::to_string(p.num_nodes()) +
                     " nodes, graph has " + std::to_string(g.num_nodes()));
  }
}

}  // namespace

StructMatrix modularity_matrix(const Graph& g) {
  if (g.num_edges() == 0) throw DegenerateError("modularity matrix of an edgeless graph");
  const VectorXd d = g.degrees().cast<double>();
  const double two_e = 2.0 * static_cast<double>(g.num_edges());
  MatrixXd q = MatrixXd(g.adjacency()) - d * d.transpose() / two_e;
  return StructMatrix::from_dense(StructKind::Modularity, std::move(q));
}

StructMatrix norm_adj(const Graph& g, bool strict) {
  const VectorXd s = inv_sqrt_degrees(g, strict);
  SparseXd m = s.asDiagonal() * g.adjacency() * s.asDiagonal();
  m.prune(0.0);
  return StructMatrix::from_sparse(StructKind::NormAdj, std::move(m));
}

StructMatrix norm_laplacian(const Graph& g, bool strict) {
  SparseXd m = norm_adj(g, strict).sparse();
  SparseXd eye(g.num_nodes(), g.num_nodes());
  eye.setIdentity();
  SparseXd l = eye - m;
  return StructMatrix::from_sparse(StructKind::NormLaplacian, std::move(l));
}

double modularity_score(const Graph& g, const Partition& p) {
  check_sizes(g, p);
  if (g.num_edges() == 0) throw DegenerateError("modularity of an edgeless graph");
  const double two_e = 2.0 * static_cast<double>(g.num_edges());
  double total = 0.0;
  for (const auto& members : p.members()) {
    for (int i : members) {
      for (int j : g.neighbors(i)) {
        if (p[j] == p[i]) total += 1.0;
      }
      for (int j : members) {
        total -= g.degree(i) * static_cast<double>(g.degree(j)) / two_e;
      }
    }
  }
  return total / two_e;
}

double ncut_score(const Graph& g, const Partition& p) {
  check_sizes(g, p);
  const int k = p.num_communities();
  std::vector<double> cut(k, 0.0), vol(k, 0.0);
  for (Index i = 0; i < g.num_nodes(); ++i) {
    vol[p[i]] += g.degree(i);
    for (int j : g.neighbors(i)) {
      if (p[j] != p[i]) cut[p[i]] += 1.0;
    }
  }
  double total = 0.0;
  for (int r = 0; r < k; ++r) {
    if (vol[r] <= 0.0) {
      throw DegenerateError("community " + std::to_string(r) + " has zero volume");
    }
    total += cut[r] / vol[r];
  }
  return 0.5 * total;
}

}  // namespace icd

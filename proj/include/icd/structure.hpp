#pragma once

#include "icd/eigen_types.hpp"

namespace icd {

class Graph;
class Partition;

enum class StructKind { Modularity, NormAdj, NormLaplacian };

// A structural matrix of a graph. Q is held dense; M and L sparse.
class StructMatrix {
 public:
  static StructMatrix from_dense(StructKind kind, MatrixXd values);
  static StructMatrix from_sparse(StructKind kind, SparseXd values);

  StructKind kind() const { return kind_; }
  bool is_dense() const { return dense_.size() > 0 || sparse_.size() == 0; }
  Index rows() const { return is_dense() ? dense_.rows() : sparse_.rows(); }

  const MatrixXd& dense() const { return dense_; }
  const SparseXd& sparse() const { return sparse_; }
  // Copy as a dense matrix regardless of storage.
  MatrixXd to_dense() const;
  double coeff(Index i, Index j) const;

 private:
  StructKind kind_ = StructKind::Modularity;
  MatrixXd dense_;
  SparseXd sparse_;
};

// Q_ij = A_ij - d_i d_j / (2e). Throws DegenerateError when e = 0.
StructMatrix modularity_matrix(const Graph& g);

// M = D^{-1/2} A D^{-1/2}. With `strict`, isolated nodes throw
// DegenerateError; otherwise their rows and columns are zero.
StructMatrix norm_adj(const Graph& g, bool strict = false);

// L = I - M.
StructMatrix norm_laplacian(const Graph& g, bool strict = false);

// (1/2e) sum_r sum_{i,j in C_r} [A_ij - d_i d_j / 2e], by the double sum
// over community members.
double modularity_score(const Graph& g, const Partition& p);

// (1/2) sum_r cut(C_r) / vol(C_r). Throws DegenerateError on a zero-volume
// community. Note tr(H^T L H) with the NcutH indicator equals 2 * ncut_score.
double ncut_score(const Graph& g, const Partition& p);

}  // namespace icd

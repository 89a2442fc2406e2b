#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace icd {

using Index = Eigen::Index;

template <typename Scalar>
using DenseMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using SparseMat = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

using MatrixXd = DenseMat<double>;
using VectorXd = DenseVec<double>;
using SparseXd = SparseMat<double>;
using VectorXi = Eigen::VectorXi;

}  // namespace icd

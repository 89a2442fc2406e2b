#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "icd/eigen_types.hpp"

namespace icd {
class Graph;
class LabelInducedGraph;
}  // namespace icd

namespace icd::nn {

using Rng = std::mt19937_64;

enum class Activation { Tanh, Relu, Sigmoid, None };

// Uniform entries in +-sqrt(6 / (rows + cols)).
MatrixXd xavier_init(Index rows, Index cols, Rng& rng);

// Symmetric propagation operator P = D^{-1/2} (A' + I) D^{-1/2}.
//
// For the original graph P is a sparse matrix. For the label-induced graph
// A' = R R^T (whose diagonal is already 1) every block of size s gives
// (P F)_i = (sum_{j in block} F_j + F_i) / (s + 1), applied without ever
// forming the N x N matrix.
class Propagation {
 public:
  static Propagation from_graph(const Graph& g);
  static Propagation from_labels(const LabelInducedGraph& lg);
  static Propagation identity(Index n);

  Index size() const { return n_; }
  MatrixXd apply(const MatrixXd& f) const;
  MatrixXd dense() const;

 private:
  struct Blocks {
    std::vector<std::vector<int>> members;
  };
  Index n_ = 0;
  std::variant<SparseXd, Blocks> op_;
};

// Values kept by a forward pass for the matching backward pass.
struct LayerCache {
  MatrixXd input;   // P F_in for GCN layers, F_in for dense layers
  MatrixXd output;  // post-activation
  MatrixXd pre;     // pre-activation (dense layers only)
  bool valid = false;
};

// One graph convolution: tanh(P F W).
struct GcnLayer {
  MatrixXd weight;

  MatrixXd forward(const Propagation& prop, const MatrixXd& in, LayerCache* cache = nullptr) const;
  // Adds dL/dW into `grad_w` and returns dL/dF_in. Throws StateError if the
  // cache does not hold a forward pass.
  MatrixXd backward(const Propagation& prop, const LayerCache& cache, const MatrixXd& upstream,
                    MatrixXd& grad_w) const;
};

// Fully connected layer: act(F W + 1 b^T).
struct DenseLayer {
  MatrixXd weight;
  MatrixXd bias;  // 1 x out
  Activation activation = Activation::Relu;

  MatrixXd forward(const MatrixXd& in, LayerCache* cache = nullptr) const;
  MatrixXd backward(const LayerCache& cache, const MatrixXd& upstream, MatrixXd& grad_w,
                    MatrixXd& grad_b) const;
};

MatrixXd activate(const MatrixXd& pre, Activation act);

// Adam with bias correction over an ordered list of parameter blocks.
class Adam {
 public:
  explicit Adam(double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                double epsilon = 1e-8)
      : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {}

  // Parameters and gradients are matched by position; shapes are fixed by
  // the first call.
  void step(std::span<MatrixXd* const> params, std::span<const MatrixXd> grads);

  long steps() const { return t_; }
  double learning_rate() const { return lr_; }
  const std::vector<MatrixXd>& first_moments() const { return m_; }
  const std::vector<MatrixXd>& second_moments() const { return v_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<MatrixXd> m_, v_;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t coordinates_checked = 0;
};

// Compares `analytic` against central differences of `loss` on a random
// subsample of at least `min_samples` coordinates (all coordinates when
// there are fewer). The relative error of one coordinate is
//   |a - n| / max(|a|, |n|, floor * max(1, |loss|)).
GradCheckResult grad_check(const std::function<double()>& loss,
                           std::span<MatrixXd* const> params,
                           std::span<const MatrixXd> analytic, double h, Rng& rng,
                           std::size_t min_samples = 200, double floor = 1e-6);

}  // namespace icd::nn

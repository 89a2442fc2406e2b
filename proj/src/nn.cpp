#include "icd/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "icd/errors.hpp"
#include "icd/graph.hpp"
#include "icd/partition.hpp"

namespace icd::nn {

MatrixXd xavier_init(Index rows, Index cols, Rng& rng) {
  if (rows <= 0 || cols <= 0) throw InputError("xavier_init needs positive dimensions");
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> unif(-bound, bound);
  MatrixXd w(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) w(i, j) = unif(rng);
  }
  return w;
}

Propagation Propagation::from_graph(const Graph& g) {
  const Index n = g.num_nodes();
  VectorXd s(n);
  for (Index i = 0; i < n; ++i) s[i] = 1.0 / std::sqrt(g.degree(i) + 1.0);
  SparseXd eye(n, n);
  eye.setIdentity();
  SparseXd a_hat = g.adjacency() + eye;
  Propagation p;
  p.n_ = n;
  SparseXd op = s.asDiagonal() * a_hat * s.asDiagonal();
  op.makeCompressed();
  p.op_ = std::move(op);
  return p;
}

Propagation Propagation::from_labels(const LabelInducedGraph& lg) {
  Propagation p;
  p.n_ = lg.partition().num_nodes();
  p.op_ = Blocks{lg.blocks()};
  return p;
}

Propagation Propagation::identity(Index n) {
  SparseXd eye(n, n);
  eye.setIdentity();
  Propagation p;
  p.n_ = n;
  p.op_ = std::move(eye);
  return p;
}

MatrixXd Propagation::apply(const MatrixXd& f) const {
  if (f.rows() != n_) throw InputError("propagation operand has the wrong number of rows");
  if (const auto* sparse = std::get_if<SparseXd>(&op_)) return (*sparse) * f;
  const auto& blocks = std::get<Blocks>(op_).members;
  MatrixXd out(f.rows(), f.cols());
  Eigen::RowVectorXd sum(f.cols());
  for (const auto& block : blocks) {
    sum.setZero();
    for (int i : block) sum += f.row(i);
    const double scale = 1.0 / (static_cast<double>(block.size()) + 1.0);
    for (int i : block) out.row(i) = (sum + f.row(i)) * scale;
  }
  return out;
}

MatrixXd Propagation::dense() const {
  return apply(MatrixXd::Identity(n_, n_));
}

MatrixXd activate(const MatrixXd& pre, Activation act) {
  switch (act) {
    case Activation::Tanh:
      return pre.array().tanh().matrix();
    case Activation::Relu:
      return pre.cwiseMax(0.0);
    case Activation::Sigmoid:
      return (1.0 / (1.0 + (-pre.array()).exp())).matrix();
    case Activation::None:
      return pre;
  }
  return pre;
}

MatrixXd GcnLayer::forward(const Propagation& prop, const MatrixXd& in, LayerCache* cache) const {
  if (in.cols() != weight.rows()) throw InputError("GCN layer input width mismatch");
  MatrixXd propagated = prop.apply(in);
  MatrixXd out = (propagated * weight).array().tanh().matrix();
  if (cache != nullptr) {
    cache->input = std::move(propagated);
    cache->output = out;
    cache->valid = true;
  }
  return out;
}

MatrixXd GcnLayer::backward(const Propagation& prop, const LayerCache& cache,
                            const MatrixXd& upstream, MatrixXd& grad_w) const {
  if (!cache.valid) throw StateError("GCN backward called without a forward cache");
  const MatrixXd local =
      (upstream.array() * (1.0 - cache.output.array().square())).matrix();
  if (grad_w.size() == 0) grad_w = MatrixXd::Zero(weight.rows(), weight.cols());
  grad_w.noalias() += cache.input.transpose() * local;
  // P is symmetric.
  return prop.apply(local * weight.transpose());
}

MatrixXd DenseLayer::forward(const MatrixXd& in, LayerCache* cache) const {
  if (in.cols() != weight.rows()) throw InputError("dense layer input width mismatch");
  MatrixXd pre = in * weight;
  pre.rowwise() += bias.row(0);
  MatrixXd out = activate(pre, activation);
  if (cache != nullptr) {
    cache->input = in;
    cache->pre = std::move(pre);
    cache->output = out;
    cache->valid = true;
  }
  return out;
}

MatrixXd DenseLayer::backward(const LayerCache& cache, const MatrixXd& upstream, MatrixXd& grad_w,
                              MatrixXd& grad_b) const {
  if (!cache.valid) throw StateError("dense backward called without a forward cache");
  MatrixXd local;
  switch (activation) {
    case Activation::Tanh:
      local = (upstream.array() * (1.0 - cache.output.array().square())).matrix();
      break;
    case Activation::Relu:
      local = (upstream.array() * (cache.pre.array() > 0.0).cast<double>()).matrix();
      break;
    case Activation::Sigmoid:
      local = (upstream.array() * cache.output.array() * (1.0 - cache.output.array())).matrix();
      break;
    case Activation::None:
      local = upstream;
      break;
  }
  if (grad_w.size() == 0) grad_w = MatrixXd::Zero(weight.rows(), weight.cols());
  if (grad_b.size() == 0) grad_b = MatrixXd::Zero(1, weight.cols());
  grad_w.noalias() += cache.input.transpose() * local;
  grad_b += local.colwise().sum();
  return local * weight.transpose();
}

void Adam::step(std::span<MatrixXd* const> params, std::span<const MatrixXd> grads) {
  if (params.size() != grads.size()) throw InputError("Adam: parameter/gradient count mismatch");
  if (m_.empty()) {
    for (const MatrixXd* p : params) {
      m_.push_back(MatrixXd::Zero(p->rows(), p->cols()));
      v_.push_back(MatrixXd::Zero(p->rows(), p->cols()));
    }
  }
  if (m_.size() != params.size()) throw InputError("Adam: parameter count changed");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    const MatrixXd& g = grads[k];
    if (g.rows() != m_[k].rows() || g.cols() != m_[k].cols()) {
      throw InputError("Adam: gradient shape does not match its parameter");
    }
    m_[k] = beta1_ * m_[k] + (1.0 - beta1_) * g;
    v_[k] = beta2_ * v_[k] + (1.0 - beta2_) * g.cwiseProduct(g);
    params[k]->array() -=
        lr_ * (m_[k].array() / c1) / ((v_[k].array() / c2).sqrt() + eps_);
  }
}

GradCheckResult grad_check(const std::function<double()>& loss,
                           std::span<MatrixXd* const> params,
                           std::span<const MatrixXd> analytic, double h, Rng& rng,
                           std::size_t min_samples, double floor) {
  if (params.size() != analytic.size()) throw InputError("grad_check: size mismatch");
  std::vector<std::pair<std::size_t, Index>> coords;
  for (std::size_t k = 0; k < params.size(); ++k) {
    for (Index i = 0; i < params[k]->size(); ++i) coords.emplace_back(k, i);
  }
  if (coords.size() > min_samples) {
    std::shuffle(coords.begin(), coords.end(), rng);
    coords.resize(min_samples);
  }
  const double base = loss();
  const double scale = floor * std::max(1.0, std::abs(base));
  GradCheckResult result;
  for (auto [k, i] : coords) {
    double& x = params[k]->data()[i];
    const double saved = x;
    x = saved + h;
    const double up = loss();
    x = saved - h;
    const double down = loss();
    x = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double a = analytic[k].data()[i];
    const double denom = std::max({std::abs(a), std::abs(numeric), scale});
    result.max_relative_error = std::max(result.max_relative_error, std::abs(a - numeric) / denom);
    ++result.coordinates_checked;
  }
  return result;
}

}  // namespace icd::nn

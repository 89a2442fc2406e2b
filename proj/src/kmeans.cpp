#include "icd/kmeans.hpp"

#include <limits>
#include <random>
#include <string>

#include "icd/errors.hpp"

namespace icd {

namespace {

using Rng = std::mt19937_64;

MatrixXd seed_plus_plus(const MatrixXd& x, int k, Rng& rng) {
  const Index n = x.rows();
  MatrixXd centers(k, x.cols());
  std::uniform_int_distribution<Index> first(0, n - 1);
  centers.row(0) = x.row(first(rng));
  VectorXd dist = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = dist.sum();
    Index chosen = 0;
    if (total <= 0.0) {
      chosen = first(rng);
    } else {
      std::uniform_real_distribution<double> unif(0.0, total);
      double target = unif(rng);
      for (chosen = 0; chosen < n - 1; ++chosen) {
        target -= dist[chosen];
        if (target < 0.0) break;
      }
    }
    centers.row(c) = x.row(chosen);
    dist = dist.cwiseMin((x.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

struct Run {
  std::vector<int> assign;
  MatrixXd centers;
  double inertia = 0.0;
  std::vector<double> trace;
};

double assign_points(const MatrixXd& x, const MatrixXd& centers, std::vector<int>& assign,
                     VectorXd& dist) {
  const Index n = x.rows();
  double inertia = 0.0;
  for (Index i = 0; i < n; ++i) {
    Index best = 0;
    dist[i] = (centers.rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff(&best);
    assign[i] = static_cast<int>(best);
    inertia += dist[i];
  }
  return inertia;
}

// Moves the farthest points into empty clusters. Returns true if anything moved.
bool repair_empty(const MatrixXd& x, int k, MatrixXd& centers, std::vector<int>& assign,
                  VectorXd& dist) {
  std::vector<Index> count(k, 0);
  for (int a : assign) ++count[a];
  bool moved = false;
  for (int c = 0; c < k; ++c) {
    if (count[c] > 0) continue;
    Index far = -1;
    for (Index i = 0; i < x.rows(); ++i) {
      if (count[assign[i]] > 1 && (far < 0 || dist[i] > dist[far])) far = i;
    }
    if (far < 0) break;
    --count[assign[far]];
    assign[far] = c;
    count[c] = 1;
    dist[far] = 0.0;
    centers.row(c) = x.row(far);
    moved = true;
  }
  return moved;
}

void update_centers(const MatrixXd& x, int k, const std::vector<int>& assign, MatrixXd& centers) {
  MatrixXd sums = MatrixXd::Zero(k, x.cols());
  std::vector<Index> count(k, 0);
  for (Index i = 0; i < x.rows(); ++i) {
    sums.row(assign[i]) += x.row(i);
    ++count[assign[i]];
  }
  for (int c = 0; c < k; ++c) {
    if (count[c] > 0) centers.row(c) = sums.row(c) / static_cast<double>(count[c]);
  }
}

double inertia_of(const MatrixXd& x, const MatrixXd& centers, const std::vector<int>& assign) {
  double total = 0.0;
  for (Index i = 0; i < x.rows(); ++i) total += (x.row(i) - centers.row(assign[i])).squaredNorm();
  return total;
}

Run lloyd(const MatrixXd& x, int k, int max_iterations, Rng& rng) {
  Run run;
  run.centers = seed_plus_plus(x, k, rng);
  run.assign.assign(x.rows(), -1);
  VectorXd dist(x.rows());
  std::vector<int> previous;
  for (int it = 0; it < max_iterations; ++it) {
    previous = run.assign;
    assign_points(x, run.centers, run.assign, dist);
    repair_empty(x, k, run.centers, run.assign, dist);
    if (run.assign == previous) break;
    update_centers(x, k, run.assign, run.centers);
    run.trace.push_back(inertia_of(x, run.centers, run.assign));
  }
  run.inertia = inertia_of(x, run.centers, run.assign);
  return run;
}

}  // namespace

KMeansResult kmeans(const MatrixXd& points, int k, const KMeansOptions& options) {
  const Index n = points.rows();
  if (k < 1 || k > n) {
    throw InputError("k-means needs 1 <= K <= N (K = " + std::to_string(k) +
                     ", N = " + std::to_string(n) + ")");
  }
  const int restarts = std::max(1, options.restarts);
  Rng rng(options.seed);
  KMeansResult out;
  Run best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Run run = lloyd(points, k, options.max_iterations, rng);
    out.restart_inertia.push_back(run.inertia);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  out.restarts_run = restarts;
  out.inertia = best.inertia;
  out.inertia_trace = std::move(best.trace);
  out.labels = Partition(best.assign);
  // Reorder centroid rows to the compacted label ids.
  out.centroids.resize(out.labels.num_communities(), points.cols());
  std::vector<bool> seen(k, false);
  for (Index i = 0; i < n; ++i) {
    const int raw = best.assign[i];
    if (!seen[raw]) {
      seen[raw] = true;
      out.centroids.row(out.labels[i]) = best.centers.row(raw);
    }
  }
  return out;
}

}  // namespace icd

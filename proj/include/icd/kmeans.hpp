#pragma once

#include <cstdint>
#include <vector>

#include "icd/eigen_types.hpp"
#include "icd/partition.hpp"

namespace icd {

struct KMeansOptions {
  int restarts = 10;
  int max_iterations = 300;
  std::uint64_t seed = 0;
};

struct KMeansResult {
  Partition labels;
  MatrixXd centroids;  // K x dim, row r belongs to community r of `labels`
  double inertia = 0.0;
  int restarts_run = 0;
  // Inertia after each Lloyd iteration of the winning restart.
  std::vector<double> inertia_trace;
  // Final inertia of every restart, in run order.
  std::vector<double> restart_inertia;
};

// Lloyd iterations from k-means++ seeds, best inertia over the restarts.
// Runs until the assignment no longer changes or max_iterations is hit.
// An empty cluster is reseeded at the point farthest from its centroid.
// Throws InputError unless 1 <= K <= N.
KMeansResult kmeans(const MatrixXd& points, int k, const KMeansOptions& options = {});

}  // namespace icd

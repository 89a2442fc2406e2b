#pragma once

#include <cstdint>
#include <utility>

#include "icd/graph.hpp"
#include "icd/partition.hpp"

namespace icd {

struct LabeledGraph {
  Graph graph;
  Partition truth;
};

// Planted-partition benchmark: K equal blocks, within-block pairs linked
// with probability p_in, cross pairs with (1 - p_in) / (K - 1).
struct GnSpec {
  Index n = 5000;
  int k = 250;
  double p_in = 0.4;
  std::uint64_t seed = 0;

  double p_out() const { return k > 1 ? (1.0 - p_in) / (k - 1) : 0.0; }
  // Expected number of edges under the two probabilities.
  double expected_edges() const;
};

LabeledGraph generate_gn(const GnSpec& spec);

// LFR-style power-law benchmark.
struct LfrSpec {
  Index n = 5000;
  // When n_max > n, N is drawn uniformly from [n, n_max] per graph.
  Index n_max = 0;
  double avg_degree = 10.0;
  int max_degree = 100;
  int min_community = 10;
  int max_community = 200;
  double mu = 0.3;
  double tau1 = 2.0;  // degree exponent
  double tau2 = 1.0;  // community-size exponent
  int rewire_sweeps = 100;
  std::uint64_t seed = 0;
};

LabeledGraph generate_lfr(const LfrSpec& spec);

// Mean over non-isolated nodes of (external degree / degree).
double realized_mixing(const Graph& g, const Partition& p);

}  // namespace icd

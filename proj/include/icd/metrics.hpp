#pragma once

#include <vector>

#include "icd/eigen_types.hpp"

namespace icd {

class Partition;

// Maximum-weight perfect assignment on a square matrix (Kuhn-Munkres with
// row/column potentials, O(n^3)). Returns column index for every row.
std::vector<int> max_weight_assignment(const MatrixXd& weights);

// K_a x K_b contingency table, entry (r, s) = |A_r ∩ B_s|.
MatrixXd contingency(const Partition& a, const Partition& b);

// Normalized mutual information with natural logs:
//   2 I(A;B) / (H(A) + H(B)).
// Returns 1 when both partitions are trivial and 0 when exactly one is.
double nmi(const Partition& truth, const Partition& result);

// Fraction of nodes whose result label maps onto the truth label under the
// best one-to-one community mapping.
double accuracy(const Partition& truth, const Partition& result);

}  // namespace icd

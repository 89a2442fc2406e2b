#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "icd/errors.hpp"
#include "icd/metrics.hpp"
#include "icd/partition.hpp"
#include "oracles.hpp"

using namespace icd;

namespace {

std::vector<int> permute_labels(const std::vector<int>& labels, oracle::Rng& rng) {
  const int k = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = perm[labels[i]];
  return out;
}

}  // namespace

TEST(PartitionType, CompactsLabels) {
  const Partition p(std::vector<int>{7, 3, 7, 9});
  EXPECT_EQ(p.num_communities(), 3);
  EXPECT_EQ(p.labels(), (std::vector<int>{0, 1, 0, 2}));
  EXPECT_EQ(p.community_sizes(), (std::vector<Index>{2, 1, 1}));
  EXPECT_EQ(p.members()[0], (std::vector<int>{0, 2}));
}

TEST(PartitionType, LabelFileRoundTrip) {
  const Partition p(std::vector<int>{0, 2, 2, 1, 0});
  std::stringstream buf;
  write_labels(buf, p);
  EXPECT_EQ(read_labels(buf), p);
  std::istringstream bad("0\nfoo\n");
  EXPECT_THROW(read_labels(bad), FormatError);
}

TEST(Indicator, BinaryOneHot) {
  const MatrixXd r = indicator(Partition(std::vector<int>{0, 1, 1}), IndicatorKind::BinaryR);
  MatrixXd expected(3, 2);
  expected << 1, 0, 0, 1, 0, 1;
  EXPECT_EQ(r, expected);
  EXPECT_EQ(indicator(Partition(std::vector<int>{0, 1, 1}), IndicatorKind::ModularityH), r);
}

TEST(Indicator, NcutOnPath) {
  const std::vector<Edge> edges{{0, 1}, {1, 2}};
  const Graph g = Graph::build(3, edges);
  const MatrixXd h = indicator(Partition(std::vector<int>{0, 0, 1}), IndicatorKind::NcutH, &g);
  EXPECT_NEAR(h(0, 0), std::sqrt(1.0 / 3.0), 1e-15);
  EXPECT_NEAR(h(1, 0), std::sqrt(2.0 / 3.0), 1e-15);
  EXPECT_EQ(h(2, 0), 0.0);
  EXPECT_EQ(h(0, 1), 0.0);
  EXPECT_EQ(h(1, 1), 0.0);
  EXPECT_EQ(h(2, 1), 1.0);
}

TEST(Indicator, NcutNeedsGraph) {
  EXPECT_THROW(indicator(Partition(std::vector<int>{0, 1}), IndicatorKind::NcutH), InputError);
}

TEST(Indicator, BinaryGramIsDiagonalOfSizes) {
  oracle::Rng rng(4);
  const Partition p(oracle::random_labels(40, 5, rng));
  const MatrixXd r = indicator(p, IndicatorKind::BinaryR);
  const MatrixXd gram = r.transpose() * r;
  const auto sizes = p.community_sizes();
  for (int a = 0; a < p.num_communities(); ++a) {
    for (int b = 0; b < p.num_communities(); ++b) {
      EXPECT_EQ(gram(a, b), a == b ? static_cast<double>(sizes[a]) : 0.0);
    }
  }
}

TEST(LabelInduced, RunningExampleHasTwoComponents) {
  const LabelInducedGraph lg(Partition(std::vector<int>{0, 0, 0, 0, 1, 1, 1, 1}));
  const Partition comps = lg.components();
  EXPECT_EQ(comps.num_communities(), 2);
  EXPECT_EQ(comps.members()[0], (std::vector<int>{0, 1, 2, 3}));
  EXPECT_EQ(comps.members()[1], (std::vector<int>{4, 5, 6, 7}));
  const MatrixXd a = lg.dense();
  for (int i = 0; i < 8; ++i) EXPECT_EQ(a(i, i), 1.0);
}

TEST(LabelInduced, SingleCommunityIsAllOnes) {
  const LabelInducedGraph lg(Partition(std::vector<int>(6, 0)));
  EXPECT_EQ(lg.dense(), MatrixXd::Ones(6, 6));
}

TEST(LabelInduced, DenseMatchesBlocks) {
  oracle::Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 5 + trial * 2;
    const Partition p(oracle::random_labels(n, 4, rng));
    const LabelInducedGraph lg(p);
    const MatrixXd r = indicator(p, IndicatorKind::BinaryR);
    const MatrixXd rrt = r * r.transpose();
    EXPECT_EQ(lg.dense(), rrt);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) EXPECT_EQ(lg(i, j), rrt(i, j));
    }
  }
}

TEST(LabelInduced, DenseCap) {
  const LabelInducedGraph lg(Partition(std::vector<int>(20, 0)));
  EXPECT_THROW(lg.dense(10), CapabilityError);
}

TEST(LabelInduced, ComponentsRoundTrip) {
  oracle::Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<int> ndist(1, 200), kdist(1, 20);
    const int n = ndist(rng);
    const Partition p(oracle::random_labels(n, kdist(rng), rng));
    const LabelInducedGraph lg(p);
    EXPECT_EQ(lg.components(), p);
    if (n <= 50) EXPECT_EQ(connected_components(lg.dense()), p);
  }
}

TEST(Nmi, Examples) {
  const Partition p(std::vector<int>{0, 0, 1, 1, 2, 2});
  EXPECT_NEAR(nmi(p, p), 1.0, 1e-15);
  EXPECT_EQ(nmi(p, Partition(std::vector<int>(6, 0))), 0.0);
  EXPECT_EQ(nmi(Partition(std::vector<int>(6, 0)), p), 0.0);
  EXPECT_EQ(nmi(Partition(std::vector<int>(6, 0)), Partition(std::vector<int>(6, 3))), 1.0);
  const std::vector<int> truth{0, 0, 1, 1}, result{0, 1, 1, 1};
  EXPECT_NEAR(nmi(Partition(truth), Partition(result)), oracle::nmi(truth, result), 1e-15);
}

TEST(Nmi, SizeMismatchThrows) {
  EXPECT_THROW(nmi(Partition(std::vector<int>{0, 1}), Partition(std::vector<int>{0})),
               InputError);
}

TEST(Nmi, OracleSymmetryAndPermutation) {
  oracle::Rng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const auto a = oracle::random_labels(30, 4, rng);
    const auto b = oracle::random_labels(30, 5, rng);
    const double v = nmi(Partition(a), Partition(b));
    EXPECT_NEAR(v, oracle::nmi(a, b), 1e-12);
    EXPECT_NEAR(v, nmi(Partition(b), Partition(a)), 1e-12);
    EXPECT_NEAR(v, nmi(Partition(permute_labels(a, rng)), Partition(b)), 1e-12);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Accuracy, Examples) {
  EXPECT_EQ(accuracy(Partition(std::vector<int>{0, 0, 1, 1}), Partition(std::vector<int>{1, 1, 0, 0})),
            1.0);
  EXPECT_EQ(accuracy(Partition(std::vector<int>{0, 0, 1, 1}), Partition(std::vector<int>{0, 0, 0, 1})),
            0.75);
  EXPECT_THROW(accuracy(Partition(std::vector<int>{0, 1}), Partition(std::vector<int>{0})),
               InputError);
}

TEST(Accuracy, OracleAndPermutationInvariance) {
  oracle::Rng rng(33);
  for (int trial = 0; trial < 40; ++trial) {
    const auto truth = oracle::random_labels(25, 4, rng);
    const auto result = oracle::random_labels(25, 3 + trial % 3, rng);
    // The oracle wants compact ids.
    const Partition pt(truth), pr(result);
    const double v = accuracy(pt, pr);
    EXPECT_NEAR(v, oracle::accuracy(pt.labels(), pr.labels()), 1e-15);
    EXPECT_NEAR(v, accuracy(Partition(permute_labels(pt.labels(), rng)), pr), 1e-15);
    EXPECT_NEAR(v, accuracy(pt, Partition(permute_labels(pr.labels(), rng))), 1e-15);
    EXPECT_NEAR(accuracy(pt, Partition(permute_labels(pt.labels(), rng))), 1.0, 1e-15);
  }
}

TEST(Hungarian, MatchesExhaustiveEnumeration) {
  oracle::Rng rng(44);
  std::uniform_real_distribution<double> w(-5.0, 10.0);
  for (int k = 1; k <= 6; ++k) {
    for (int trial = 0; trial < 30; ++trial) {
      MatrixXd m(k, k);
      for (Index i = 0; i < k; ++i) {
        for (Index j = 0; j < k; ++j) m(i, j) = trial % 2 ? std::floor(w(rng)) : w(rng);
      }
      const auto assignment = max_weight_assignment(m);
      std::vector<int> sorted = assignment;
      std::sort(sorted.begin(), sorted.end());
      for (int i = 0; i < k; ++i) EXPECT_EQ(sorted[i], i);
      double total = 0.0;
      for (int i = 0; i < k; ++i) total += m(i, assignment[i]);
      EXPECT_NEAR(total, oracle::best_assignment_weight(m), 1e-9);
    }
  }
}

TEST(Contingency, CountsIntersections) {
  const MatrixXd c =
      contingency(Partition(std::vector<int>{0, 0, 1, 1}), Partition(std::vector<int>{0, 1, 1, 1}));
  MatrixXd expected(2, 2);
  expected << 1, 1, 0, 2;
  EXPECT_EQ(c, expected);
}

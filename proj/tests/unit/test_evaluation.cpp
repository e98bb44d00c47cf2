#include "grassclust/errors.hpp"
#include "grassclust/evaluation.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace grassclust;

namespace {

ClusterAssignment labels(std::vector<int> v) { return ClusterAssignment::from_raw(v); }

ClusterAssignment random_labels(int n, int k, std::mt19937_64& rng) {
  std::vector<int> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = static_cast<int>(rng() % static_cast<unsigned>(k));
  return ClusterAssignment::from_raw(v);
}

/// Best matching by trying every permutation of the column indices.
long permutation_oracle(const Eigen::MatrixXi& w) {
  const Eigen::Index n = std::max(w.rows(), w.cols());
  Eigen::MatrixXi sq = Eigen::MatrixXi::Zero(n, n);
  sq.topLeftCorner(w.rows(), w.cols()) = w;
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  long best = 0;
  do {
    long total = 0;
    for (int i = 0; i < n; ++i) total += sq(i, perm[static_cast<std::size_t>(i)]);
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST(Accuracy, Examples) {
  EXPECT_EQ(accuracy(labels({0, 0, 1, 1, 2}), labels({0, 0, 1, 1, 2})), 1.0);
  EXPECT_EQ(accuracy(labels({2, 2, 0, 0, 1}), labels({0, 0, 1, 1, 2})), 1.0);
  EXPECT_EQ(accuracy(labels({0, 1, 0, 1}), labels({0, 0, 1, 1})), 0.5);
}

TEST(Accuracy, UnmatchedPredictedClustersCountZero) {
  EXPECT_DOUBLE_EQ(accuracy(labels({0, 1, 2, 3}), labels({0, 0, 1, 1})), 0.5);
  EXPECT_DOUBLE_EQ(accuracy(labels({0, 0, 0, 0}), labels({0, 0, 1, 1})), 0.5);
}

TEST(Accuracy, LengthMismatchIsInputError) {
  EXPECT_THROW(accuracy(labels({0, 1}), labels({0, 1, 1})), InputError);
  EXPECT_THROW(nmi(labels({0, 1}), labels({0, 1, 1})), InputError);
}

TEST(Matching, ExhaustiveAndHungarianAgreeWithPermutationOracle) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index r = 1 + static_cast<Eigen::Index>(rng() % 6);
    const Eigen::Index c = 1 + static_cast<Eigen::Index>(rng() % 6);
    Eigen::MatrixXi w(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
      for (Eigen::Index j = 0; j < c; ++j) w(i, j) = static_cast<int>(rng() % 20);
    }
    const long expected = permutation_oracle(w);
    EXPECT_EQ(max_matching_exhaustive(w), expected);
    EXPECT_EQ(max_matching_hungarian(w), expected);
  }
}

TEST(Matching, HungarianMatchesExhaustiveOnLargerTables) {
  std::mt19937_64 rng(72);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXi w(8, 7);
    for (Eigen::Index i = 0; i < 8; ++i) {
      for (Eigen::Index j = 0; j < 7; ++j) w(i, j) = static_cast<int>(rng() % 50);
    }
    EXPECT_EQ(max_matching_hungarian(w), max_matching_exhaustive(w));
  }
}

TEST(Accuracy, ManyClustersUseTheSameOptimum) {
  std::mt19937_64 rng(73);
  const auto truth = random_labels(300, 12, rng);
  std::vector<int> relabeled = truth.labels();
  for (auto& x : relabeled) x = (x * 7 + 3) % 12;
  EXPECT_EQ(accuracy(ClusterAssignment::from_raw(relabeled), truth), 1.0);
  const auto pred = random_labels(300, 11, rng);
  const auto table = ContingencyTable::build(pred, truth);
  EXPECT_EQ(table.total(), 300);
  EXPECT_DOUBLE_EQ(accuracy(pred, truth), static_cast<double>(max_matching_hungarian(table.counts)) / 300.0);
}

TEST(Nmi, Examples) {
  EXPECT_EQ(nmi(labels({0, 0, 1, 1}), labels({0, 0, 1, 1})), 1.0);
  EXPECT_EQ(nmi(labels({0, 0, 0, 0}), labels({0, 0, 1, 1})), 0.0);
  EXPECT_EQ(nmi(labels({0, 0, 0, 0}), labels({0, 0, 0, 0})), 1.0);
  EXPECT_NEAR(nmi(labels({0, 1, 0, 1}), labels({0, 0, 1, 1})), 0.0, 1e-15);
}

TEST(Nmi, MatchesEntropyFormula) {
  // pred {0,0,1,1,1,2}, truth {0,0,0,1,1,1}: computed from the joint distribution.
  const auto pred = labels({0, 0, 1, 1, 1, 2});
  const auto truth = labels({0, 0, 0, 1, 1, 1});
  const double n = 6.0;
  const Eigen::MatrixXd joint = Eigen::MatrixXd{{2, 0}, {1, 2}, {0, 1}} / n;
  const Eigen::VectorXd pp = joint.rowwise().sum();
  const Eigen::RowVectorXd pt = joint.colwise().sum();
  double mi = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 2; ++j) {
      if (joint(i, j) > 0) mi += joint(i, j) * std::log(joint(i, j) / (pp(i) * pt(j)));
    }
  }
  const double hp = -(pp.array() * pp.array().log()).sum();
  const double ht = -(pt.array() * pt.array().log()).sum();
  EXPECT_NEAR(nmi(pred, truth), mi / std::sqrt(hp * ht), 1e-12);
}

TEST(ScoreProperties, RelabelingSymmetryBoundsAndMatchingFloor) {
  std::mt19937_64 rng(74);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + trial % 5;
    std::vector<int> t(static_cast<std::size_t>(k * 10));
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<int>(i) % k;
    const auto truth = ClusterAssignment::from_raw(t);
    const auto pred = random_labels(k * 10, 1 + trial % 7, rng);
    std::vector<int> shifted = pred.labels();
    for (auto& x : shifted) x = 100 - x;
    const double a = accuracy(pred, truth);
    const double m = nmi(pred, truth);
    EXPECT_EQ(accuracy(ClusterAssignment::from_raw(shifted), truth), a);
    EXPECT_NEAR(nmi(ClusterAssignment::from_raw(shifted), truth), m, 1e-12);
    EXPECT_NEAR(nmi(truth, pred), m, 1e-12);
    // Balanced truth: some matching collects n / max(k, k_pred) samples, so the
    // 1/k floor holds whenever pred has at most k clusters.
    const int k_pred = pred.num_clusters();
    EXPECT_GE(a, 1.0 / std::max(k, k_pred) - 1e-12);
    if (k_pred <= k) {
      EXPECT_GE(a, 1.0 / k - 1e-12);
    }
    EXPECT_GE(m, 0.0);
    EXPECT_LE(m, 1.0);
  }
}

TEST(KMeans, SeparatesTwoPointMasses) {
  std::vector<Eigen::VectorXd> v;
  for (int i = 0; i < 6; ++i) v.push_back(Eigen::Vector2d{0.0, 0.0});
  for (int i = 0; i < 4; ++i) v.push_back(Eigen::Vector2d{10.0, 0.0});
  const auto r = kmeans_baseline(v, 2);
  EXPECT_EQ(r.assignment, labels({0, 0, 0, 0, 0, 0, 1, 1, 1, 1}));
  EXPECT_EQ(r.wcss, 0.0);
}

TEST(KMeans, SingleClusterAndErrors) {
  std::mt19937_64 rng(75);
  std::vector<Eigen::VectorXd> v;
  for (int i = 0; i < 9; ++i) v.push_back(grassclust::testing::random_vector(3, rng));
  EXPECT_EQ(kmeans_baseline(v, 1).assignment.num_clusters(), 1);
  EXPECT_THROW(kmeans_baseline(v, 10), InputError);
  EXPECT_THROW(kmeans_baseline(v, 0), InputError);
  v.push_back(Eigen::Vector2d{0, 0});
  EXPECT_THROW(kmeans_baseline(v, 2), InputError);
}

TEST(KMeans, WcssTraceNonIncreasingAndSeeded) {
  std::mt19937_64 rng(76);
  std::vector<Eigen::VectorXd> v;
  for (int i = 0; i < 200; ++i) v.push_back(grassclust::testing::random_vector(4, rng));
  KMeansOptions o;
  o.seed = 3;
  const auto r = kmeans_baseline(v, 5, o);
  ASSERT_FALSE(r.wcss_trace.empty());
  for (std::size_t i = 1; i < r.wcss_trace.size(); ++i) EXPECT_LE(r.wcss_trace[i], r.wcss_trace[i - 1] + 1e-9);
  EXPECT_NEAR(r.wcss_trace.back(), r.wcss, 1e-9);
  EXPECT_EQ(kmeans_baseline(v, 5, o).assignment, r.assignment);
}

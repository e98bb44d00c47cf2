#include "grassclust/errors.hpp"
#include "grassclust/louvain.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace grassclust;

namespace {

Eigen::MatrixXd two_cliques(int size) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2 * size, 2 * size);
  w.topLeftCorner(size, size).setOnes();
  w.bottomRightCorner(size, size).setOnes();
  w.diagonal().setZero();
  return w;
}

Eigen::MatrixXd random_graph(int n, double density, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (u(rng) < density) w(i, j) = w(j, i) = u(rng);
    }
  }
  return w;
}

/// Planted partition: dense blocks of `block` nodes, sparse between them.
std::pair<Eigen::MatrixXd, std::vector<int>> planted(int blocks, int block, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = blocks * block;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i / block;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double p = (i / block == j / block) ? 0.8 : 0.1;
      if (u(rng) < p) w(i, j) = w(j, i) = 1.0;
    }
  }
  return {w, labels};
}

/// Direct double sum over all node pairs.
double modularity_oracle(const Eigen::MatrixXd& w, const std::vector<int>& labels) {
  const double two_m = w.sum();
  const Eigen::VectorXd k = w.rowwise().sum();
  double q = 0.0;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      if (labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)]) {
        q += w(i, j) - k(i) * k(j) / two_m;
      }
    }
  }
  return q / two_m;
}

}  // namespace

TEST(WeightedGraph, RejectsInvalidWeights) {
  EXPECT_THROW(WeightedGraph(Eigen::MatrixXd{{0, 1}, {2, 0}}), InputError);
  EXPECT_THROW(WeightedGraph(Eigen::MatrixXd{{0, -1}, {-1, 0}}), InputError);
  EXPECT_THROW(WeightedGraph(Eigen::MatrixXd{{1, 1}, {1, 0}}), InputError);
  EXPECT_THROW(WeightedGraph(Eigen::MatrixXd::Zero(2, 3)), InputError);
}

TEST(ClusterAssignment, RequiresContiguousLabels) {
  EXPECT_THROW(ClusterAssignment({0, 2}), InputError);
  EXPECT_THROW(ClusterAssignment({-1, 0}), InputError);
  const auto a = ClusterAssignment::from_raw({7, 7, 3, 9, 3});
  EXPECT_EQ(a.labels(), (std::vector<int>{0, 0, 1, 2, 1}));
  EXPECT_EQ(a.num_clusters(), 3);
}

TEST(Modularity, SingleCommunityIsZero) {
  const WeightedGraph g(two_cliques(4));
  EXPECT_NEAR(modularity(g, ClusterAssignment(std::vector<int>(8, 0))), 0.0, 1e-15);
}

TEST(Modularity, TwoDisconnectedCliquesGiveOneHalf) {
  const WeightedGraph g(two_cliques(5));
  EXPECT_NEAR(modularity(g, ClusterAssignment({0, 0, 0, 0, 0, 1, 1, 1, 1, 1})), 0.5, 1e-12);
}

TEST(Modularity, MatchesDirectFormula) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const auto w = random_graph(15, 0.4, rng);
    std::vector<int> raw(15);
    for (auto& r : raw) r = static_cast<int>(rng() % 4);
    const auto a = ClusterAssignment::from_raw(raw);
    EXPECT_NEAR(modularity(WeightedGraph(w), a), modularity_oracle(w, a.labels()), 1e-12);
  }
}

TEST(Modularity, GroundPartitionBeatsRandomRelabeling) {
  std::mt19937_64 rng(42);
  int wins = 0;
  for (int trial = 0; trial < 20; ++trial) {
    auto [w, labels] = planted(3, 6, rng);
    auto shuffled = labels;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const WeightedGraph g(w);
    if (modularity(g, ClusterAssignment(labels)) >= modularity(g, ClusterAssignment::from_raw(shuffled))) ++wins;
  }
  EXPECT_GT(wins, 10);
}

TEST(Modularity, EmptyGraphIsDegenerate) {
  const WeightedGraph g(Eigen::MatrixXd::Zero(3, 3));
  EXPECT_THROW(modularity(g, ClusterAssignment({0, 1, 2})), DegenerateDataError);
  EXPECT_THROW(louvain(g), DegenerateDataError);
}

TEST(Louvain, RecoversTwoDisconnectedCliques) {
  const WeightedGraph g(two_cliques(5));
  const auto r = louvain(g);
  EXPECT_EQ(r.assignment.num_clusters(), 2);
  for (int i = 1; i < 5; ++i) EXPECT_EQ(r.assignment[static_cast<std::size_t>(i)], r.assignment[0]);
  for (int i = 6; i < 10; ++i) EXPECT_EQ(r.assignment[static_cast<std::size_t>(i)], r.assignment[5]);
  EXPECT_NE(r.assignment[0], r.assignment[5]);
  EXPECT_NEAR(modularity(g, r.assignment), 0.5, 1e-12);
}

TEST(Louvain, CompleteGraphHasNonNegativeModularity) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Ones(8, 8);
  w.diagonal().setZero();
  const WeightedGraph g(w);
  EXPECT_GE(modularity(g, louvain(g).assignment), -1e-12);
}

TEST(Louvain, DeterministicForFixedSeed) {
  std::mt19937_64 rng(43);
  const WeightedGraph g(random_graph(30, 0.2, rng));
  for (std::uint64_t seed : {0u, 5u, 99u}) {
    LouvainOptions o;
    o.seed = seed;
    EXPECT_EQ(louvain(g, o).assignment, louvain(g, o).assignment);
  }
}

TEST(Louvain, ModularityMonotoneAcrossLevelsAndBeatsTrivialPartitions) {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    const WeightedGraph g(random_graph(25 + trial, 0.15, rng));
    if (g.total_weight() == 0.0) continue;
    LouvainOptions o;
    o.seed = static_cast<std::uint64_t>(trial);
    const auto r = louvain(g, o);
    ASSERT_FALSE(r.level_modularity.empty());
    for (std::size_t i = 1; i < r.level_modularity.size(); ++i) {
      EXPECT_GE(r.level_modularity[i], r.level_modularity[i - 1] - 1e-12);
    }
    const double q = modularity(g, r.assignment);
    EXPECT_NEAR(q, r.level_modularity.back(), 1e-9);
    std::vector<int> singletons(static_cast<std::size_t>(g.size()));
    std::iota(singletons.begin(), singletons.end(), 0);
    EXPECT_GE(q, modularity(g, ClusterAssignment(singletons)) - 1e-12);
    EXPECT_GE(q, modularity(g, ClusterAssignment(std::vector<int>(singletons.size(), 0))) - 1e-12);
  }
}

TEST(Louvain, RecoversPlantedPartition) {
  std::mt19937_64 rng(45);
  auto [w, labels] = planted(3, 8, rng);
  const auto r = louvain(WeightedGraph(w));
  EXPECT_EQ(r.assignment, ClusterAssignment::from_raw(labels));
}

TEST(Louvain, HigherResolutionGivesFinerPartitions) {
  std::mt19937_64 rng(46);
  auto [w, labels] = planted(4, 6, rng);
  const WeightedGraph g(w);
  LouvainOptions coarse;
  coarse.resolution = 0.05;
  LouvainOptions fine;
  fine.resolution = 3.0;
  EXPECT_LE(louvain(g, coarse).assignment.num_clusters(), louvain(g, fine).assignment.num_clusters());
}

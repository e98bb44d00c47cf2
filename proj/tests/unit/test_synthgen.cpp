#include "grassclust/assignment.hpp"
#include "grassclust/errors.hpp"
#include "grassclust/synthgen.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace grassclust;

namespace {

StateSpec two_blocks(double mu, double db) {
  StateSpec s;
  s.communities = {{0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}};
  s.outlier_magnitude = mu;
  s.noise_db = db;
  return s;
}

int count_equal(const Eigen::MatrixXd& m, double v) { return static_cast<int>((m.array() == v).count()); }

}  // namespace

TEST(Connectivity, CleanDatasetHasNoOutliersAndTenthPowerNoise) {
  EXPECT_NEAR(noise_std_from_db(-10.0), 0.3162, 1e-4);
  EXPECT_NEAR(noise_std_from_db(-6.0), std::pow(10.0, -0.3), 1e-15);
  EXPECT_EQ(noise_std_from_db(kNoNoiseDb), 0.0);
  const auto parts = gen_connectivity(two_blocks(0.0, -10.0), 1);
  EXPECT_EQ(parts.outlier.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Connectivity, NoiseStandardDeviationMatchesLevel) {
  StateSpec s;
  s.communities = {{}};
  for (int i = 0; i < 200; ++i) s.communities[0].push_back(i);
  s.noise_db = -10.0;
  const auto parts = gen_connectivity(s, 2);
  const Eigen::MatrixXd& n = parts.noise;
  EXPECT_EQ(n, n.transpose());
  double sum = 0.0;
  double sq = 0.0;
  long count = 0;
  for (Eigen::Index i = 0; i < n.rows(); ++i) {
    for (Eigen::Index j = i; j < n.cols(); ++j) {
      sum += n(i, j);
      sq += n(i, j) * n(i, j);
      ++count;
    }
  }
  const double mean = sum / static_cast<double>(count);
  EXPECT_NEAR(std::sqrt(sq / static_cast<double>(count) - mean * mean), 0.3162, 0.01);
}

TEST(Connectivity, ThirtySixOutlierEntries) {
  const auto parts = gen_connectivity(two_blocks(0.2, -10.0), 3);
  EXPECT_EQ(count_equal(parts.outlier, 0.2), 36);
  EXPECT_EQ(count_equal(parts.outlier, 0.0), 100 - 36);
  EXPECT_EQ(parts.outlier, parts.outlier.transpose());
  EXPECT_EQ(parts.outlier.diagonal().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Connectivity, DisabledNoiseIsExactSum) {
  const auto parts = gen_connectivity(two_blocks(0.3, kNoNoiseDb), 4);
  EXPECT_EQ(parts.noise.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(parts.total(), parts.truth + parts.outlier);
  EXPECT_EQ(parts.truth(0, 4), 1.0);
  EXPECT_EQ(parts.truth(0, 5), 0.0);
}

TEST(Connectivity, InvalidSpecsAreConfigErrors) {
  auto s = two_blocks(0.2, -10.0);
  s.outlier_entries = 92;
  EXPECT_THROW(gen_connectivity(s, 0), ConfigError);
  s.outlier_entries = 35;
  EXPECT_THROW(gen_connectivity(s, 0), ConfigError);
  s = two_blocks(0.2, -10.0);
  s.communities = {{0, 1}, {1, 2}};
  EXPECT_THROW(gen_connectivity(s, 0), ConfigError);
}

TEST(TimeSeries, FourStatesOfOneHundredFiftySamples) {
  const auto ds = gen_timeseries(preset_states("d1"), 7);
  EXPECT_EQ(ds.series.samples(), 600);
  EXPECT_EQ(ds.series.channels(), 10);
  ASSERT_EQ(ds.time_labels.size(), 600u);
  EXPECT_NO_THROW(ClusterAssignment{ds.time_labels});
  ASSERT_EQ(ds.node_labels.size(), 4u);
  for (const auto& nl : ds.node_labels) EXPECT_NO_THROW(ClusterAssignment{nl});
  EXPECT_EQ(ds.state_spans.back(), (std::pair<long, long>{450, 599}));
}

TEST(TimeSeries, SingleNoiselessCommunityGivesIdenticalColumns) {
  StateSpec s;
  s.communities = {{0, 1, 2, 3}};
  s.noise_db = kNoNoiseDb;
  s.samples = 50;
  s.outlier_entries = 0;
  const auto ds = gen_timeseries({s}, 5);
  const Eigen::MatrixXd& d = ds.series.data();
  for (Eigen::Index c = 1; c < d.cols(); ++c) EXPECT_EQ(d.col(c), d.col(0));
  const Eigen::VectorXd a = d.col(0).array() - d.col(0).mean();
  const Eigen::VectorXd b = d.col(3).array() - d.col(3).mean();
  EXPECT_DOUBLE_EQ(a.dot(b) / (a.norm() * b.norm()), 1.0);
}

TEST(TimeSeries, BitIdenticalForFixedSeed) {
  const auto a = gen_timeseries(preset_states("d6"), 11);
  const auto b = gen_timeseries(preset_states("d6"), 11);
  const auto c = gen_timeseries(preset_states("d6"), 12);
  EXPECT_EQ(a.series.data(), b.series.data());
  EXPECT_EQ(a.time_labels, b.time_labels);
  EXPECT_NE(a.series.data(), c.series.data());
}

TEST(TimeSeries, SharedLatentIdsShareSubnetLabels) {
  StateSpec s1 = two_blocks(0.0, -10.0);
  s1.latent_ids = {0, 1};
  StateSpec s2;
  s2.communities = {{0, 1, 2, 3, 4}, {5, 6}, {7, 8, 9}};
  s2.latent_ids = {0, 2, 3};
  const auto ds = gen_timeseries({s1, s2}, 1);
  EXPECT_EQ(ds.subnet_labels[0][0], ds.subnet_labels[1][0]);
  EXPECT_NE(ds.subnet_labels[0][9], ds.subnet_labels[1][9]);
  EXPECT_NE(ds.subnet_labels[1][5], ds.subnet_labels[1][7]);
}

TEST(TimeSeries, PresetsAndErrors) {
  for (const char* name : {"d1", "d2", "d3", "d4", "d5", "d6"}) EXPECT_EQ(preset_states(name).size(), 4u);
  EXPECT_EQ(preset_states("d4")[0].outlier_magnitude, 0.2);
  EXPECT_EQ(preset_states("d3")[0].noise_db, -6.0);
  EXPECT_THROW(preset_states("d7"), ConfigError);
  EXPECT_THROW(gen_timeseries({}, 0), ConfigError);
  StateSpec small;
  small.communities = {{0, 1}};
  small.outlier_entries = 2;
  EXPECT_THROW(gen_timeseries({two_blocks(0, -10), small}, 0), ConfigError);
}

TEST(SmoothLatent, UnitVarianceOnWhiteNoise) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> unit;
  Eigen::VectorXd white(200000);
  for (Eigen::Index i = 0; i < white.size(); ++i) white(i) = unit(rng);
  const Eigen::VectorXd y = smooth_latent(white);
  EXPECT_EQ(y.size(), white.size() - 2 * kLatentSmoothingPasses);
  const double var = (y.array() - y.mean()).square().mean();
  EXPECT_NEAR(var, 1.0, 0.03);
}

TEST(LinearStateSpace, ZeroTransitionKillsState) {
  LinearStateSpaceSpec spec;
  spec.transition = Eigen::MatrixXd::Zero(2, 2);
  spec.output = Eigen::MatrixXd{{1.0, 2.0}, {0.5, -1.0}};
  spec.initial_state = Eigen::Vector2d{1.0, 1.0};
  const auto ts = gen_linear_ss(spec, 10, 0);
  EXPECT_EQ(ts.data().bottomRows(9).cwiseAbs().maxCoeff(), 0.0);
}

TEST(LinearStateSpace, DivergentTransitionIsConfigError) {
  LinearStateSpaceSpec spec;
  spec.transition = Eigen::MatrixXd{{1.0, 0.0}, {0.0, 0.5}};
  spec.output = Eigen::MatrixXd::Ones(1, 2);
  spec.initial_state = Eigen::Vector2d{1.0, 0.0};
  EXPECT_THROW(gen_linear_ss(spec, 10, 0), ConfigError);
}

TEST(LinearStateSpace, NoisyRunsAreSeedDeterministic) {
  LinearStateSpaceSpec spec;
  spec.transition = Eigen::MatrixXd{{0.5, 0.1}, {0.0, 0.3}};
  spec.output = Eigen::MatrixXd::Ones(2, 2);
  spec.initial_state = Eigen::Vector2d{1.0, 0.0};
  spec.state_noise = 0.1;
  spec.output_noise = 0.1;
  EXPECT_EQ(gen_linear_ss(spec, 50, 3).data(), gen_linear_ss(spec, 50, 3).data());
  EXPECT_NE(gen_linear_ss(spec, 50, 3).data(), gen_linear_ss(spec, 50, 4).data());
}

TEST(LinearStateSpace, ObservabilityMatrixBlocks) {
  const Eigen::MatrixXd c{{1.0, 0.0}};
  const Eigen::MatrixXd a{{0.0, 1.0}, {-1.0, 0.0}};
  const auto o = observability_matrix(c, a, 3);
  EXPECT_EQ(o, (Eigen::MatrixXd{{1, 0}, {0, 1}, {-1, 0}}));
}

#include "grassclust/errors.hpp"
#include "grassclust/kernels.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace grassclust;
using grassclust::testing::random_vector;

namespace {

std::vector<KernelSpec> all_kernels() {
  return {KernelSpec::linear(),
          KernelSpec::gaussian(0.8),
          KernelSpec::laplacian(1.0),
          KernelSpec::polynomial(2),
          KernelSpec::parse("0.6*gaussian(0.8)+0.4*laplacian(1.0)")};
}

}  // namespace

TEST(Kernels, LinearIsDotProduct) {
  EXPECT_DOUBLE_EQ(eval_kernel(KernelSpec::linear(), Vector{{1, 2}}, Vector{{3, 4}}), 11.0);
}

TEST(Kernels, GaussianOfEqualArgumentsIsOne) {
  EXPECT_EQ(eval_kernel(KernelSpec::gaussian(0.8), Vector{{5, -1}}, Vector{{5, -1}}), 1.0);
}

TEST(Kernels, MixtureOfEqualArgumentsIsOne) {
  const auto mix = KernelSpec::parse("0.6*gaussian(0.8)+0.4*laplacian(1.0)");
  EXPECT_NEAR(eval_kernel(mix, Vector{{2, 3}}, Vector{{2, 3}}), 1.0, 1e-15);
}

TEST(Kernels, DimensionMismatchIsInputError) {
  EXPECT_THROW(eval_kernel(KernelSpec::linear(), Vector{{1, 2}}, Vector{{1}}), InputError);
  EXPECT_THROW(gram_matrix(KernelSpec::linear(), {Vector{{1, 2}}}, {Vector{{1}}}), InputError);
}

TEST(Kernels, InvalidSpecsAreConfigErrors) {
  EXPECT_THROW(KernelSpec::gaussian(0.0), ConfigError);
  EXPECT_THROW(KernelSpec::laplacian(-1.0), ConfigError);
  EXPECT_THROW(KernelSpec::polynomial(0), ConfigError);
  EXPECT_THROW(KernelSpec::parse("0.5*gaussian(1)+0.4*linear"), ConfigError);
  EXPECT_THROW(KernelSpec::parse("-0.5*gaussian(1)+1.5*linear"), ConfigError);
  EXPECT_THROW(KernelSpec::parse("cosine(1)"), ConfigError);
  EXPECT_THROW(KernelSpec::parse("gaussian(abc)"), ConfigError);
}

TEST(Kernels, ParseRoundTripsThroughText) {
  for (const auto& k : all_kernels()) {
    const auto again = KernelSpec::parse(k.to_string());
    EXPECT_EQ(again.to_string(), k.to_string());
  }
}

TEST(GramMatrix, LinearOnOrthonormalVectorsIsIdentity) {
  const std::vector<Vector> v = {Vector{{1, 0}}, Vector{{0, 1}}};
  EXPECT_TRUE(gram_matrix(KernelSpec::linear(), v, v).isApprox(Eigen::Matrix2d::Identity()));
}

TEST(GramMatrix, LaplacianSingleEntry) {
  const auto g = gram_matrix(KernelSpec::laplacian(1.0), {Vector{{0}}}, {Vector{{1}}});
  ASSERT_EQ(g.rows(), 1);
  EXPECT_NEAR(g(0, 0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(g(0, 0), 0.36788, 1e-5);
}

TEST(GramMatrix, GaussianOnFiveRandomPointsIsPsd) {
  std::mt19937_64 rng(3);
  std::vector<Vector> v;
  for (int i = 0; i < 5; ++i) v.push_back(random_vector(4, rng));
  const auto g = gram_matrix(KernelSpec::gaussian(1.0), v, v);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
}

TEST(KernelProperties, SymmetricExactly) {
  std::mt19937_64 rng(11);
  for (const auto& k : all_kernels()) {
    for (int trial = 0; trial < 50; ++trial) {
      const Vector a = random_vector(5, rng);
      const Vector b = random_vector(5, rng);
      EXPECT_EQ(eval_kernel(k, a, b), eval_kernel(k, b, a)) << k.to_string();
    }
  }
}

TEST(KernelProperties, GramMatricesArePsd) {
  std::mt19937_64 rng(12);
  for (const auto& k : all_kernels()) {
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<Vector> v;
      for (int i = 0; i < 20; ++i) v.push_back(random_vector(3, rng));
      const auto g = gram_matrix(k, v, v);
      ASSERT_TRUE(g.isApprox(g.transpose()));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
      const double top = es.eigenvalues().maxCoeff();
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-9 * top) << k.to_string();
    }
  }
}

TEST(KernelProperties, MixtureIsWeightedSumOfTerms) {
  std::mt19937_64 rng(13);
  const auto mix = KernelSpec::parse("0.6*gaussian(0.8)+0.4*laplacian(1.0)");
  for (int trial = 0; trial < 50; ++trial) {
    const Vector a = random_vector(3, rng);
    const Vector b = random_vector(3, rng);
    const double expected = 0.6 * std::exp(-(a - b).squaredNorm() / (2 * 0.64)) +
                            0.4 * std::exp(-(a - b).lpNorm<1>() / 1.0);
    EXPECT_NEAR(eval_kernel(mix, a, b), expected, 1e-12);
  }
}

TEST(KernelProperties, RadialKernelsBoundedInUnitInterval) {
  std::mt19937_64 rng(14);
  for (const auto& k : {KernelSpec::gaussian(0.3), KernelSpec::laplacian(2.0)}) {
    for (int trial = 0; trial < 100; ++trial) {
      const Vector a = random_vector(4, rng);
      const Vector b = random_vector(4, rng);
      const double v = eval_kernel(k, a, b);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
      EXPECT_EQ(eval_kernel(k, a, a), 1.0);
    }
  }
}

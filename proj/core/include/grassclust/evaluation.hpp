#pragma once

// Clustering scores and the K-means baseline.

#include "grassclust/assignment.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace grassclust {

/// counts(p, t) = number of items with predicted label p and true label t.
struct ContingencyTable {
  Eigen::MatrixXi counts;

  static ContingencyTable build(const ClusterAssignment& pred, const ClusterAssignment& truth);
  int total() const { return counts.sum(); }
};

/// Maximum total weight of an injective matching between rows and columns
/// (either side may be left partly unmatched). Exhaustive search.
long max_matching_exhaustive(const Eigen::MatrixXi& weights);

/// Same as max_matching_exhaustive, by the Hungarian algorithm.
long max_matching_hungarian(const Eigen::MatrixXi& weights);

/// Fraction of items on matched clusters under the best one-to-one matching.
/// Exhaustive when max(k_pred, k_true) <= 8, Hungarian otherwise.
double accuracy(const ClusterAssignment& pred, const ClusterAssignment& truth);

/// I(pred; truth) / sqrt(H(pred) H(truth)); 1 for identical partitions, 0 when
/// exactly one side has zero entropy.
double nmi(const ClusterAssignment& pred, const ClusterAssignment& truth);

struct KMeansOptions {
  int restarts = 10;
  int max_iter = 300;
  std::uint64_t seed = 0;
};

struct KMeansResult {
  ClusterAssignment assignment;
  double wcss = 0.0;
  /// Within-cluster sum of squares after every Lloyd iteration of the best run.
  std::vector<double> wcss_trace;
};

/// Lloyd's algorithm from k-means++ seeds; best of `restarts` runs by WCSS.
/// Throws InputError when k > n or the vectors differ in dimension.
KMeansResult kmeans_baseline(const std::vector<Eigen::VectorXd>& vectors, int k, const KMeansOptions& options = {});

}  // namespace grassclust

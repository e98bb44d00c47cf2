#pragma once

// Weighted modularity and two-phase Louvain community detection.

#include "grassclust/assignment.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace grassclust {

/// Symmetric, nonnegative, finite weights with zero diagonal.
class WeightedGraph {
 public:
  static constexpr double kSymmetryTol = 1e-12;

  WeightedGraph() = default;
  /// Throws InputError when the invariants do not hold.
  explicit WeightedGraph(Eigen::MatrixXd weights);

  const Eigen::MatrixXd& weights() const noexcept { return weights_; }
  Eigen::Index size() const noexcept { return weights_.rows(); }
  Eigen::VectorXd degrees() const { return weights_.rowwise().sum(); }
  double total_weight() const { return weights_.sum(); }  ///< 2m

 private:
  Eigen::MatrixXd weights_;
};

/// Newman modularity (1/2m) sum_ij (w_ij - resolution k_i k_j / 2m) [c_i == c_j].
/// Throws DegenerateDataError when 2m == 0.
double modularity(const WeightedGraph& graph, const ClusterAssignment& assignment, double resolution = 1.0);

struct LouvainOptions {
  double resolution = 1.0;
  std::uint64_t seed = 0;
  double min_gain = 1e-9;
  int max_levels = 64;
};

struct LouvainResult {
  ClusterAssignment assignment;
  /// Modularity after each completed level, starting with the singleton partition.
  std::vector<double> level_modularity;
};

/// Local moving in a seeded-shuffled node order, then aggregation, until a
/// level improves modularity by no more than min_gain. Deterministic for a
/// fixed seed. Throws DegenerateDataError when 2m == 0.
LouvainResult louvain(const WeightedGraph& graph, const LouvainOptions& options = {});

}  // namespace grassclust

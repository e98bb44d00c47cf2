#pragma once

// Geodesic clustering by tangent spaces with Louvain dispatch: nearest
// neighbours on the Grassmannian, sparse-coding weights and angular
// information in each tangent space, and a sparse affinity graph.

#include "grassclust/assignment.hpp"
#include "grassclust/grassmann.hpp"
#include "grassclust/louvain.hpp"
#include "grassclust/sparse_coding.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace grassclust {

struct EgctParams {
  int k_nn = 10;
  double sigma_alpha = 1.0;
  double sigma_theta = 1.0;
  double pca_energy = 0.9;
  double louvain_resolution = 1.0;
  std::uint64_t seed = 0;
  double angle_tol = kDefaultAngleTol;
  SparseCodingOptions sparse_coding;

  /// Throws ConfigError on out-of-range fields; when feature_count >= 0 also
  /// requires 2 <= k_nn < feature_count.
  void validate(long feature_count = -1) const;
};

struct NeighborhoodStats {
  std::vector<int> neighbor_ids;        ///< k_nn nearest, closest first
  std::vector<char> usable;             ///< 0 for cut-locus neighbours dropped from the statistics
  Eigen::MatrixXd tangents;             ///< flattened log-map images of usable neighbours, one per column
  Eigen::VectorXd code_weights;         ///< sparse affine code per neighbour; 0 for dropped ones
  Eigen::VectorXd angles;               ///< to the eigenspace, per neighbour, in [0, pi/2]; 0 for dropped ones
  Eigen::MatrixXd covariance;           ///< mean-centred sample covariance of the usable tangents
  Eigen::MatrixXd eigenspace;           ///< orthonormal principal eigenspace basis
  bool code_degenerate = false;
  bool code_converged = true;
  int cut_locus_dropped = 0;
};

/// The k_nn indices (excluding i) with the smallest geodesic distance to
/// features[i]; ties by lower index; cut-locus pairs rank at the maximum
/// distance. Throws InputError when fewer than k_nn + 1 features exist.
std::vector<int> knn(const std::vector<GrassmannPoint>& features, int i, int k_nn,
                     double angle_tol = kDefaultAngleTol);

/// knn from precomputed pairwise distances; pairs whose largest principal
/// angle is within angle_tol of pi/2 rank at max_distance.
std::vector<int> knn_from_distances(const Eigen::MatrixXd& distances, const Eigen::MatrixXd& max_angles, int i,
                                    int k_nn, double angle_tol, double max_distance);

/// Tangent-space statistics of feature i given its neighbours. Throws
/// DegenerateDataError when fewer than 2 neighbours survive the cut-locus check.
NeighborhoodStats neighborhood_stats(const std::vector<GrassmannPoint>& features, int i,
                                     const std::vector<int>& neighbor_ids, const EgctParams& params);

NeighborhoodStats neighborhood_stats(const std::vector<GrassmannPoint>& features, int i, const EgctParams& params);

/// exp(|a_ij| + |a_ji|) * exp(-(theta_ij + theta_ji) / sigma_theta) for
/// neighbour pairs (either direction), 0 for mutual non-neighbours.
WeightedGraph build_affinity(const std::vector<NeighborhoodStats>& stats, const EgctParams& params);

/// The pairwise weight formula for one pair.
double affinity_weight(double alpha_ij, double alpha_ji, double theta_ij, double theta_ji, double sigma_theta);

struct EgctResult {
  ClusterAssignment assignment;
  WeightedGraph affinity;
  std::vector<NeighborhoodStats> stats;
  std::vector<double> level_modularity;
  double modularity = 0.0;
  std::vector<std::string> warnings;
};

EgctResult egct(const std::vector<GrassmannPoint>& features, const EgctParams& params, int threads = 1);

}  // namespace grassclust

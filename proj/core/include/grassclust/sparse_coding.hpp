#pragma once

// Affinely constrained, weighted-l1 sparse coding:
//
//   minimize  ||target - sum_j alpha_j atom_j||^2 + sum_j penalty_j |alpha_j|
//   subject to sum_j alpha_j = 1.

#include <Eigen/Dense>

#include <vector>

namespace grassclust {

struct SparseCodingProblem {
  Eigen::VectorXd target;
  std::vector<Eigen::VectorXd> atoms;
  Eigen::VectorXd penalties;

  /// Penalties exp(||atom_j - target|| / sigma_alpha), the distance-weighted form.
  static SparseCodingProblem distance_weighted(Eigen::VectorXd target, std::vector<Eigen::VectorXd> atoms,
                                               double sigma_alpha);
};

struct SparseCodingOptions {
  double tol = 1e-8;
  int max_iter = 5000;
  /// Atoms whose norms are all at or below this are treated as coincident.
  double zero_atom_tol = 1e-14;
};

struct SparseCodingResult {
  Eigen::VectorXd coefficients;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  bool degenerate = false;  ///< all atoms (and target) coincide; uniform weights returned
  std::vector<double> objective_trace;
};

double sparse_coding_objective(const SparseCodingProblem& problem, const Eigen::VectorXd& coefficients);

/// Proximal-gradient solver with momentum and monotone restarts. The proximal
/// step of (weighted l1 + affine constraint) is computed exactly: soft
/// thresholding after a scalar shift that is solved so that sum(alpha) = 1.
/// Throws InputError on an empty or inconsistent problem.
SparseCodingResult solve_sparse_coding(const SparseCodingProblem& problem, const SparseCodingOptions& options = {});

/// argmin_a 0.5||a - z||^2 + sum_j thresholds_j |a_j|  s.t. sum(a) = 1.
Eigen::VectorXd prox_weighted_l1_affine(const Eigen::VectorXd& z, const Eigen::VectorXd& thresholds);

}  // namespace grassclust

#pragma once

// Riemannian primitives on the Grassmann manifold Gr(rank, ambient_dim) with
// the arc-length (principal-angle) metric.

#include <Eigen/Dense>

#include <vector>

namespace grassclust {

/// A point of Gr(rank, ambient_dim) held as an orthonormal basis.
class GrassmannPoint {
 public:
  static constexpr double kOrthonormalityTol = 1e-10;

  GrassmannPoint() = default;

  /// Takes an already-orthonormal basis; throws InputError otherwise.
  explicit GrassmannPoint(Eigen::MatrixXd basis);

  /// Orthonormalizes the columns of a full-column-rank matrix (thin QR).
  static GrassmannPoint from_spanning_set(const Eigen::MatrixXd& columns);

  const Eigen::MatrixXd& basis() const noexcept { return basis_; }
  Eigen::Index ambient_dim() const noexcept { return basis_.rows(); }
  Eigen::Index rank() const noexcept { return basis_.cols(); }

 private:
  Eigen::MatrixXd basis_;
};

/// Horizontal tangent vector at `base`: base' * delta = 0.
struct TangentVector {
  GrassmannPoint base;
  Eigen::MatrixXd delta;
};

/// Principal angles in ascending order, each in [0, pi/2].
Eigen::VectorXd principal_angles(const GrassmannPoint& x, const GrassmannPoint& y);

/// sqrt(sum of squared principal angles).
double geodesic_distance(const GrassmannPoint& x, const GrassmannPoint& y);

/// Largest possible distance on Gr(rank, n): sqrt(rank) * pi / 2.
double max_geodesic_distance(Eigen::Index rank);

inline constexpr double kDefaultAngleTol = 1e-6;

/// Riemannian logarithm log_x(y). Throws CutLocusError when a principal angle
/// lies within angle_tol of pi/2.
TangentVector log_map(const GrassmannPoint& x, const GrassmannPoint& y, double angle_tol = kDefaultAngleTol);

/// Riemannian exponential exp_x(v). Throws InputError when v is based elsewhere.
GrassmannPoint exp_map(const GrassmannPoint& x, const TangentVector& v);

/// Column-major flattening of v.delta.
Eigen::VectorXd flatten(const TangentVector& v);

/// Pairwise geodesic distance matrix (symmetric, zero diagonal).
Eigen::MatrixXd pairwise_distances(const std::vector<GrassmannPoint>& points, int threads = 1);

}  // namespace grassclust

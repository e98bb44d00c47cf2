#include "grassclust/grassmann.hpp"

#include "grassclust/errors.hpp"
#include "grassclust/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace grassclust {

namespace {

void check_compatible(const GrassmannPoint& x, const GrassmannPoint& y) {
  if (x.ambient_dim() != y.ambient_dim() || x.rank() != y.rank()) {
    throw InputError("Grassmann points differ in shape: Gr(" + std::to_string(x.rank()) + ", " +
                     std::to_string(x.ambient_dim()) + ") vs Gr(" + std::to_string(y.rank()) + ", " +
                     std::to_string(y.ambient_dim()) + ")");
  }
  if (x.rank() == 0) throw InputError("Grassmann point is empty");
}

Eigen::MatrixXd thin_q(const Eigen::MatrixXd& a) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  return qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
}

}  // namespace

GrassmannPoint::GrassmannPoint(Eigen::MatrixXd basis) : basis_(std::move(basis)) {
  if (basis_.cols() == 0 || basis_.rows() < basis_.cols()) {
    throw InputError("Grassmann basis must have 1 <= rank <= ambient dimension");
  }
  if (!basis_.allFinite()) throw InputError("Grassmann basis has non-finite entries");
  const Eigen::MatrixXd gram = basis_.transpose() * basis_;
  const double err = (gram - Eigen::MatrixXd::Identity(basis_.cols(), basis_.cols())).cwiseAbs().maxCoeff();
  if (err > kOrthonormalityTol) {
    throw InputError("Grassmann basis is not orthonormal (max |B'B - I| = " + std::to_string(err) + ")");
  }
}

GrassmannPoint GrassmannPoint::from_spanning_set(const Eigen::MatrixXd& columns) {
  if (columns.cols() == 0 || columns.rows() < columns.cols()) {
    throw InputError("spanning set must have 1 <= columns <= rows");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(columns);
  if (qr.rank() < columns.cols()) throw DegenerateDataError("spanning set is rank deficient");
  return GrassmannPoint(thin_q(columns));
}

Eigen::VectorXd principal_angles(const GrassmannPoint& x, const GrassmannPoint& y) {
  check_compatible(x, y);
  // Cosines from X'Y and sines from the component of Y orthogonal to X. Pairing
  // descending cosines with ascending sines and taking atan2 keeps precision at
  // both ends of [0, pi/2], where a bare arccos loses half the digits near 0.
  const Eigen::MatrixXd cross = x.basis().transpose() * y.basis();
  const Eigen::MatrixXd residual = y.basis() - x.basis() * cross;
  Eigen::JacobiSVD<Eigen::MatrixXd> cos_svd(cross);
  Eigen::JacobiSVD<Eigen::MatrixXd> sin_svd(residual);
  const Eigen::VectorXd cosines = cos_svd.singularValues().cwiseMin(1.0).cwiseMax(0.0);
  const Eigen::VectorXd sines = sin_svd.singularValues().cwiseMin(1.0).cwiseMax(0.0);
  const Eigen::Index r = x.rank();
  Eigen::VectorXd angles(r);
  for (Eigen::Index k = 0; k < r; ++k) {
    angles(k) = std::atan2(sines(r - 1 - k), cosines(k));
  }
  std::sort(angles.data(), angles.data() + r);
  return angles.cwiseMax(0.0).cwiseMin(std::numbers::pi / 2);
}

double geodesic_distance(const GrassmannPoint& x, const GrassmannPoint& y) {
  return principal_angles(x, y).norm();
}

double max_geodesic_distance(Eigen::Index rank) {
  return std::sqrt(static_cast<double>(rank)) * std::numbers::pi / 2;
}

TangentVector log_map(const GrassmannPoint& x, const GrassmannPoint& y, double angle_tol) {
  const Eigen::VectorXd angles = principal_angles(x, y);
  const double max_angle = angles.maxCoeff();
  if (max_angle >= std::numbers::pi / 2 - angle_tol) {
    throw CutLocusError("logarithm map undefined: principal angle " + std::to_string(max_angle) +
                            " is at the cut locus",
                        max_angle);
  }
  const Eigen::MatrixXd cross = x.basis().transpose() * y.basis();
  const Eigen::MatrixXd residual = y.basis() - x.basis() * cross;
  // L = residual * cross^{-1}, solved as cross' L' = residual'.
  const Eigen::MatrixXd lifted = cross.transpose().fullPivLu().solve(residual.transpose()).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(lifted, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd arc = svd.singularValues().array().atan().matrix();
  Eigen::MatrixXd delta = svd.matrixU() * arc.asDiagonal() * svd.matrixV().transpose();
  // Remove the O(eps) vertical drift introduced by the solve.
  delta -= x.basis() * (x.basis().transpose() * delta);
  return TangentVector{x, std::move(delta)};
}

GrassmannPoint exp_map(const GrassmannPoint& x, const TangentVector& v) {
  if (v.base.ambient_dim() != x.ambient_dim() || v.base.rank() != x.rank() ||
      (v.base.basis() - x.basis()).cwiseAbs().maxCoeff() > 1e-12) {
    throw InputError("tangent vector is not based at the given point");
  }
  if (v.delta.rows() != x.ambient_dim() || v.delta.cols() != x.rank()) {
    throw InputError("tangent vector shape does not match the base point");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(v.delta, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();
  const Eigen::MatrixXd& vmat = svd.matrixV();
  const Eigen::MatrixXd moved = x.basis() * vmat * s.array().cos().matrix().asDiagonal() * vmat.transpose() +
                                svd.matrixU() * s.array().sin().matrix().asDiagonal() * vmat.transpose();
  return GrassmannPoint(thin_q(moved));
}

Eigen::VectorXd flatten(const TangentVector& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.delta.data(), v.delta.size());
}

Eigen::MatrixXd pairwise_distances(const std::vector<GrassmannPoint>& points, int threads) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n, n);
  parallel_for(points.size(), threads, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = geodesic_distance(points[i], points[j]);
    }
  });
  dist.triangularView<Eigen::StrictlyLower>() = dist.transpose();
  return dist;
}

}  // namespace grassclust

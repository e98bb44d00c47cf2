#include "grassclust/egct.hpp"

#include "grassclust/errors.hpp"
#include "grassclust/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace grassclust {

void EgctParams::validate(long feature_count) const {
  if (k_nn < 2) throw ConfigError("k_nn must be at least 2");
  if (feature_count >= 0 && k_nn >= feature_count) {
    throw InputError("k_nn = " + std::to_string(k_nn) + " needs more than " + std::to_string(k_nn) +
                     " features, got " + std::to_string(feature_count));
  }
  if (!(sigma_alpha > 0.0)) throw ConfigError("sigma_alpha must be positive");
  if (!(sigma_theta > 0.0)) throw ConfigError("sigma_theta must be positive");
  if (!(pca_energy > 0.0 && pca_energy <= 1.0)) throw ConfigError("pca_energy must lie in (0, 1]");
  if (!(louvain_resolution > 0.0)) throw ConfigError("louvain_resolution must be positive");
}

namespace {

struct PairGeometry {
  Eigen::MatrixXd distance;
  Eigen::MatrixXd max_angle;
};

PairGeometry pairwise_geometry(const std::vector<GrassmannPoint>& features, int threads) {
  const auto n = static_cast<Eigen::Index>(features.size());
  PairGeometry g{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};
  parallel_for(features.size(), threads, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < features.size(); ++j) {
      const Eigen::VectorXd angles = principal_angles(features[i], features[j]);
      const auto a = static_cast<Eigen::Index>(i);
      const auto b = static_cast<Eigen::Index>(j);
      g.distance(a, b) = angles.norm();
      g.max_angle(a, b) = angles.maxCoeff();
    }
  });
  g.distance.triangularView<Eigen::StrictlyLower>() = g.distance.transpose();
  g.max_angle.triangularView<Eigen::StrictlyLower>() = g.max_angle.transpose();
  return g;
}

}  // namespace

std::vector<int> knn_from_distances(const Eigen::MatrixXd& distances, const Eigen::MatrixXd& max_angles, int i,
                                    int k_nn, double angle_tol, double max_distance) {
  const auto n = static_cast<int>(distances.rows());
  if (k_nn < 1) throw InputError("k_nn must be positive");
  if (n < k_nn + 1) {
    throw InputError("knn needs at least " + std::to_string(k_nn + 1) + " features, got " + std::to_string(n));
  }
  if (i < 0 || i >= n) throw InputError("feature index out of range");
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n - 1));
  std::vector<double> key(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    order.push_back(j);
    const bool cut = max_angles(i, j) >= std::numbers::pi / 2 - angle_tol;
    key[static_cast<std::size_t>(j)] = cut ? max_distance : distances(i, j);
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return key[static_cast<std::size_t>(a)] < key[static_cast<std::size_t>(b)];
  });
  order.resize(static_cast<std::size_t>(k_nn));
  return order;
}

std::vector<int> knn(const std::vector<GrassmannPoint>& features, int i, int k_nn, double angle_tol) {
  const auto n = static_cast<Eigen::Index>(features.size());
  if (n < k_nn + 1) {
    throw InputError("knn needs at least " + std::to_string(k_nn + 1) + " features, got " + std::to_string(n));
  }
  if (i < 0 || i >= n) throw InputError("feature index out of range");
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd max_angle = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j == i) continue;
    const Eigen::VectorXd angles = principal_angles(features[static_cast<std::size_t>(i)], features[static_cast<std::size_t>(j)]);
    dist(i, j) = angles.norm();
    max_angle(i, j) = angles.maxCoeff();
  }
  return knn_from_distances(dist, max_angle, i, k_nn, angle_tol, max_geodesic_distance(features.front().rank()));
}

NeighborhoodStats neighborhood_stats(const std::vector<GrassmannPoint>& features, int i,
                                     const std::vector<int>& neighbor_ids, const EgctParams& params) {
  const auto& base = features.at(static_cast<std::size_t>(i));
  NeighborhoodStats s;
  s.neighbor_ids = neighbor_ids;
  const auto k = static_cast<Eigen::Index>(neighbor_ids.size());
  s.usable.assign(neighbor_ids.size(), 0);
  s.code_weights = Eigen::VectorXd::Zero(k);
  s.angles = Eigen::VectorXd::Zero(k);

  const Eigen::Index dim = base.ambient_dim() * base.rank();
  std::vector<Eigen::VectorXd> atoms;
  std::vector<Eigen::Index> slot;
  for (Eigen::Index j = 0; j < k; ++j) {
    try {
      const TangentVector v = log_map(base, features.at(static_cast<std::size_t>(neighbor_ids[static_cast<std::size_t>(j)])),
                                      params.angle_tol);
      atoms.push_back(flatten(v));
      slot.push_back(j);
      s.usable[static_cast<std::size_t>(j)] = 1;
    } catch (const CutLocusError&) {
      ++s.cut_locus_dropped;
    }
  }
  const auto usable = static_cast<Eigen::Index>(atoms.size());
  if (usable < 2) {
    throw DegenerateDataError("feature " + std::to_string(i) + " has " + std::to_string(usable) +
                              " usable neighbours after the cut-locus check; at least 2 are required");
  }

  s.tangents.resize(dim, usable);
  for (Eigen::Index c = 0; c < usable; ++c) s.tangents.col(c) = atoms[static_cast<std::size_t>(c)];

  // Sparse coding of the base point (the origin of its own tangent space).
  const auto problem = SparseCodingProblem::distance_weighted(Eigen::VectorXd::Zero(dim), atoms, params.sigma_alpha);
  const SparseCodingResult code = solve_sparse_coding(problem, params.sparse_coding);
  s.code_degenerate = code.degenerate;
  s.code_converged = code.converged;
  for (Eigen::Index c = 0; c < usable; ++c) s.code_weights(slot[static_cast<std::size_t>(c)]) = code.coefficients(c);

  // Sample covariance over the neighbours, divisor |N| - 1.
  const Eigen::VectorXd mean = s.tangents.rowwise().mean();
  const Eigen::MatrixXd centered = s.tangents.colwise() - mean;
  s.covariance = centered * centered.transpose() / static_cast<double>(usable - 1);

  // Principal eigenspace via the SVD of the centred data: eigenvalues are
  // sv^2 / (|N| - 1), eigenvectors the left singular vectors.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU);
  const Eigen::VectorXd energy = svd.singularValues().array().square().matrix();
  const double scale = s.tangents.colwise().norm().maxCoeff();
  if (svd.singularValues().size() == 0 || svd.singularValues()(0) <= 1e-12 * scale || scale == 0.0) {
    // All usable tangents coincide: their common direction spans the data.
    const double mean_norm = mean.norm();
    s.eigenspace = Eigen::MatrixXd::Zero(dim, 1);
    if (mean_norm > 0.0) {
      s.eigenspace.col(0) = mean / mean_norm;
    } else {
      s.eigenspace(0, 0) = 1.0;
    }
  } else {
    const double total = energy.sum();
    Eigen::Index d = 0;
    double cumulative = 0.0;
    while (d < energy.size()) {
      cumulative += energy(d);
      ++d;
      if (cumulative >= params.pca_energy * total * (1.0 - 1e-12)) break;
    }
    s.eigenspace = svd.matrixU().leftCols(d);
  }

  // Angle between each tangent and the eigenspace.
  for (Eigen::Index c = 0; c < usable; ++c) {
    const Eigen::VectorXd v = s.tangents.col(c);
    const Eigen::VectorXd coords = s.eigenspace.transpose() * v;
    const double along = coords.norm();
    const double across = (v - s.eigenspace * coords).norm();
    s.angles(slot[static_cast<std::size_t>(c)]) = (along == 0.0 && across == 0.0) ? 0.0 : std::atan2(across, along);
  }
  return s;
}

NeighborhoodStats neighborhood_stats(const std::vector<GrassmannPoint>& features, int i, const EgctParams& params) {
  params.validate(static_cast<long>(features.size()));
  return neighborhood_stats(features, i, knn(features, i, params.k_nn, params.angle_tol), params);
}

double affinity_weight(double alpha_ij, double alpha_ji, double theta_ij, double theta_ji, double sigma_theta) {
  return std::exp(std::abs(alpha_ij) + std::abs(alpha_ji)) * std::exp(-(theta_ij + theta_ji) / sigma_theta);
}

WeightedGraph build_affinity(const std::vector<NeighborhoodStats>& stats, const EgctParams& params) {
  const auto n = static_cast<Eigen::Index>(stats.size());
  Eigen::MatrixXd alpha = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(n, n);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> linked = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, n, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = stats[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < s.neighbor_ids.size(); ++j) {
      if (!s.usable[j]) continue;
      const Eigen::Index other = s.neighbor_ids[j];
      if (other < 0 || other >= n || other == i) throw InputError("neighbour index out of range");
      alpha(i, other) = s.code_weights(static_cast<Eigen::Index>(j));
      theta(i, other) = s.angles(static_cast<Eigen::Index>(j));
      linked(i, other) = true;
    }
  }
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (!linked(i, j) && !linked(j, i)) continue;
      w(i, j) = affinity_weight(alpha(i, j), alpha(j, i), theta(i, j), theta(j, i), params.sigma_theta);
      w(j, i) = w(i, j);
    }
  }
  return WeightedGraph(std::move(w));
}

EgctResult egct(const std::vector<GrassmannPoint>& features, const EgctParams& params, int threads) {
  params.validate(static_cast<long>(features.size()));
  for (const auto& f : features) {
    if (f.ambient_dim() != features.front().ambient_dim() || f.rank() != features.front().rank()) {
      throw InputError("features live on different Grassmannians");
    }
  }
  const PairGeometry geom = pairwise_geometry(features, threads);
  const double max_dist = max_geodesic_distance(features.front().rank());
  const std::size_t n = features.size();

  EgctResult result;
  result.stats.resize(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const auto idx = static_cast<int>(i);
    const auto neighbors = knn_from_distances(geom.distance, geom.max_angle, idx, params.k_nn, params.angle_tol, max_dist);
    result.stats[i] = neighborhood_stats(features, idx, neighbors, params);
  });
  result.affinity = build_affinity(result.stats, params);

  int dropped = 0;
  int unconverged = 0;
  for (const auto& s : result.stats) {
    dropped += s.cut_locus_dropped;
    unconverged += s.code_converged ? 0 : 1;
  }
  if (dropped > 0) {
    result.warnings.push_back(std::to_string(dropped) + " neighbour(s) at the cut locus were excluded from tangent statistics");
  }
  if (unconverged > 0) {
    result.warnings.push_back("sparse coding hit max_iter for " + std::to_string(unconverged) + " feature(s)");
  }

  if (geom.distance.maxCoeff() <= 1e-12) {
    result.assignment = ClusterAssignment(std::vector<int>(n, 0));
    result.warnings.push_back("all features coincide; returning a single cluster");
  } else {
    LouvainOptions lo;
    lo.resolution = params.louvain_resolution;
    lo.seed = params.seed;
    LouvainResult lr = louvain(result.affinity, lo);
    result.assignment = std::move(lr.assignment);
    result.level_modularity = std::move(lr.level_modularity);
  }
  result.modularity = modularity(result.affinity, result.assignment, params.louvain_resolution);
  return result;
}

}  // namespace grassclust

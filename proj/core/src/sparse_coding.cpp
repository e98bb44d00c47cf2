#include "grassclust/sparse_coding.hpp"

#include "grassclust/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace grassclust {

namespace {

double soft(double x, double tau) {
  if (x > tau) return x - tau;
  if (x < -tau) return x + tau;
  return 0.0;
}

void validate(const SparseCodingProblem& p) {
  if (p.atoms.empty()) throw InputError("sparse coding needs at least one atom");
  if (p.penalties.size() != static_cast<Eigen::Index>(p.atoms.size())) {
    throw InputError("sparse coding: " + std::to_string(p.penalties.size()) + " penalties for " +
                     std::to_string(p.atoms.size()) + " atoms");
  }
  for (const auto& atom : p.atoms) {
    if (atom.size() != p.target.size()) throw InputError("sparse coding: atom and target dimensions differ");
  }
  for (Eigen::Index j = 0; j < p.penalties.size(); ++j) {
    if (!(p.penalties(j) > 0.0) || !std::isfinite(p.penalties(j))) {
      throw InputError("sparse coding penalties must be positive and finite");
    }
  }
}

}  // namespace

SparseCodingProblem SparseCodingProblem::distance_weighted(Eigen::VectorXd target, std::vector<Eigen::VectorXd> atoms,
                                                           double sigma_alpha) {
  if (!(sigma_alpha > 0.0)) throw ConfigError("sigma_alpha must be positive");
  Eigen::VectorXd penalties(static_cast<Eigen::Index>(atoms.size()));
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (atoms[j].size() != target.size()) throw InputError("sparse coding: atom and target dimensions differ");
    penalties(static_cast<Eigen::Index>(j)) = std::exp((atoms[j] - target).norm() / sigma_alpha);
  }
  return {std::move(target), std::move(atoms), std::move(penalties)};
}

double sparse_coding_objective(const SparseCodingProblem& p, const Eigen::VectorXd& alpha) {
  Eigen::VectorXd residual = p.target;
  for (std::size_t j = 0; j < p.atoms.size(); ++j) residual -= alpha(static_cast<Eigen::Index>(j)) * p.atoms[j];
  return residual.squaredNorm() + p.penalties.dot(alpha.cwiseAbs());
}

Eigen::VectorXd prox_weighted_l1_affine(const Eigen::VectorXd& z, const Eigen::VectorXd& thresholds) {
  const Eigen::Index n = z.size();
  // phi(nu) = sum_j soft(z_j - nu, tau_j) is continuous, nonincreasing and
  // piecewise linear with breakpoints z_j -/+ tau_j. Find nu with phi(nu) = 1.
  auto phi = [&](double nu) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) s += soft(z(j) - nu, thresholds(j));
    return s;
  };
  std::vector<double> breaks;
  breaks.reserve(static_cast<std::size_t>(2 * n));
  for (Eigen::Index j = 0; j < n; ++j) {
    breaks.push_back(z(j) - thresholds(j));
    breaks.push_back(z(j) + thresholds(j));
  }
  std::sort(breaks.begin(), breaks.end());

  double nu = 0.0;
  const double phi_lo = phi(breaks.front());
  const double phi_hi = phi(breaks.back());
  if (phi_lo <= 1.0) {
    // Left of every breakpoint all coordinates are positive and active.
    nu = ((z - thresholds).sum() - 1.0) / static_cast<double>(n);
  } else if (phi_hi >= 1.0) {
    nu = ((z + thresholds).sum() - 1.0) / static_cast<double>(n);
  } else {
    std::size_t lo = 0;
    std::size_t hi = breaks.size() - 1;
    double f_lo = phi_lo;
    double f_hi = phi_hi;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      const double f_mid = phi(breaks[mid]);
      if (f_mid >= 1.0) {
        lo = mid;
        f_lo = f_mid;
      } else {
        hi = mid;
        f_hi = f_mid;
      }
    }
    nu = (f_lo == f_hi) ? breaks[lo] : breaks[lo] + (f_lo - 1.0) * (breaks[hi] - breaks[lo]) / (f_lo - f_hi);
  }

  Eigen::VectorXd alpha(n);
  for (Eigen::Index j = 0; j < n; ++j) alpha(j) = soft(z(j) - nu, thresholds(j));

  // Absorb the rounding residual of sum(alpha) into the largest active coordinate.
  const double residual = 1.0 - alpha.sum();
  Eigen::Index best = 0;
  alpha.cwiseAbs().maxCoeff(&best);
  if (alpha(best) != 0.0) alpha(best) += residual;
  return alpha;
}

SparseCodingResult solve_sparse_coding(const SparseCodingProblem& p, const SparseCodingOptions& options) {
  validate(p);
  if (!(options.tol > 0.0)) throw InputError("sparse coding tolerance must be positive");
  const auto n = static_cast<Eigen::Index>(p.atoms.size());
  const Eigen::Index dim = p.target.size();

  SparseCodingResult result;
  if (n == 1) {
    result.coefficients = Eigen::VectorXd::Ones(1);
    result.objective = sparse_coding_objective(p, result.coefficients);
    result.objective_trace = {result.objective};
    result.converged = true;
    return result;
  }

  Eigen::MatrixXd atoms(dim, n);
  for (Eigen::Index j = 0; j < n; ++j) atoms.col(j) = p.atoms[static_cast<std::size_t>(j)];

  if (atoms.colwise().norm().maxCoeff() <= options.zero_atom_tol) {
    // Quadratic term is constant on the hyperplane; uniform weights minimize
    // the l1 term when penalties are equal.
    result.coefficients = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    result.objective = sparse_coding_objective(p, result.coefficients);
    result.objective_trace = {result.objective};
    result.converged = true;
    result.degenerate = true;
    return result;
  }

  const Eigen::MatrixXd gram = atoms.transpose() * atoms;
  const Eigen::VectorXd linear = atoms.transpose() * p.target;
  const double target_sq = p.target.squaredNorm();
  auto objective = [&](const Eigen::VectorXd& a) {
    return std::max(0.0, a.dot(gram * a) - 2.0 * a.dot(linear) + target_sq) + p.penalties.dot(a.cwiseAbs());
  };

  const double lipschitz = 2.0 * Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly)
                                     .eigenvalues()
                                     .maxCoeff();
  const double step = 1.0 / std::max(lipschitz, 1e-300);
  const Eigen::VectorXd thresholds = step * p.penalties;

  auto prox_grad = [&](const Eigen::VectorXd& y) {
    const Eigen::VectorXd grad = 2.0 * (gram * y - linear);
    return prox_weighted_l1_affine(y - step * grad, thresholds);
  };

  // Start from the atom with the smallest penalty, a feasible vertex.
  Eigen::Index start = 0;
  p.penalties.minCoeff(&start);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  x(start) = 1.0;
  double fx = objective(x);
  result.objective_trace.push_back(fx);

  Eigen::VectorXd y = x;
  double momentum = 1.0;
  int it = 0;
  for (; it < options.max_iter; ++it) {
    Eigen::VectorXd candidate = prox_grad(y);
    double fc = objective(candidate);
    bool restarted = false;
    if (fc > fx) {
      // Momentum overshot: fall back to a plain proximal-gradient step, which
      // never increases the objective.
      candidate = prox_grad(x);
      fc = objective(candidate);
      momentum = 1.0;
      restarted = true;
      if (fc > fx) {
        candidate = x;
        fc = fx;
      }
    }
    const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    y = restarted ? candidate : Eigen::VectorXd(candidate + ((momentum - 1.0) / next_momentum) * (candidate - x));
    momentum = restarted ? 1.0 : next_momentum;

    const double change = std::abs(fx - fc);
    const double step_norm = (candidate - x).norm();
    x = std::move(candidate);
    fx = fc;
    result.objective_trace.push_back(fx);
    if (change <= options.tol * std::max(1.0, std::abs(fx)) && step_norm <= std::sqrt(options.tol)) {
      result.converged = true;
      ++it;
      break;
    }
  }
  result.coefficients = x;
  result.objective = sparse_coding_objective(p, x);
  result.iterations = it;
  return result;
}

}  // namespace grassclust

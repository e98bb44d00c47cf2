#include "grassclust/evaluation.hpp"

#include "grassclust/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace grassclust {

namespace {

void check_lengths(const ClusterAssignment& pred, const ClusterAssignment& truth) {
  if (pred.size() != truth.size()) {
    throw InputError("label vectors differ in length (" + std::to_string(pred.size()) + " vs " +
                     std::to_string(truth.size()) + ")");
  }
  if (pred.size() == 0) throw InputError("cannot score empty labelings");
}

void exhaustive(const Eigen::MatrixXi& w, Eigen::Index row, std::vector<char>& used, long current, long& best) {
  if (row == w.rows()) {
    best = std::max(best, current);
    return;
  }
  exhaustive(w, row + 1, used, current, best);  // leave this row unmatched
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    if (used[static_cast<std::size_t>(c)]) continue;
    used[static_cast<std::size_t>(c)] = 1;
    exhaustive(w, row + 1, used, current + w(row, c), best);
    used[static_cast<std::size_t>(c)] = 0;
  }
}

double entropy(const Eigen::VectorXi& counts, double n) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < counts.size(); ++i) {
    if (counts(i) > 0) {
      const double p = counts(i) / n;
      h -= p * std::log(p);
    }
  }
  return h;
}

}  // namespace

ContingencyTable ContingencyTable::build(const ClusterAssignment& pred, const ClusterAssignment& truth) {
  check_lengths(pred, truth);
  ContingencyTable t{Eigen::MatrixXi::Zero(pred.num_clusters(), truth.num_clusters())};
  for (std::size_t i = 0; i < pred.size(); ++i) ++t.counts(pred[i], truth[i]);
  return t;
}

long max_matching_exhaustive(const Eigen::MatrixXi& weights) {
  // Recurse over the shorter side.
  const Eigen::MatrixXi w = weights.rows() <= weights.cols() ? weights : Eigen::MatrixXi(weights.transpose());
  std::vector<char> used(static_cast<std::size_t>(w.cols()), 0);
  long best = 0;
  exhaustive(w, 0, used, 0, best);
  return best;
}

long max_matching_hungarian(const Eigen::MatrixXi& weights) {
  // Square cost matrix (negated weights, zero padding) solved with the
  // O(n^3) shortest-augmenting-path Hungarian method.
  const Eigen::Index n = std::max(weights.rows(), weights.cols());
  if (n == 0) return 0;
  const long big = weights.size() > 0 ? weights.maxCoeff() : 0;
  auto cost = [&](Eigen::Index i, Eigen::Index j) -> long {
    const long w = (i < weights.rows() && j < weights.cols()) ? weights(i, j) : 0;
    return big - w;
  };
  constexpr long inf = std::numeric_limits<long>::max() / 4;
  std::vector<long> u(static_cast<std::size_t>(n + 1), 0), v(static_cast<std::size_t>(n + 1), 0);
  std::vector<Eigen::Index> p(static_cast<std::size_t>(n + 1), 0), way(static_cast<std::size_t>(n + 1), 0);
  for (Eigen::Index i = 1; i <= n; ++i) {
    p[0] = i;
    Eigen::Index j0 = 0;
    std::vector<long> minv(static_cast<std::size_t>(n + 1), inf);
    std::vector<char> used(static_cast<std::size_t>(n + 1), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const Eigen::Index i0 = p[static_cast<std::size_t>(j0)];
      long delta = inf;
      Eigen::Index j1 = 0;
      for (Eigen::Index j = 1; j <= n; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        if (used[sj]) continue;
        const long cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[sj];
        if (cur < minv[sj]) {
          minv[sj] = cur;
          way[sj] = j0;
        }
        if (minv[sj] < delta) {
          delta = minv[sj];
          j1 = j;
        }
      }
      for (Eigen::Index j = 0; j <= n; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        if (used[sj]) {
          u[static_cast<std::size_t>(p[sj])] += delta;
          v[sj] -= delta;
        } else {
          minv[sj] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const Eigen::Index j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  long total = 0;
  for (Eigen::Index j = 1; j <= n; ++j) {
    const Eigen::Index i = p[static_cast<std::size_t>(j)] - 1;
    if (i < weights.rows() && j - 1 < weights.cols()) total += weights(i, j - 1);
  }
  return total;
}

double accuracy(const ClusterAssignment& pred, const ClusterAssignment& truth) {
  const ContingencyTable table = ContingencyTable::build(pred, truth);
  const int k = std::max(pred.num_clusters(), truth.num_clusters());
  const long matched = k <= 8 ? max_matching_exhaustive(table.counts) : max_matching_hungarian(table.counts);
  return static_cast<double>(matched) / static_cast<double>(pred.size());
}

double nmi(const ClusterAssignment& pred, const ClusterAssignment& truth) {
  const ContingencyTable table = ContingencyTable::build(pred, truth);
  const auto n = static_cast<double>(pred.size());
  const Eigen::VectorXi row_sums = table.counts.rowwise().sum();
  const Eigen::VectorXi col_sums = table.counts.colwise().sum().transpose();

  // Identical partitions: every predicted cluster maps onto exactly one true
  // cluster and vice versa.
  const bool identical = pred.num_clusters() == truth.num_clusters() &&
                         (table.counts.array() > 0).count() == pred.num_clusters();
  if (identical) return 1.0;

  const double h_pred = entropy(row_sums, n);
  const double h_true = entropy(col_sums, n);
  if (h_pred == 0.0 || h_true == 0.0) return 0.0;

  double mi = 0.0;
  for (Eigen::Index i = 0; i < table.counts.rows(); ++i) {
    for (Eigen::Index j = 0; j < table.counts.cols(); ++j) {
      const int c = table.counts(i, j);
      if (c == 0) continue;
      mi += (c / n) * std::log(c * n / (static_cast<double>(row_sums(i)) * col_sums(j)));
    }
  }
  return std::clamp(mi / std::sqrt(h_pred * h_true), 0.0, 1.0);
}

namespace {

struct LloydRun {
  std::vector<int> labels;
  double wcss = 0.0;
  std::vector<double> trace;
};

LloydRun lloyd(const Eigen::MatrixXd& x, int k, int max_iter, std::mt19937_64& rng) {
  const Eigen::Index n = x.cols();
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  // k-means++ seeding.
  Eigen::MatrixXd centers(x.rows(), k);
  centers.col(0) = x.col(static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(n)));
  Eigen::VectorXd d2 = (x.colwise() - centers.col(0)).colwise().squaredNorm().transpose();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double r = uniform(rng) * total;
      for (pick = 0; pick < n - 1; ++pick) {
        r -= d2(pick);
        if (r <= 0.0) break;
      }
    } else {
      pick = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(n));
    }
    centers.col(c) = x.col(pick);
    d2 = d2.cwiseMin((x.colwise() - centers.col(c)).colwise().squaredNorm().transpose());
  }

  LloydRun run;
  run.labels.assign(static_cast<std::size_t>(n), -1);
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      (centers.colwise() - x.col(i)).colwise().squaredNorm().minCoeff(&best);
      auto& label = run.labels[static_cast<std::size_t>(i)];
      if (label != static_cast<int>(best)) {
        label = static_cast<int>(best);
        changed = true;
      }
    }
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(x.rows(), k);
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.col(run.labels[static_cast<std::size_t>(i)]) += x.col(i);
      ++counts(run.labels[static_cast<std::size_t>(i)]);
    }
    for (int c = 0; c < k; ++c) {
      if (counts(c) > 0) centers.col(c) = sums.col(c) / counts(c);
    }
    // Empty cluster: move its center onto the point farthest from its own center.
    for (int c = 0; c < k; ++c) {
      if (counts(c) > 0) continue;
      Eigen::Index far = 0;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const int li = run.labels[static_cast<std::size_t>(i)];
        if (counts(li) <= 1) continue;
        const double d = (x.col(i) - centers.col(li)).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far_d < 0.0) continue;
      const int old = run.labels[static_cast<std::size_t>(far)];
      --counts(old);
      run.labels[static_cast<std::size_t>(far)] = c;
      counts(c) = 1;
      centers.col(c) = x.col(far);
      changed = true;
    }
    double wcss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      wcss += (x.col(i) - centers.col(run.labels[static_cast<std::size_t>(i)])).squaredNorm();
    }
    run.trace.push_back(wcss);
    run.wcss = wcss;
    if (!changed) break;
  }
  return run;
}

}  // namespace

KMeansResult kmeans_baseline(const std::vector<Eigen::VectorXd>& vectors, int k, const KMeansOptions& options) {
  const auto n = static_cast<int>(vectors.size());
  if (k < 1) throw InputError("k must be positive");
  if (k > n) throw InputError("k = " + std::to_string(k) + " exceeds the " + std::to_string(n) + " vectors");
  const Eigen::Index dim = vectors.front().size();
  Eigen::MatrixXd x(dim, n);
  for (int i = 0; i < n; ++i) {
    if (vectors[static_cast<std::size_t>(i)].size() != dim) throw InputError("vectors differ in dimension");
    x.col(i) = vectors[static_cast<std::size_t>(i)];
  }

  std::mt19937_64 rng(options.seed);
  LloydRun best;
  bool have = false;
  for (int r = 0; r < std::max(1, options.restarts); ++r) {
    LloydRun run = lloyd(x, k, options.max_iter, rng);
    if (!have || run.wcss < best.wcss) {
      best = std::move(run);
      have = true;
    }
  }
  return {ClusterAssignment::from_raw(best.labels), best.wcss, std::move(best.trace)};
}

}  // namespace grassclust

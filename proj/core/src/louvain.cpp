#include "grassclust/louvain.hpp"

#include "grassclust/errors.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <utility>

namespace grassclust {

WeightedGraph::WeightedGraph(Eigen::MatrixXd weights) : weights_(std::move(weights)) {
  if (weights_.rows() != weights_.cols()) throw InputError("affinity matrix must be square");
  if (!weights_.allFinite()) throw InputError("affinity matrix has non-finite entries");
  if (weights_.size() > 0) {
    if (weights_.minCoeff() < 0.0) throw InputError("affinity matrix has negative entries");
    if (weights_.diagonal().cwiseAbs().maxCoeff() != 0.0) throw InputError("affinity matrix diagonal must be zero");
    const double scale = std::max(1.0, weights_.cwiseAbs().maxCoeff());
    if ((weights_ - weights_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
      throw InputError("affinity matrix is not symmetric");
    }
  }
}

double modularity(const WeightedGraph& graph, const ClusterAssignment& assignment, double resolution) {
  if (static_cast<Eigen::Index>(assignment.size()) != graph.size()) {
    throw InputError("assignment size does not match the graph");
  }
  const double two_m = graph.total_weight();
  if (!(two_m > 0.0)) throw DegenerateDataError("modularity undefined for a graph without edges");
  const Eigen::VectorXd deg = graph.degrees();
  const auto k = static_cast<std::size_t>(assignment.num_clusters());
  std::vector<double> internal(k, 0.0), total(k, 0.0);
  const auto& w = graph.weights();
  for (Eigen::Index i = 0; i < graph.size(); ++i) {
    const auto ci = static_cast<std::size_t>(assignment[static_cast<std::size_t>(i)]);
    total[ci] += deg(i);
    for (Eigen::Index j = 0; j < graph.size(); ++j) {
      if (assignment[static_cast<std::size_t>(j)] == static_cast<int>(ci)) internal[ci] += w(i, j);
    }
  }
  double q = 0.0;
  for (std::size_t c = 0; c < k; ++c) q += internal[c] / two_m - resolution * (total[c] / two_m) * (total[c] / two_m);
  return q;
}

namespace {

// Graph at one Louvain level. Self loops carry the weight internal to the
// community a node stands for (both orientations), so degree = row sum.
struct LevelGraph {
  std::vector<std::vector<std::pair<int, double>>> adjacency;  // excludes self loops
  std::vector<double> self_loop;
  std::vector<double> degree;

  int size() const { return static_cast<int>(adjacency.size()); }
};

LevelGraph from_matrix(const Eigen::MatrixXd& w) {
  const auto n = static_cast<int>(w.rows());
  LevelGraph g;
  g.adjacency.resize(static_cast<std::size_t>(n));
  g.self_loop.assign(static_cast<std::size_t>(n), 0.0);
  g.degree.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double wij = w(i, j);
      if (wij == 0.0) continue;
      if (i == j) {
        g.self_loop[static_cast<std::size_t>(i)] = wij;
      } else {
        g.adjacency[static_cast<std::size_t>(i)].emplace_back(j, wij);
      }
      g.degree[static_cast<std::size_t>(i)] += wij;
    }
  }
  return g;
}

double level_modularity(const LevelGraph& g, const std::vector<int>& comm, double two_m, double resolution) {
  std::vector<double> internal(static_cast<std::size_t>(g.size()), 0.0), total(static_cast<std::size_t>(g.size()), 0.0);
  for (int i = 0; i < g.size(); ++i) {
    const auto ci = static_cast<std::size_t>(comm[static_cast<std::size_t>(i)]);
    total[ci] += g.degree[static_cast<std::size_t>(i)];
    internal[ci] += g.self_loop[static_cast<std::size_t>(i)];
    for (const auto& [j, w] : g.adjacency[static_cast<std::size_t>(i)]) {
      if (comm[static_cast<std::size_t>(j)] == static_cast<int>(ci)) internal[ci] += w;
    }
  }
  double q = 0.0;
  for (std::size_t c = 0; c < internal.size(); ++c) {
    q += internal[c] / two_m - resolution * (total[c] / two_m) * (total[c] / two_m);
  }
  return q;
}

// Greedy local moving. Returns the community of every node (not compacted).
std::vector<int> local_moving(const LevelGraph& g, double two_m, const LouvainOptions& opt, std::mt19937_64& rng) {
  const int n = g.size();
  std::vector<int> comm(static_cast<std::size_t>(n));
  std::iota(comm.begin(), comm.end(), 0);
  std::vector<double> total(g.degree);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }

  std::vector<double> link(static_cast<std::size_t>(n), 0.0);
  std::vector<int> touched;
  double q = level_modularity(g, comm, two_m, opt.resolution);
  for (int pass = 0; pass < 1000; ++pass) {
    bool moved = false;
    for (int i : order) {
      const auto si = static_cast<std::size_t>(i);
      const int home = comm[si];
      const double ki = g.degree[si];

      touched.clear();
      for (const auto& [j, w] : g.adjacency[si]) {
        const int c = comm[static_cast<std::size_t>(j)];
        if (link[static_cast<std::size_t>(c)] == 0.0) touched.push_back(c);
        link[static_cast<std::size_t>(c)] += w;
      }
      total[static_cast<std::size_t>(home)] -= ki;

      auto gain = [&](int c) {
        return link[static_cast<std::size_t>(c)] - opt.resolution * total[static_cast<std::size_t>(c)] * ki / two_m;
      };
      int best = home;
      double best_gain = gain(home);
      for (int c : touched) {
        const double gc = gain(c);
        if (gc > best_gain + 1e-12 * std::max(1.0, std::abs(best_gain))) {
          best = c;
          best_gain = gc;
        }
      }
      total[static_cast<std::size_t>(best)] += ki;
      if (best != home) {
        comm[si] = best;
        moved = true;
      }
      for (int c : touched) link[static_cast<std::size_t>(c)] = 0.0;
    }
    if (!moved) break;
    const double next_q = level_modularity(g, comm, two_m, opt.resolution);
    const bool improved = next_q - q > opt.min_gain;
    q = next_q;
    if (!improved) break;
  }
  return comm;
}

// Compacts labels in order of first appearance; returns the community count.
int compact(std::vector<int>& comm) {
  std::vector<int> remap(comm.size(), -1);
  int next = 0;
  for (int& c : comm) {
    auto& r = remap[static_cast<std::size_t>(c)];
    if (r < 0) r = next++;
    c = r;
  }
  return next;
}

LevelGraph aggregate(const LevelGraph& g, const std::vector<int>& comm, int k) {
  LevelGraph out;
  out.adjacency.resize(static_cast<std::size_t>(k));
  out.self_loop.assign(static_cast<std::size_t>(k), 0.0);
  out.degree.assign(static_cast<std::size_t>(k), 0.0);
  std::vector<std::vector<double>> dense(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k), 0.0));
  for (int i = 0; i < g.size(); ++i) {
    const auto ci = static_cast<std::size_t>(comm[static_cast<std::size_t>(i)]);
    dense[ci][ci] += g.self_loop[static_cast<std::size_t>(i)];
    for (const auto& [j, w] : g.adjacency[static_cast<std::size_t>(i)]) {
      dense[ci][static_cast<std::size_t>(comm[static_cast<std::size_t>(j)])] += w;
    }
  }
  for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
    for (std::size_t d = 0; d < static_cast<std::size_t>(k); ++d) {
      const double w = dense[c][d];
      if (w == 0.0) continue;
      if (c == d) {
        out.self_loop[c] = w;
      } else {
        out.adjacency[c].emplace_back(static_cast<int>(d), w);
      }
      out.degree[c] += w;
    }
  }
  return out;
}

}  // namespace

LouvainResult louvain(const WeightedGraph& graph, const LouvainOptions& options) {
  if (!(options.resolution > 0.0)) throw ConfigError("Louvain resolution must be positive");
  const double two_m = graph.total_weight();
  if (!(two_m > 0.0)) throw DegenerateDataError("Louvain needs a graph with positive total weight");

  std::mt19937_64 rng(options.seed);
  LevelGraph level = from_matrix(graph.weights());
  std::vector<int> membership(static_cast<std::size_t>(graph.size()));
  std::iota(membership.begin(), membership.end(), 0);

  LouvainResult result;
  double q = level_modularity(level, std::vector<int>(membership), two_m, options.resolution);
  result.level_modularity.push_back(q);

  for (int lvl = 0; lvl < options.max_levels; ++lvl) {
    std::vector<int> comm = local_moving(level, two_m, options, rng);
    const int k = compact(comm);
    if (k == level.size()) break;
    const double next_q = level_modularity(level, comm, two_m, options.resolution);
    if (next_q - q <= options.min_gain) break;
    for (int& m : membership) m = comm[static_cast<std::size_t>(m)];
    result.level_modularity.push_back(next_q);
    q = next_q;
    level = aggregate(level, comm, k);
  }

  result.assignment = ClusterAssignment::from_raw(membership);
  return result;
}

}  // namespace grassclust

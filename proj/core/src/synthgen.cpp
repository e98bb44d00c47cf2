#include "grassclust/synthgen.hpp"

#include "grassclust/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

namespace grassclust {

double noise_std_from_db(double db) {
  if (std::isinf(db) && db < 0) return 0.0;
  if (!std::isfinite(db)) throw ConfigError("noise level in dB must be finite or the disabled sentinel");
  return std::pow(10.0, db / 20.0);
}

int StateSpec::node_count() const {
  int n = 0;
  for (const auto& c : communities) n += static_cast<int>(c.size());
  return n;
}

void StateSpec::validate() const {
  if (communities.empty()) throw ConfigError("state needs at least one community");
  const int n = node_count();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (const auto& c : communities) {
    if (c.empty()) throw ConfigError("communities must be nonempty");
    for (int node : c) {
      if (node < 0 || node >= n) throw ConfigError("community member " + std::to_string(node) + " out of range");
      if (seen[static_cast<std::size_t>(node)]) throw ConfigError("node " + std::to_string(node) + " is in two communities");
      seen[static_cast<std::size_t>(node)] = 1;
    }
  }
  if (samples < 1) throw ConfigError("state needs at least one sample");
  if (outlier_entries < 0 || outlier_entries % 2 != 0) throw ConfigError("outlier entry count must be even and nonnegative");
  if (outlier_entries > n * (n - 1)) {
    throw ConfigError(std::to_string(outlier_entries) + " outlier entries exceed the " + std::to_string(n * (n - 1)) +
                      " off-diagonal positions");
  }
  if (!latent_ids.empty() && latent_ids.size() != communities.size()) {
    throw ConfigError("latent_ids must have one entry per community");
  }
  noise_std_from_db(noise_db);
}

ConnectivityParts gen_connectivity(const StateSpec& spec, std::mt19937_64& rng) {
  spec.validate();
  const int n = spec.node_count();
  ConnectivityParts parts{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};

  for (const auto& c : spec.communities) {
    for (int a : c) {
      for (int b : c) parts.truth(a, b) = 1.0;
    }
  }

  const double sd = noise_std_from_db(spec.noise_db);
  if (sd > 0.0) {
    std::normal_distribution<double> normal(0.0, sd);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        parts.noise(i, j) = normal(rng);
        parts.noise(j, i) = parts.noise(i, j);
      }
    }
  }

  // Partial Fisher-Yates over the unordered off-diagonal pairs.
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  const auto picks = static_cast<std::size_t>(spec.outlier_entries / 2);
  for (std::size_t k = 0; k < picks; ++k) {
    const std::size_t r = k + static_cast<std::size_t>(rng() % (pairs.size() - k));
    std::swap(pairs[k], pairs[r]);
    const auto [i, j] = pairs[k];
    parts.outlier(i, j) = spec.outlier_magnitude;
    parts.outlier(j, i) = spec.outlier_magnitude;
  }
  return parts;
}

ConnectivityParts gen_connectivity(const StateSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return gen_connectivity(spec, rng);
}

Eigen::VectorXd smooth_latent(const Eigen::VectorXd& white) {
  // Squared norm of the composite filter, so unit white noise stays unit variance.
  std::vector<double> taps{1.0};
  for (int pass = 0; pass < kLatentSmoothingPasses; ++pass) {
    std::vector<double> next(taps.size() + 2, 0.0);
    for (std::size_t k = 0; k < taps.size(); ++k) {
      next[k] += 0.25 * taps[k];
      next[k + 1] += 0.5 * taps[k];
      next[k + 2] += 0.25 * taps[k];
    }
    taps = std::move(next);
  }
  double gain = 0.0;
  for (double h : taps) gain += h * h;

  Eigen::VectorXd x = white;
  for (int pass = 0; pass < kLatentSmoothingPasses; ++pass) {
    if (x.size() < 3) throw InputError("latent signal too short to smooth");
    Eigen::VectorXd y(x.size() - 2);
    for (Eigen::Index t = 0; t < y.size(); ++t) y(t) = 0.25 * x(t) + 0.5 * x(t + 1) + 0.25 * x(t + 2);
    x = std::move(y);
  }
  return x / std::sqrt(gain);
}

SyntheticDataset gen_timeseries(const std::vector<StateSpec>& states, std::uint64_t seed) {
  if (states.empty()) throw ConfigError("at least one state is required");
  const int q = states.front().node_count();
  for (const auto& s : states) {
    s.validate();
    if (s.node_count() != q) throw ConfigError("all states must have the same number of nodes");
  }

  std::mt19937_64 rng(seed);
  SyntheticDataset out;

  // Latent ids: explicit ones are kept, others get fresh ids; all are then
  // relabeled contiguously in order of first use.
  int next_fresh = 0;
  for (const auto& s : states) {
    for (int id : s.latent_ids) next_fresh = std::max(next_fresh, id + 1);
  }
  std::vector<std::vector<int>> latent_of_community;
  for (const auto& s : states) {
    std::vector<int> ids = s.latent_ids;
    if (ids.empty()) {
      for (std::size_t c = 0; c < s.communities.size(); ++c) ids.push_back(next_fresh++);
    }
    latent_of_community.push_back(std::move(ids));
  }
  std::map<int, int> contiguous;
  int next_label = 0;
  for (const auto& ids : latent_of_community) {
    for (int id : ids) {
      if (contiguous.try_emplace(id, next_label).second) ++next_label;
    }
  }

  long horizon = 0;
  for (const auto& s : states) horizon += s.samples;

  for (const auto& s : states) out.connectivity.push_back(gen_connectivity(s, rng).total());

  // One continuous latent per id over the whole horizon.
  const int margin = 2 * kLatentSmoothingPasses;
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<Eigen::VectorXd> latents(static_cast<std::size_t>(next_label));
  for (auto& latent : latents) {
    Eigen::VectorXd white(horizon + margin);
    for (Eigen::Index t = 0; t < white.size(); ++t) white(t) = unit(rng);
    latent = smooth_latent(white);
  }

  Eigen::MatrixXd data(horizon, q);
  long start = 0;
  for (std::size_t si = 0; si < states.size(); ++si) {
    const auto& s = states[si];
    const Eigen::MatrixXd& m = out.connectivity[si];
    const double sd = noise_std_from_db(s.noise_db);
    std::vector<int> node_label(static_cast<std::size_t>(q));
    std::vector<int> subnet_label(static_cast<std::size_t>(q));
    Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(q, static_cast<Eigen::Index>(s.communities.size()));
    for (std::size_t c = 0; c < s.communities.size(); ++c) {
      const auto& members = s.communities[c];
      for (int node : members) {
        node_label[static_cast<std::size_t>(node)] = static_cast<int>(c);
        subnet_label[static_cast<std::size_t>(node)] = contiguous.at(latent_of_community[si][c]);
      }
      for (int node = 0; node < q; ++node) {
        double sum = 0.0;
        int count = 0;
        for (int u : members) {
          if (u == node) continue;
          sum += m(node, u);
          ++count;
        }
        coupling(node, static_cast<Eigen::Index>(c)) = count > 0 ? sum / count : m(node, node);
      }
    }
    for (long t = 0; t < s.samples; ++t) {
      for (int node = 0; node < q; ++node) {
        double value = 0.0;
        for (std::size_t c = 0; c < s.communities.size(); ++c) {
          const auto& latent = latents[static_cast<std::size_t>(contiguous.at(latent_of_community[si][c]))];
          value += coupling(node, static_cast<Eigen::Index>(c)) * latent(start + t);
        }
        data(start + t, node) = value + (sd > 0.0 ? sd * unit(rng) : 0.0);
      }
    }
    out.node_labels.push_back(std::move(node_label));
    out.subnet_labels.push_back(std::move(subnet_label));
    out.state_spans.emplace_back(start, start + s.samples - 1);
    for (long t = 0; t < s.samples; ++t) out.time_labels.push_back(static_cast<int>(si));
    start += s.samples;
  }
  out.series = TimeSeriesMatrix(std::move(data));
  return out;
}

std::vector<StateSpec> default_states(const std::vector<double>& outlier_magnitudes, double noise_db,
                                      int samples_per_state) {
  if (outlier_magnitudes.size() != 4) throw ConfigError("default states need four outlier magnitudes");
  const std::vector<std::vector<std::vector<int>>> layouts = {
      {{0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}},
      {{0, 1, 2}, {3, 4, 5}, {6, 7, 8, 9}},
      {{0, 1, 2, 3, 4, 5, 6}, {7, 8, 9}},
      {{0, 2, 4, 6, 8, 9}, {1, 3, 5, 7}},
  };
  std::vector<StateSpec> states;
  for (std::size_t k = 0; k < layouts.size(); ++k) {
    StateSpec s;
    s.communities = layouts[k];
    s.outlier_magnitude = outlier_magnitudes[k];
    s.noise_db = noise_db;
    s.samples = samples_per_state;
    states.push_back(std::move(s));
  }
  return states;
}

std::vector<StateSpec> preset_states(std::string_view name) {
  const std::vector<double> clean{0.0, 0.0, 0.0, 0.0};
  const std::vector<double> outliers{0.2, 0.3, 0.4, 0.5};
  if (name == "d1") return default_states(clean, -10.0);
  if (name == "d2") return default_states(clean, -8.0);
  if (name == "d3") return default_states(clean, -6.0);
  if (name == "d4") return default_states(outliers, -10.0);
  if (name == "d5") return default_states(outliers, -8.0);
  if (name == "d6") return default_states(outliers, -6.0);
  throw ConfigError("unknown dataset preset '" + std::string(name) + "' (expected d1 .. d6)");
}

void LinearStateSpaceSpec::validate() const {
  const Eigen::Index r = transition.rows();
  if (r < 1 || transition.cols() != r) throw ConfigError("transition matrix must be square and nonempty");
  if (output.cols() != r || output.rows() < 1) throw ConfigError("output matrix must have one column per state");
  if (initial_state.size() != r) throw ConfigError("initial state dimension mismatch");
  if (state_noise < 0.0 || output_noise < 0.0) throw ConfigError("noise levels must be nonnegative");
  const double radius = Eigen::EigenSolver<Eigen::MatrixXd>(transition, false).eigenvalues().cwiseAbs().maxCoeff();
  if (radius >= 1.0) {
    throw ConfigError("transition matrix spectral radius " + std::to_string(radius) + " >= 1 would diverge");
  }
}

TimeSeriesMatrix gen_linear_ss(const LinearStateSpaceSpec& spec, long samples, std::uint64_t seed) {
  spec.validate();
  if (samples < 2) throw InputError("linear state-space series needs at least 2 samples");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  auto draw = [&](Eigen::Index n, double sd) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    if (sd > 0.0) {
      for (Eigen::Index k = 0; k < n; ++k) v(k) = sd * unit(rng);
    }
    return v;
  };
  Eigen::MatrixXd data(samples, spec.output.rows());
  Eigen::VectorXd state = spec.initial_state;
  for (long t = 0; t < samples; ++t) {
    if (t > 0) state = spec.transition * state + draw(state.size(), spec.state_noise);
    data.row(t) = (spec.output * state + draw(spec.output.rows(), spec.output_noise)).transpose();
  }
  return TimeSeriesMatrix(std::move(data));
}

Eigen::MatrixXd observability_matrix(const Eigen::MatrixXd& output, const Eigen::MatrixXd& transition, int blocks) {
  if (blocks < 1) throw ConfigError("observability matrix needs at least one block");
  const Eigen::Index p = output.rows();
  Eigen::MatrixXd out(p * blocks, output.cols());
  Eigen::MatrixXd block = output;
  for (int k = 0; k < blocks; ++k) {
    out.middleRows(k * p, p) = block;
    block = block * transition;
  }
  return out;
}

Eigen::MatrixXd windowed_observability(const LinearStateSpaceSpec& spec, int window_count, int block_rows) {
  spec.validate();
  if (spec.output.rows() != 1) throw ConfigError("windowed observability is defined for scalar outputs");
  const Eigen::MatrixXd emission = observability_matrix(spec.output, spec.transition, window_count);
  return observability_matrix(emission, spec.transition, block_rows);
}

}  // namespace grassclust

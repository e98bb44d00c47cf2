#pragma once

// Synthetic multi-state network time series (community latent-factor model
// driven by noisy, outlier-contaminated connectivity matrices) and noiseless
// linear state-space data for checking the observability-subspace estimate.

#include "grassclust/karma.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace grassclust {

/// Noise level that disables noise entirely.
inline constexpr double kNoNoiseDb = -std::numeric_limits<double>::infinity();

/// Amplitude convention: standard deviation 10^(db / 20); 0 for kNoNoiseDb.
double noise_std_from_db(double db);

struct StateSpec {
  std::vector<std::vector<int>> communities;  ///< disjoint cover of 0 .. q-1
  double outlier_magnitude = 0.0;
  double noise_db = -10.0;
  int outlier_entries = 36;  ///< even; placed symmetrically off the diagonal
  int samples = 150;
  /// Optional, one per community. Communities that share an id (within or
  /// across states) are driven by one continuous latent signal.
  std::vector<int> latent_ids;

  int node_count() const;
  /// Throws ConfigError when the invariants do not hold.
  void validate() const;
};

struct ConnectivityParts {
  Eigen::MatrixXd truth;
  Eigen::MatrixXd noise;
  Eigen::MatrixXd outlier;

  Eigen::MatrixXd total() const { return truth + noise + outlier; }
};

ConnectivityParts gen_connectivity(const StateSpec& spec, std::mt19937_64& rng);
ConnectivityParts gen_connectivity(const StateSpec& spec, std::uint64_t seed);

struct SyntheticDataset {
  TimeSeriesMatrix series;
  std::vector<int> time_labels;                  ///< state index per sample
  std::vector<std::vector<int>> node_labels;     ///< per state: community index per node
  std::vector<std::vector<int>> subnet_labels;   ///< per state: latent signal per node (global, contiguous)
  std::vector<std::pair<long, long>> state_spans;  ///< [first, last] sample of each state
  std::vector<Eigen::MatrixXd> connectivity;     ///< realized matrix per state
};

SyntheticDataset gen_timeseries(const std::vector<StateSpec>& states, std::uint64_t seed);

/// The smoothing applied to every latent signal: five passes of [1/4, 1/2, 1/4].
Eigen::VectorXd smooth_latent(const Eigen::VectorXd& white);
inline constexpr int kLatentSmoothingPasses = 5;

/// The four default network states on 10 nodes, with the given outlier
/// magnitudes and noise level.
std::vector<StateSpec> default_states(const std::vector<double>& outlier_magnitudes, double noise_db,
                                      int samples_per_state = 150);

/// Dataset presets "d1" .. "d6": (outlier magnitude, noise dB) per state.
std::vector<StateSpec> preset_states(std::string_view name);

/// psi_t = A psi_{t-1} + w_t,  y_t = C psi_t + v_t.
struct LinearStateSpaceSpec {
  Eigen::MatrixXd output;      ///< C, q x rank
  Eigen::MatrixXd transition;  ///< A, rank x rank, spectral radius < 1
  Eigen::VectorXd initial_state;
  double state_noise = 0.0;
  double output_noise = 0.0;

  void validate() const;
};

TimeSeriesMatrix gen_linear_ss(const LinearStateSpaceSpec& spec, long samples, std::uint64_t seed);

/// [C; CA; ...; CA^{blocks-1}].
Eigen::MatrixXd observability_matrix(const Eigen::MatrixXd& output, const Eigen::MatrixXd& transition, int blocks);

/// Observability matrix of the stacked-window model seen by the feature
/// extractor for a scalar-output system: the per-window emission is
/// [c; cA; ...; cA^{window_count-1}] and block_rows blocks are stacked, so
/// row a*window_count + b equals c A^{a+b}.
Eigen::MatrixXd windowed_observability(const LinearStateSpaceSpec& spec, int window_count, int block_rows);

}  // namespace grassclust

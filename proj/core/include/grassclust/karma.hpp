#pragma once

// Kernel-ARMA observability features: data windows, the forward/backward
// kernel Gram-Hankel matrix and its principal column space.

#include "grassclust/grassmann.hpp"
#include "grassclust/kernels.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace grassclust {

/// T x q matrix of nodal samples; rows are time, columns are channels.
class TimeSeriesMatrix {
 public:
  TimeSeriesMatrix() = default;
  /// Throws InputError unless T >= 2, q >= 1 and every entry is finite.
  explicit TimeSeriesMatrix(Eigen::MatrixXd data);

  const Eigen::MatrixXd& data() const noexcept { return data_; }
  Eigen::Index samples() const noexcept { return data_.rows(); }
  Eigen::Index channels() const noexcept { return data_.cols(); }
  Eigen::VectorXd channel(Eigen::Index c) const { return data_.col(c); }

 private:
  Eigen::MatrixXd data_;
};

/// Model-order and window parameters of the feature extractor.
struct KarmaParams {
  int window_count = 30;     ///< consecutive samples stacked into one feature-space block
  int block_rows = 2;        ///< block rows of the forward matrix
  int rank = 2;              ///< dimension of the extracted subspace
  int forward_width = 60;    ///< columns averaged in the forward/backward product
  int backward_width = 20;   ///< block rows of the backward matrix
  int buffer = 20;           ///< nodal window length (nodal mode only)
  int stride = 1;            ///< hop between consecutive anchors

  int ambient_dim() const noexcept { return block_rows * window_count; }
  int hankel_cols() const noexcept { return backward_width * window_count; }

  /// Number of consecutive vectors one anchor consumes.
  int vectors_per_anchor() const noexcept { return backward_width + forward_width + block_rows + window_count - 2; }
  /// First and last vector index consumed by anchor t (inclusive).
  long first_index(long t) const noexcept { return t - backward_width + 1; }
  long last_index(long t) const noexcept { return t + forward_width + block_rows + window_count - 2; }

  /// Throws ConfigError on nonpositive fields or rank > min(mN, tau_b N).
  void validate() const;
  /// Additionally requires block_rows + forward_width + backward_width <= series_length.
  void validate_for_length(long series_length) const;
};

/// Row t of the series, one vector per sample.
std::vector<Eigen::VectorXd> assemble_state_snapshots(const TimeSeriesMatrix& ts);

/// Overlapping windows [y_t, ..., y_{t+buffer-1}] for t = 0 .. T-buffer.
std::vector<Eigen::VectorXd> assemble_node_windows(const Eigen::VectorXd& node_series, int buffer);

/// The (1/tau_f) forward (x) backward' matrix at anchor t, evaluated directly:
/// entry (a*N+b, c*N+d) = (1/tau_f) sum_l kernel(v[t+1+a+b+l], v[t-c+d+l]).
/// Throws OutOfRangeError naming the first missing index.
Eigen::MatrixXd gram_hankel(const std::vector<Eigen::VectorXd>& vectors, long t, const KarmaParams& p,
                            const KernelSpec& kernel);

/// Cached kernel values over the lag band that gram_hankel touches, with
/// running sums along each lag so that every Gram-Hankel entry costs O(1).
class LaggedKernelTable {
 public:
  LaggedKernelTable(const std::vector<Eigen::VectorXd>& vectors, const KarmaParams& p, const KernelSpec& kernel,
                    int threads = 1);

  /// Same result as gram_hankel(vectors, t, p, kernel) up to summation order.
  Eigen::MatrixXd gram_hankel(long t) const;

  long size() const noexcept { return size_; }

 private:
  double window_sum(long lag, long start) const;

  KarmaParams params_;
  long size_ = 0;
  long min_lag_ = 0;
  long max_lag_ = 0;
  // prefix_(lag - min_lag_, s) = sum_{u < s} kernel(v[u + lag], v[u]).
  Eigen::MatrixXd prefix_;
};

inline constexpr double kDefaultRankTol = 1e-10;

struct FeatureDiagnostics {
  Eigen::VectorXd singular_values;  ///< leading singular values (up to rank + 1)
  bool unstable = false;            ///< tie between singular values rank and rank + 1
};

/// Top-rank left singular subspace of a Gram-Hankel matrix. Throws
/// DegenerateDataError when sigma_rank <= rank_tol * sigma_1.
GrassmannPoint subspace_from_hankel(const Eigen::MatrixXd& hankel, int rank, double rank_tol = kDefaultRankTol,
                                    FeatureDiagnostics* diagnostics = nullptr);

GrassmannPoint extract_feature(const std::vector<Eigen::VectorXd>& vectors, long t, const KarmaParams& p,
                               const KernelSpec& kernel, double rank_tol = kDefaultRankTol);

struct AnchoredFeature {
  long anchor;
  GrassmannPoint point;
  bool unstable = false;
};

struct AnchorFailure {
  long anchor;
  std::string reason;
};

struct HorizonFeatures {
  std::vector<AnchoredFeature> features;
  std::vector<AnchorFailure> failures;
};

/// Valid anchors for `vector_count` vectors, spaced by p.stride.
std::vector<long> horizon_anchors(long vector_count, const KarmaParams& p);

/// One feature per anchor, in anchor order. Per-anchor failures are collected;
/// throws DegenerateDataError (or OutOfRangeError when every anchor is out of
/// range) only if anchors is nonempty and none succeeds.
HorizonFeatures extract_features_over_horizon(const std::vector<Eigen::VectorXd>& vectors,
                                              const std::vector<long>& anchors, const KarmaParams& p,
                                              const KernelSpec& kernel, int threads = 1,
                                              double rank_tol = kDefaultRankTol);

}  // namespace grassclust

#include "grassclust/karma.hpp"

#include "grassclust/errors.hpp"
#include "grassclust/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace grassclust {

TimeSeriesMatrix::TimeSeriesMatrix(Eigen::MatrixXd data) : data_(std::move(data)) {
  if (data_.rows() < 2) throw InputError("time series needs at least 2 samples");
  if (data_.cols() < 1) throw InputError("time series needs at least 1 channel");
  if (!data_.allFinite()) throw InputError("time series contains non-finite values");
}

void KarmaParams::validate() const {
  auto positive = [](int v, const char* name) {
    if (v < 1) throw ConfigError(std::string(name) + " must be a positive integer");
  };
  positive(window_count, "window_count");
  positive(block_rows, "block_rows");
  positive(rank, "rank");
  positive(forward_width, "forward_width");
  positive(backward_width, "backward_width");
  positive(buffer, "buffer");
  positive(stride, "stride");
  if (rank > std::min(ambient_dim(), hankel_cols())) {
    throw ConfigError("rank " + std::to_string(rank) + " exceeds min(block_rows*window_count, " +
                      "backward_width*window_count) = " + std::to_string(std::min(ambient_dim(), hankel_cols())));
  }
}

void KarmaParams::validate_for_length(long series_length) const {
  validate();
  if (static_cast<long>(block_rows) + forward_width + backward_width > series_length) {
    throw ConfigError("block_rows + forward_width + backward_width = " +
                      std::to_string(block_rows + forward_width + backward_width) +
                      " exceeds the series length " + std::to_string(series_length));
  }
}

std::vector<Eigen::VectorXd> assemble_state_snapshots(const TimeSeriesMatrix& ts) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(ts.samples()));
  for (Eigen::Index t = 0; t < ts.samples(); ++t) out.emplace_back(ts.data().row(t).transpose());
  return out;
}

std::vector<Eigen::VectorXd> assemble_node_windows(const Eigen::VectorXd& node_series, int buffer) {
  if (buffer < 1) throw InputError("buffer must be positive");
  if (buffer > node_series.size()) {
    throw InputError("buffer " + std::to_string(buffer) + " exceeds series length " +
                     std::to_string(node_series.size()));
  }
  std::vector<Eigen::VectorXd> out;
  const Eigen::Index count = node_series.size() - buffer + 1;
  out.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index t = 0; t < count; ++t) out.emplace_back(node_series.segment(t, buffer));
  return out;
}

namespace {

void check_anchor(long size, long t, const KarmaParams& p) {
  const long first = p.first_index(t);
  const long last = p.last_index(t);
  if (first < 0) {
    throw OutOfRangeError("anchor " + std::to_string(t) + " needs sample index " + std::to_string(first) +
                              ", which precedes the series",
                          first);
  }
  if (last >= size) {
    throw OutOfRangeError("anchor " + std::to_string(t) + " needs sample index " + std::to_string(last) +
                              " but only " + std::to_string(size) + " are available",
                          last);
  }
}

}  // namespace

Eigen::MatrixXd gram_hankel(const std::vector<Eigen::VectorXd>& vectors, long t, const KarmaParams& p,
                            const KernelSpec& kernel) {
  p.validate();
  const long size = static_cast<long>(vectors.size());
  check_anchor(size, t, p);
  const long dim = vectors[static_cast<std::size_t>(p.first_index(t))].size();
  for (long i = p.first_index(t); i <= p.last_index(t); ++i) {
    if (vectors[static_cast<std::size_t>(i)].size() != dim) throw InputError("vectors differ in dimension");
  }

  const int n = p.window_count;
  Eigen::MatrixXd out(p.ambient_dim(), p.hankel_cols());
  for (int a = 0; a < p.block_rows; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < p.backward_width; ++c) {
        for (int d = 0; d < n; ++d) {
          double sum = 0.0;
          for (int l = 0; l < p.forward_width; ++l) {
            const auto& fwd = vectors[static_cast<std::size_t>(t + 1 + a + b + l)];
            const auto& bwd = vectors[static_cast<std::size_t>(t - c + d + l)];
            sum += kernel(fwd, bwd);
          }
          out(a * n + b, c * n + d) = sum / p.forward_width;
        }
      }
    }
  }
  return out;
}

LaggedKernelTable::LaggedKernelTable(const std::vector<Eigen::VectorXd>& vectors, const KarmaParams& p,
                                     const KernelSpec& kernel, int threads)
    : params_(p), size_(static_cast<long>(vectors.size())) {
  p.validate();
  for (const auto& v : vectors) {
    if (v.size() != vectors.front().size()) throw InputError("vectors differ in dimension");
  }
  // lag = (t+1+a+b+l) - (t-c+d+l) = 1 + a + b + c - d
  min_lag_ = 2 - p.window_count;
  max_lag_ = static_cast<long>(p.block_rows) + p.window_count + p.backward_width - 2;
  const long lags = max_lag_ - min_lag_ + 1;
  prefix_ = Eigen::MatrixXd::Zero(lags, size_ + 1);
  parallel_for(static_cast<std::size_t>(lags), threads, [&](std::size_t k) {
    const long lag = min_lag_ + static_cast<long>(k);
    double running = 0.0;
    for (long u = 0; u < size_; ++u) {
      const long i = u + lag;
      if (i >= 0 && i < size_) {
        running += kernel(vectors[static_cast<std::size_t>(i)], vectors[static_cast<std::size_t>(u)]);
      }
      prefix_(static_cast<Eigen::Index>(k), u + 1) = running;
    }
  });
}

double LaggedKernelTable::window_sum(long lag, long start) const {
  const auto row = static_cast<Eigen::Index>(lag - min_lag_);
  return prefix_(row, start + params_.forward_width) - prefix_(row, start);
}

Eigen::MatrixXd LaggedKernelTable::gram_hankel(long t) const {
  check_anchor(size_, t, params_);
  const int n = params_.window_count;
  Eigen::MatrixXd out(params_.ambient_dim(), params_.hankel_cols());
  const double scale = 1.0 / params_.forward_width;
  for (int c = 0; c < params_.backward_width; ++c) {
    for (int d = 0; d < n; ++d) {
      const long start = t - c + d;
      for (int a = 0; a < params_.block_rows; ++a) {
        for (int b = 0; b < n; ++b) {
          out(a * n + b, c * n + d) = window_sum(1 + a + b + c - d, start) * scale;
        }
      }
    }
  }
  return out;
}

GrassmannPoint subspace_from_hankel(const Eigen::MatrixXd& hankel, int rank, double rank_tol,
                                    FeatureDiagnostics* diagnostics) {
  if (rank < 1 || rank > std::min(hankel.rows(), hankel.cols())) {
    throw ConfigError("rank must lie in [1, min(rows, cols)] of the Gram-Hankel matrix");
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(hankel, Eigen::ComputeThinU);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double top = sv(0);
  if (!(top > 0.0) || !(sv(rank - 1) > rank_tol * top)) {
    throw DegenerateDataError("Gram-Hankel matrix has numerical rank below " + std::to_string(rank) +
                              " (sigma_" + std::to_string(rank) + "/sigma_1 = " +
                              std::to_string(top > 0.0 ? sv(rank - 1) / top : 0.0) + ")");
  }
  if (diagnostics) {
    const Eigen::Index keep = std::min<Eigen::Index>(sv.size(), rank + 1);
    diagnostics->singular_values = sv.head(keep);
    diagnostics->unstable = sv.size() > rank && (sv(rank - 1) - sv(rank)) <= 1e-10 * top;
  }
  return GrassmannPoint(svd.matrixU().leftCols(rank));
}

GrassmannPoint extract_feature(const std::vector<Eigen::VectorXd>& vectors, long t, const KarmaParams& p,
                               const KernelSpec& kernel, double rank_tol) {
  return subspace_from_hankel(gram_hankel(vectors, t, p, kernel), p.rank, rank_tol);
}

std::vector<long> horizon_anchors(long vector_count, const KarmaParams& p) {
  p.validate();
  std::vector<long> anchors;
  const long first = p.backward_width - 1;
  const long last = vector_count - 1 - (p.last_index(0));
  for (long t = first; t <= last; t += p.stride) anchors.push_back(t);
  return anchors;
}

HorizonFeatures extract_features_over_horizon(const std::vector<Eigen::VectorXd>& vectors,
                                              const std::vector<long>& anchors, const KarmaParams& p,
                                              const KernelSpec& kernel, int threads, double rank_tol) {
  HorizonFeatures out;
  if (anchors.empty()) return out;
  p.validate();

  const LaggedKernelTable table(vectors, p, kernel, threads);
  struct Slot {
    std::optional<AnchoredFeature> feature;
    std::string error;
    bool out_of_range = false;
  };
  std::vector<Slot> slots(anchors.size());
  parallel_for(anchors.size(), threads, [&](std::size_t k) {
    const long t = anchors[k];
    try {
      FeatureDiagnostics diag;
      GrassmannPoint point = subspace_from_hankel(table.gram_hankel(t), p.rank, rank_tol, &diag);
      slots[k].feature = AnchoredFeature{t, std::move(point), diag.unstable};
    } catch (const OutOfRangeError& e) {
      slots[k].error = e.what();
      slots[k].out_of_range = true;
    } catch (const DegenerateDataError& e) {
      slots[k].error = e.what();
    }
  });

  bool all_out_of_range = true;
  for (std::size_t k = 0; k < slots.size(); ++k) {
    if (slots[k].feature) {
      out.features.push_back(std::move(*slots[k].feature));
    } else {
      out.failures.push_back({anchors[k], slots[k].error});
      all_out_of_range = all_out_of_range && slots[k].out_of_range;
    }
  }
  if (out.features.empty()) {
    std::string msg = "no anchor produced a feature:";
    for (std::size_t k = 0; k < out.failures.size() && k < 5; ++k) {
      msg += "\n  anchor " + std::to_string(out.failures[k].anchor) + ": " + out.failures[k].reason;
    }
    if (out.failures.size() > 5) msg += "\n  ... (" + std::to_string(out.failures.size() - 5) + " more)";
    if (all_out_of_range) throw OutOfRangeError(msg, out.failures.front().anchor);
    throw DegenerateDataError(msg);
  }
  return out;
}

}  // namespace grassclust

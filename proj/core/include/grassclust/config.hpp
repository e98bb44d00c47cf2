#pragma once

// Pipeline configuration and its text format:
//
//   seed = 7
//   min_dwell = 5
//   [states]
//   window_count = 30
//   kernel = gaussian(0.8)
//   k_nn = 10
//
// Top-level keys: seed, min_dwell, threads. Stage sections [states],
// [communities] and [subnets] accept window_count, block_rows, rank,
// forward_width, backward_width, buffer, stride, kernel, k_nn, sigma_alpha,
// sigma_theta, pca_energy, resolution. '#' starts a comment; values may be
// wrapped in double quotes.

#include "grassclust/egct.hpp"
#include "grassclust/karma.hpp"
#include "grassclust/kernels.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace grassclust {

struct StageConfig {
  KarmaParams karma;
  KernelSpec kernel;
  EgctParams egct;
};

struct PipelineConfig {
  StageConfig states;
  StageConfig communities;
  StageConfig subnets;
  std::uint64_t seed = 0;
  int min_dwell = 5;
  int threads = 0;  ///< 0 = resolve from the environment

  /// Stage defaults tuned for the synthetic 10-node benchmark.
  static PipelineConfig defaults();

  /// Throws ConfigError naming the line and key on malformed input.
  static PipelineConfig parse(std::istream& in);
  static PipelineConfig load(const std::string& path);

  /// Canonical text form; parse(to_string()) reproduces the config.
  std::string to_string() const;
};

StageConfig default_state_stage();
StageConfig default_community_stage();
StageConfig default_subnet_stage();

}  // namespace grassclust

#pragma once

// The three clustering tasks: network states over time, node communities
// within each state, and subnetwork sequences across states.

#include "grassclust/assignment.hpp"
#include "grassclust/config.hpp"
#include "grassclust/egct.hpp"
#include "grassclust/karma.hpp"

#include <string>
#include <vector>

namespace grassclust {

struct Interval {
  long start = 0;
  long end = 0;  ///< inclusive
  int label = 0;

  long length() const noexcept { return end - start + 1; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Ordered, disjoint intervals covering [0, T).
class StatePartition {
 public:
  StatePartition() = default;
  /// Throws InputError unless the intervals are nonempty, ordered, contiguous
  /// from 0 and adjacent intervals carry different labels.
  explicit StatePartition(std::vector<Interval> intervals);

  /// Maximal constant runs of per-sample labels.
  static StatePartition from_time_labels(const std::vector<int>& labels);

  const std::vector<Interval>& intervals() const noexcept { return intervals_; }
  long horizon() const noexcept { return intervals_.empty() ? 0 : intervals_.back().end + 1; }
  std::vector<int> time_labels() const;
  /// Distinct labels in order of first appearance.
  std::vector<int> states() const;

 private:
  std::vector<Interval> intervals_;
};

/// Per-sample majority label among the features whose index window covers
/// the sample; ties go to the smaller label. Samples covered by no feature
/// take the label of the nearest covered sample.
std::vector<int> vote_time_labels(const std::vector<long>& anchors, const std::vector<int>& feature_labels,
                                  const KarmaParams& p, long horizon);

/// Merges runs shorter than min_dwell into the neighbour whose features have
/// the higher median affinity to the run's features (ties: longer neighbour,
/// then the left one), shortest run first, until none remain.
std::vector<int> smooth_short_runs(const std::vector<int>& time_labels, const std::vector<long>& anchors,
                                   const std::vector<int>& feature_labels, const WeightedGraph& affinity,
                                   const KarmaParams& p, int min_dwell);

struct StateClustering {
  StatePartition partition;
  std::vector<long> anchors;
  std::vector<GrassmannPoint> features;  ///< one per anchor
  ClusterAssignment feature_labels;
  ClusterAssignment time_labels;
  EgctResult egct;
  std::vector<std::string> warnings;
};

/// Throws InputError when the series yields fewer than k_nn + 1 features.
StateClustering cluster_states(const TimeSeriesMatrix& ts, const PipelineConfig& cfg);

/// Anchor whose nodal sample range lies inside [start, end] and whose centre
/// is closest to the interval centre (ties: earlier anchor); -1 if none fits.
long central_nodal_anchor(long start, long end, const KarmaParams& p);

/// First and last raw sample consumed by a nodal anchor.
std::pair<long, long> nodal_sample_range(long anchor, const KarmaParams& p);

struct StateCommunities {
  int state = 0;          ///< label from the partition
  Interval interval;      ///< interval the nodal features were taken from
  long anchor = -1;
  std::vector<GrassmannPoint> features;  ///< one per node
  ClusterAssignment assignment;
  std::vector<std::string> warnings;
};

struct CommunityDetection {
  std::vector<StateCommunities> states;  ///< successfully processed states
  std::vector<std::string> skipped;      ///< one diagnostic per skipped state
};

/// One nodal feature per node per state, from the most central anchor of the
/// state's longest interval; then egct over the nodes.
CommunityDetection detect_communities(const TimeSeriesMatrix& ts, const StatePartition& partition,
                                      const PipelineConfig& cfg);

struct SubnetTracking {
  struct Item {
    int node;
    int state;
  };
  std::vector<Item> items;  ///< (node, state) pairs, state-major
  ClusterAssignment assignment;
  EgctResult egct;
  std::vector<std::string> skipped;
  std::vector<std::string> warnings;
};

/// Nodal features of every state pooled into one egct run.
SubnetTracking track_subnetworks(const TimeSeriesMatrix& ts, const StatePartition& partition,
                                 const PipelineConfig& cfg);

/// Nodal features for every state of the partition with the given stage
/// settings; states that cannot be processed are reported in `skipped`.
CommunityDetection extract_state_nodal_features(const TimeSeriesMatrix& ts, const StatePartition& partition,
                                                const StageConfig& stage, int threads);

}  // namespace grassclust

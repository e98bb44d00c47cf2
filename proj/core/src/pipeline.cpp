#include "grassclust/pipeline.hpp"

#include "grassclust/errors.hpp"
#include "grassclust/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace grassclust {

StatePartition::StatePartition(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  if (intervals_.empty()) throw InputError("a state partition needs at least one interval");
  long expected = 0;
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    const auto& iv = intervals_[i];
    if (iv.start != expected || iv.end < iv.start) {
      throw InputError("interval " + std::to_string(i) + " [" + std::to_string(iv.start) + ", " +
                       std::to_string(iv.end) + "] breaks contiguity at sample " + std::to_string(expected));
    }
    if (i > 0 && intervals_[i - 1].label == iv.label) {
      throw InputError("adjacent intervals " + std::to_string(i - 1) + " and " + std::to_string(i) +
                       " carry the same label");
    }
    expected = iv.end + 1;
  }
}

StatePartition StatePartition::from_time_labels(const std::vector<int>& labels) {
  if (labels.empty()) throw InputError("cannot partition an empty horizon");
  std::vector<Interval> out;
  for (long t = 0; t < static_cast<long>(labels.size()); ++t) {
    const int l = labels[static_cast<std::size_t>(t)];
    if (out.empty() || out.back().label != l) {
      out.push_back({t, t, l});
    } else {
      out.back().end = t;
    }
  }
  return StatePartition(std::move(out));
}

std::vector<int> StatePartition::time_labels() const {
  std::vector<int> out(static_cast<std::size_t>(horizon()));
  for (const auto& iv : intervals_) {
    std::fill(out.begin() + iv.start, out.begin() + iv.end + 1, iv.label);
  }
  return out;
}

std::vector<int> StatePartition::states() const {
  std::vector<int> out;
  for (const auto& iv : intervals_) {
    if (std::find(out.begin(), out.end(), iv.label) == out.end()) out.push_back(iv.label);
  }
  return out;
}

std::vector<int> vote_time_labels(const std::vector<long>& anchors, const std::vector<int>& feature_labels,
                                  const KarmaParams& p, long horizon) {
  if (anchors.size() != feature_labels.size()) throw InputError("one label per anchor is required");
  if (anchors.empty()) throw InputError("no features to vote with");
  if (horizon < 1) throw InputError("horizon must be positive");
  const int k = *std::max_element(feature_labels.begin(), feature_labels.end()) + 1;

  // Difference arrays per label: votes(t, c) = number of label-c windows covering t.
  Eigen::MatrixXi diff = Eigen::MatrixXi::Zero(horizon + 1, k);
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const long first = std::max(0L, p.first_index(anchors[i]));
    const long last = std::min(horizon - 1, p.last_index(anchors[i]));
    if (first > last) continue;
    ++diff(first, feature_labels[i]);
    --diff(last + 1, feature_labels[i]);
  }
  std::vector<int> out(static_cast<std::size_t>(horizon), -1);
  Eigen::RowVectorXi running = Eigen::RowVectorXi::Zero(k);
  for (long t = 0; t < horizon; ++t) {
    running += diff.row(t);
    Eigen::Index best = 0;
    if (running.maxCoeff(&best) > 0) out[static_cast<std::size_t>(t)] = static_cast<int>(best);
  }

  // Uncovered samples copy the nearest covered one (earlier side on ties).
  std::optional<long> any;
  for (long t = 0; t < horizon; ++t) {
    if (out[static_cast<std::size_t>(t)] >= 0) {
      any = t;
      break;
    }
  }
  if (!any) throw InputError("no feature window overlaps the horizon");
  std::vector<long> prev(static_cast<std::size_t>(horizon), -1), next(static_cast<std::size_t>(horizon), -1);
  long last_seen = -1;
  for (long t = 0; t < horizon; ++t) {
    if (out[static_cast<std::size_t>(t)] >= 0) last_seen = t;
    prev[static_cast<std::size_t>(t)] = last_seen;
  }
  last_seen = -1;
  for (long t = horizon - 1; t >= 0; --t) {
    if (out[static_cast<std::size_t>(t)] >= 0) last_seen = t;
    next[static_cast<std::size_t>(t)] = last_seen;
  }
  std::vector<int> filled = out;
  for (long t = 0; t < horizon; ++t) {
    const auto st = static_cast<std::size_t>(t);
    if (out[st] >= 0) continue;
    const long a = prev[st];
    const long b = next[st];
    const long pick = (a >= 0 && (b < 0 || t - a <= b - t)) ? a : b;
    filled[st] = out[static_cast<std::size_t>(pick)];
  }
  return filled;
}

namespace {

struct Run {
  long start;
  long end;
  int label;
  long length() const { return end - start + 1; }
};

std::vector<Run> runs_of(const std::vector<int>& labels) {
  std::vector<Run> runs;
  for (long t = 0; t < static_cast<long>(labels.size()); ++t) {
    const int l = labels[static_cast<std::size_t>(t)];
    if (runs.empty() || runs.back().label != l) {
      runs.push_back({t, t, l});
    } else {
      runs.back().end = t;
    }
  }
  return runs;
}

// Features carrying the run's label whose window overlaps it; all overlapping
// features when none carries the label.
std::vector<int> run_features(const Run& run, const std::vector<long>& anchors, const std::vector<int>& labels,
                              const KarmaParams& p) {
  std::vector<int> same;
  std::vector<int> any;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (p.last_index(anchors[i]) < run.start || p.first_index(anchors[i]) > run.end) continue;
    any.push_back(static_cast<int>(i));
    if (labels[i] == run.label) same.push_back(static_cast<int>(i));
  }
  return same.empty() ? any : same;
}

double median_affinity(const std::vector<int>& a, const std::vector<int>& b, const Eigen::MatrixXd& w) {
  std::vector<double> values;
  for (int i : a) {
    for (int j : b) {
      if (i != j) values.push_back(w(i, j));
    }
  }
  if (values.empty()) return 0.0;
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (values.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace

std::vector<int> smooth_short_runs(const std::vector<int>& time_labels, const std::vector<long>& anchors,
                                   const std::vector<int>& feature_labels, const WeightedGraph& affinity,
                                   const KarmaParams& p, int min_dwell) {
  if (min_dwell < 1) throw ConfigError("min_dwell must be at least 1");
  if (anchors.size() != feature_labels.size() || affinity.size() != static_cast<Eigen::Index>(anchors.size())) {
    throw InputError("anchors, feature labels and affinity must agree in size");
  }
  std::vector<int> labels = time_labels;
  for (;;) {
    const auto runs = runs_of(labels);
    if (runs.size() < 2) break;
    std::size_t victim = runs.size();
    for (std::size_t r = 0; r < runs.size(); ++r) {
      if (runs[r].length() >= min_dwell) continue;
      if (victim == runs.size() || runs[r].length() < runs[victim].length()) victim = r;
    }
    if (victim == runs.size()) break;

    const Run& run = runs[victim];
    const auto own = run_features(run, anchors, feature_labels, p);
    std::optional<std::size_t> best;
    double best_score = 0.0;
    for (const std::size_t nb : {victim - 1, victim + 1}) {
      if (nb >= runs.size()) continue;  // wraps for victim == 0
      const double score = median_affinity(own, run_features(runs[nb], anchors, feature_labels, p),
                                           affinity.weights());
      const bool better = !best || score > best_score ||
                          (score == best_score && runs[nb].length() > runs[*best].length());
      if (better) {
        best = nb;
        best_score = score;
      }
    }
    std::fill(labels.begin() + run.start, labels.begin() + run.end + 1, runs[*best].label);
  }
  return labels;
}

StateClustering cluster_states(const TimeSeriesMatrix& ts, const PipelineConfig& cfg) {
  const StageConfig& stage = cfg.states;
  stage.karma.validate();
  const int threads = resolve_threads(cfg.threads);
  const auto vectors = assemble_state_snapshots(ts);
  const auto anchors = horizon_anchors(static_cast<long>(vectors.size()), stage.karma);
  if (static_cast<int>(anchors.size()) < stage.egct.k_nn + 1) {
    throw InputError("series of " + std::to_string(ts.samples()) + " samples yields " +
                     std::to_string(anchors.size()) + " anchors; at least k_nn + 1 = " +
                     std::to_string(stage.egct.k_nn + 1) + " are needed");
  }
  HorizonFeatures hf = extract_features_over_horizon(vectors, anchors, stage.karma, stage.kernel, threads);

  StateClustering out;
  for (const auto& f : hf.failures) {
    out.warnings.push_back("anchor " + std::to_string(f.anchor) + " skipped: " + f.reason);
  }
  std::vector<GrassmannPoint> points;
  int unstable = 0;
  for (const auto& f : hf.features) {
    out.anchors.push_back(f.anchor);
    points.push_back(f.point);
    unstable += f.unstable ? 1 : 0;
  }
  if (unstable > 0) {
    out.warnings.push_back(std::to_string(unstable) + " feature(s) have tied singular values at the rank cut");
  }
  if (static_cast<int>(points.size()) < stage.egct.k_nn + 1) {
    throw InputError("only " + std::to_string(points.size()) + " usable features; at least k_nn + 1 = " +
                     std::to_string(stage.egct.k_nn + 1) + " are needed");
  }

  EgctParams ep = stage.egct;
  ep.seed = cfg.seed;
  out.egct = egct(points, ep, threads);
  out.features = std::move(points);
  out.warnings.insert(out.warnings.end(), out.egct.warnings.begin(), out.egct.warnings.end());
  out.feature_labels = out.egct.assignment;

  const auto voted = vote_time_labels(out.anchors, out.feature_labels.labels(), stage.karma, ts.samples());
  const auto smoothed = smooth_short_runs(voted, out.anchors, out.feature_labels.labels(), out.egct.affinity,
                                          stage.karma, cfg.min_dwell);
  out.time_labels = ClusterAssignment::from_raw(smoothed);
  out.partition = StatePartition::from_time_labels(out.time_labels.labels());
  return out;
}

std::pair<long, long> nodal_sample_range(long anchor, const KarmaParams& p) {
  return {p.first_index(anchor), p.last_index(anchor) + p.buffer - 1};
}

long central_nodal_anchor(long start, long end, const KarmaParams& p) {
  // Sample range of anchor t is [t - tau_b + 1, t + tau_f + m + N + buffer - 3].
  const long lo = start + p.backward_width - 1;
  const long hi = end - (p.last_index(0) + p.buffer - 1);
  if (hi < lo) return -1;
  const auto [first0, last0] = nodal_sample_range(0, p);
  // Centre of anchor t is t + (first0 + last0) / 2; pick the one nearest the interval centre.
  const double offset = 0.5 * static_cast<double>(first0 + last0);
  const double target = 0.5 * static_cast<double>(start + end) - offset;
  long best = lo;
  double best_gap = std::abs(static_cast<double>(lo) - target);
  for (long t = lo; t <= hi; ++t) {
    const double gap = std::abs(static_cast<double>(t) - target);
    if (gap < best_gap) {
      best = t;
      best_gap = gap;
    }
  }
  return best;
}

CommunityDetection extract_state_nodal_features(const TimeSeriesMatrix& ts, const StatePartition& partition,
                                                const StageConfig& stage, int threads) {
  stage.karma.validate();
  if (partition.horizon() != ts.samples()) {
    throw InputError("partition covers " + std::to_string(partition.horizon()) + " samples but the series has " +
                     std::to_string(ts.samples()));
  }
  const auto q = static_cast<std::size_t>(ts.channels());
  std::vector<std::vector<Eigen::VectorXd>> windows(q);
  for (std::size_t v = 0; v < q; ++v) {
    windows[v] = assemble_node_windows(ts.channel(static_cast<Eigen::Index>(v)), stage.karma.buffer);
  }
  const long needed = stage.karma.vectors_per_anchor() + stage.karma.buffer - 1;

  CommunityDetection out;
  for (int state : partition.states()) {
    const Interval* longest = nullptr;
    for (const auto& iv : partition.intervals()) {
      if (iv.label == state && (longest == nullptr || iv.length() > longest->length())) longest = &iv;
    }
    const long anchor = central_nodal_anchor(longest->start, longest->end, stage.karma);
    if (anchor < 0) {
      out.skipped.push_back("state " + std::to_string(state) + ": longest interval [" +
                            std::to_string(longest->start) + ", " + std::to_string(longest->end) + "] has " +
                            std::to_string(longest->length()) + " samples, fewer than the " +
                            std::to_string(needed) + " one nodal feature needs");
      continue;
    }
    const auto [first, last] = nodal_sample_range(anchor, stage.karma);
    if (first < longest->start || last > longest->end) {
      throw Error("internal: nodal anchor " + std::to_string(anchor) + " reads [" + std::to_string(first) + ", " +
                  std::to_string(last) + "] outside its interval");
    }

    std::vector<std::optional<GrassmannPoint>> slots(q);
    std::vector<std::string> errors(q);
    parallel_for(q, threads, [&](std::size_t v) {
      try {
        slots[v] = extract_feature(windows[v], anchor, stage.karma, stage.kernel);
      } catch (const DegenerateDataError& e) {
        errors[v] = e.what();
      }
    });
    std::string failure;
    for (std::size_t v = 0; v < q && failure.empty(); ++v) {
      if (!slots[v]) failure = "node " + std::to_string(v) + ": " + errors[v];
    }
    if (!failure.empty()) {
      out.skipped.push_back("state " + std::to_string(state) + ": " + failure);
      continue;
    }
    StateCommunities sc;
    sc.state = state;
    sc.interval = *longest;
    sc.anchor = anchor;
    for (auto& s : slots) sc.features.push_back(std::move(*s));
    out.states.push_back(std::move(sc));
  }
  return out;
}

CommunityDetection detect_communities(const TimeSeriesMatrix& ts, const StatePartition& partition,
                                      const PipelineConfig& cfg) {
  const int threads = resolve_threads(cfg.threads);
  CommunityDetection out = extract_state_nodal_features(ts, partition, cfg.communities, threads);
  EgctParams ep = cfg.communities.egct;
  ep.seed = cfg.seed;
  ep.validate(static_cast<long>(ts.channels()));
  for (auto& sc : out.states) {
    EgctResult r = egct(sc.features, ep, threads);
    sc.assignment = std::move(r.assignment);
    sc.warnings = std::move(r.warnings);
  }
  return out;
}

SubnetTracking track_subnetworks(const TimeSeriesMatrix& ts, const StatePartition& partition,
                                 const PipelineConfig& cfg) {
  const int threads = resolve_threads(cfg.threads);
  CommunityDetection nodal = extract_state_nodal_features(ts, partition, cfg.subnets, threads);
  SubnetTracking out;
  out.skipped = nodal.skipped;
  std::vector<GrassmannPoint> pooled;
  for (const auto& sc : nodal.states) {
    for (std::size_t v = 0; v < sc.features.size(); ++v) {
      out.items.push_back({static_cast<int>(v), sc.state});
      pooled.push_back(sc.features[v]);
    }
  }
  if (pooled.empty()) throw InputError("no state supports a nodal feature; nothing to track");
  EgctParams ep = cfg.subnets.egct;
  ep.seed = cfg.seed;
  ep.validate(static_cast<long>(pooled.size()));
  out.egct = egct(pooled, ep, threads);
  out.assignment = out.egct.assignment;
  out.warnings = out.egct.warnings;
  return out;
}

}  // namespace grassclust

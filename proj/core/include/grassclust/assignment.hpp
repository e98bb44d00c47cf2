#pragma once

#include <vector>

namespace grassclust {

/// Labels in [0, k), every label used at least once.
class ClusterAssignment {
 public:
  ClusterAssignment() = default;
  /// Throws InputError unless labels are exactly {0, ..., k-1}.
  explicit ClusterAssignment(std::vector<int> labels);

  /// Maps arbitrary integer labels to 0, 1, ... in order of first appearance.
  static ClusterAssignment from_raw(const std::vector<int>& raw);

  const std::vector<int>& labels() const noexcept { return labels_; }
  int num_clusters() const noexcept { return k_; }
  std::size_t size() const noexcept { return labels_.size(); }
  int operator[](std::size_t i) const { return labels_[i]; }

  /// Item indices per cluster.
  std::vector<std::vector<int>> members() const;

  friend bool operator==(const ClusterAssignment&, const ClusterAssignment&) = default;

 private:
  std::vector<int> labels_;
  int k_ = 0;
};

}  // namespace grassclust

#include "grassclust/assignment.hpp"

#include "grassclust/errors.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

namespace grassclust {

ClusterAssignment::ClusterAssignment(std::vector<int> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) {
    k_ = 0;
    return;
  }
  const auto [lo, hi] = std::minmax_element(labels_.begin(), labels_.end());
  if (*lo < 0) throw InputError("cluster labels must be nonnegative");
  k_ = *hi + 1;
  std::vector<char> seen(static_cast<std::size_t>(k_), 0);
  for (int l : labels_) seen[static_cast<std::size_t>(l)] = 1;
  for (int l = 0; l < k_; ++l) {
    if (!seen[static_cast<std::size_t>(l)]) throw InputError("cluster label " + std::to_string(l) + " is unused");
  }
}

ClusterAssignment ClusterAssignment::from_raw(const std::vector<int>& raw) {
  std::unordered_map<int, int> remap;
  std::vector<int> labels;
  labels.reserve(raw.size());
  for (int r : raw) {
    auto [it, inserted] = remap.try_emplace(r, static_cast<int>(remap.size()));
    labels.push_back(it->second);
  }
  return ClusterAssignment(std::move(labels));
}

std::vector<std::vector<int>> ClusterAssignment::members() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(k_));
  for (std::size_t i = 0; i < labels_.size(); ++i) out[static_cast<std::size_t>(labels_[i])].push_back(static_cast<int>(i));
  return out;
}

}  // namespace grassclust

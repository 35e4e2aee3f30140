#pragma once

#include <stdexcept>
#include <vector>

namespace dtbm {

// Per-mode community assignments. Labels are 0-based in memory; the text
// formats use 1-based labels. Surjectivity is not required: estimates may
// leave clusters empty.
struct Clustering {
  std::vector<std::vector<int>> assignments;  // assignments[k][i] in [0, num_clusters[k])
  std::vector<int> num_clusters;

  Clustering() = default;
  Clustering(std::vector<std::vector<int>> a, std::vector<int> r)
      : assignments(std::move(a)), num_clusters(std::move(r)) {
    if (assignments.size() != num_clusters.size())
      throw std::invalid_argument("clustering: modes of assignments and num_clusters differ");
    for (std::size_t k = 0; k < assignments.size(); ++k)
      for (int lab : assignments[k])
        if (lab < 0 || lab >= num_clusters[k])
          throw std::invalid_argument("clustering: label out of range");
  }

  // One assignment shared by all K modes.
  static Clustering symmetric(const std::vector<int>& labels, int r, int num_modes) {
    std::vector<std::vector<int>> a(num_modes, labels);
    return Clustering(std::move(a), std::vector<int>(num_modes, r));
  }

  int order() const { return static_cast<int>(assignments.size()); }
  int num_items(int mode) const { return static_cast<int>(assignments[mode].size()); }

  std::vector<int> cluster_sizes(int mode) const {
    std::vector<int> sizes(num_clusters[mode], 0);
    for (int lab : assignments[mode]) ++sizes[lab];
    return sizes;
  }

  std::vector<std::vector<int>> members(int mode) const {
    std::vector<std::vector<int>> inv(num_clusters[mode]);
    for (std::size_t i = 0; i < assignments[mode].size(); ++i)
      inv[assignments[mode][i]].push_back(static_cast<int>(i));
    return inv;
  }
};

}  // namespace dtbm

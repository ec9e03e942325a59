#pragma once

#include <vector>

#include "unigo/graph.hpp"

namespace unigo {

struct CommunityResult {
  std::vector<int> labels;   // contiguous ids 0..count-1
  int count = 0;
  bool reached_target = false;  // false when Louvain found fewer than requested
};

// Modularity-maximizing Louvain passes. If more communities than
// target_count are found, the pair with the largest inter-community edge
// weight is merged repeatedly until exactly target_count remain; if fewer,
// the found count is returned with reached_target=false. The assignment is
// also written into g. Deterministic: nodes are swept in index order.
CommunityResult detect_communities(Graph& g, int target_count);

// Newman modularity of a labeling; test oracle and merge guide.
double modularity(const Graph& g, const std::vector<int>& labels);

}  // namespace unigo

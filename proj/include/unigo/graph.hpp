#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace unigo {

struct Edge {
  int u = 0;
  int v = 0;
  double w = 1.0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Undirected weighted graph. Edges are stored once with u < v; a CSR
// neighbor index is built at construction and the graph is immutable
// afterwards (communities may be assigned once by detect_communities).
class Graph {
 public:
  Graph() = default;

  // Canonicalizes (swaps endpoints so u < v, sorts lexicographically),
  // rejects self-loops, duplicates, negative or non-finite weights.
  static Graph from_edges(int n, std::vector<Edge> edges);

  int n() const { return n_; }
  int m() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }

  int degree(int u) const { return offsets_[u + 1] - offsets_[u]; }
  double weighted_degree(int u) const;

  // CSR neighbor access: ids and weights for node u, sorted by id.
  const int* nbr_begin(int u) const { return nbr_.data() + offsets_[u]; }
  const int* nbr_end(int u) const { return nbr_.data() + offsets_[u + 1]; }
  const double* nbr_w(int u) const { return nbr_w_.data() + offsets_[u]; }

  bool has_communities() const { return !communities_.empty(); }
  const std::vector<int>& communities() const { return communities_; }
  int community_count() const { return community_count_; }
  // Labels must be contiguous ids 0..C-1, one per node.
  void set_communities(std::vector<int> labels);

  friend bool operator==(const Graph& a, const Graph& b);

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> offsets_;
  std::vector<int> nbr_;
  std::vector<double> nbr_w_;
  std::vector<int> communities_;
  int community_count_ = 0;
};

// Seeded generators. Identical arguments and seed give identical edge lists.
Graph generate_er(int n, double p, std::uint64_t seed);
Graph generate_ws(int n, int k, double p, std::uint64_t seed);
Graph generate_ba(int n, int k, std::uint64_t seed);

// Text format: `n <N> m <M>`, then M lines `u v w`, then optionally a line
// `communities` followed by N lines `node_id community_id`. Weights are
// printed with round-trip precision, so save/load is bit-exact.
void save_graph(const Graph& g, const std::string& path);
Graph load_graph(const std::string& path);
std::string graph_to_string(const Graph& g);
Graph graph_from_string(const std::string& text, const std::string& name = "<string>");

// Average local clustering coefficient (triangle density per node).
double clustering_coefficient(const Graph& g);

}  // namespace unigo

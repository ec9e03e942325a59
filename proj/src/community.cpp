#include "unigo/community.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include "unigo/errors.hpp"

namespace unigo {

namespace {

// One Louvain level: weighted adjacency lists plus per-node self-loop weight
// (internal weight accumulated by earlier aggregations, both directions).
struct LevelGraph {
  int n = 0;
  std::vector<std::vector<std::pair<int, double>>> adj;
  std::vector<double> self_w;
  std::vector<double> k;  // weighted degree incl. self weight
  double two_m = 0.0;
};

LevelGraph level_from(const Graph& g) {
  LevelGraph lg;
  lg.n = g.n();
  lg.adj.resize(lg.n);
  lg.self_w.assign(lg.n, 0.0);
  lg.k.assign(lg.n, 0.0);
  for (int u = 0; u < lg.n; ++u) {
    const double* w = g.nbr_w(u);
    int idx = 0;
    for (const int* v = g.nbr_begin(u); v != g.nbr_end(u); ++v, ++idx)
      lg.adj[u].emplace_back(*v, w[idx]);
  }
  for (int u = 0; u < lg.n; ++u) {
    for (auto& [v, w] : lg.adj[u]) lg.k[u] += w;
    lg.k[u] += lg.self_w[u];
    lg.two_m += lg.k[u];
  }
  return lg;
}

// Local-moving phase. Returns true if any node changed community.
bool local_move(const LevelGraph& lg, std::vector<int>& comm) {
  const int n = lg.n;
  std::vector<double> tot(n, 0.0);
  for (int u = 0; u < n; ++u) tot[comm[u]] += lg.k[u];

  std::vector<double> nbr_weight(n, 0.0);
  std::vector<int> touched;
  bool any_move = false;
  bool moved = true;
  while (moved) {
    moved = false;
    for (int u = 0; u < n; ++u) {
      const int old_c = comm[u];
      touched.clear();
      for (const auto& [v, w] : lg.adj[u]) {
        const int c = comm[v];
        if (nbr_weight[c] == 0.0 && c != old_c) touched.push_back(c);
        if (v != u) nbr_weight[c] += w;
      }
      touched.push_back(old_c);

      tot[old_c] -= lg.k[u];
      // Gain of joining community c (relative, common 1/m factor dropped):
      // k_{u,c} - tot_c * k_u / two_m. Strictly-greater comparison keeps the
      // first best in deterministic neighbor order.
      double best_gain = nbr_weight[old_c] - tot[old_c] * lg.k[u] / lg.two_m;
      int best_c = old_c;
      for (int c : touched) {
        if (c == old_c) continue;
        const double gain = nbr_weight[c] - tot[c] * lg.k[u] / lg.two_m;
        if (gain > best_gain) {
          best_gain = gain;
          best_c = c;
        }
      }
      tot[best_c] += lg.k[u];
      if (best_c != old_c) {
        comm[u] = best_c;
        moved = true;
        any_move = true;
      }
      for (int c : touched) nbr_weight[c] = 0.0;
      nbr_weight[old_c] = 0.0;
    }
  }
  return any_move;
}

std::vector<int> compact_labels(std::vector<int> raw) {
  std::vector<int> remap(raw.size(), -1);
  int next = 0;
  for (int& c : raw) {
    if (remap[c] == -1) remap[c] = next++;
    c = remap[c];
  }
  return raw;
}

LevelGraph aggregate(const LevelGraph& lg, const std::vector<int>& comm, int n_comm) {
  LevelGraph out;
  out.n = n_comm;
  out.adj.resize(n_comm);
  out.self_w.assign(n_comm, 0.0);
  std::vector<std::map<int, double>> acc(n_comm);
  for (int u = 0; u < lg.n; ++u) {
    out.self_w[comm[u]] += lg.self_w[u];
    for (const auto& [v, w] : lg.adj[u]) {
      const int cu = comm[u], cv = comm[v];
      if (cu == cv)
        out.self_w[cu] += w;  // both directions visited, so this doubles up
      else
        acc[cu][cv] += w;
    }
  }
  for (int c = 0; c < n_comm; ++c)
    for (const auto& [d, w] : acc[c]) out.adj[c].emplace_back(d, w);
  out.k.assign(n_comm, 0.0);
  for (int c = 0; c < n_comm; ++c) {
    for (auto& [d, w] : out.adj[c]) out.k[c] += w;
    out.k[c] += out.self_w[c];
    out.two_m += out.k[c];
  }
  return out;
}

}  // namespace

double modularity(const Graph& g, const std::vector<int>& labels) {
  int n_comm = 0;
  for (int c : labels) n_comm = std::max(n_comm, c + 1);
  std::vector<double> in(n_comm, 0.0), tot(n_comm, 0.0);
  double two_m = 0.0;
  for (const Edge& e : g.edges()) two_m += 2.0 * e.w;
  if (two_m == 0.0) return 0.0;
  for (const Edge& e : g.edges())
    if (labels[e.u] == labels[e.v]) in[labels[e.u]] += 2.0 * e.w;
  for (int u = 0; u < g.n(); ++u) tot[labels[u]] += g.weighted_degree(u);
  double q = 0.0;
  for (int c = 0; c < n_comm; ++c)
    q += in[c] / two_m - (tot[c] / two_m) * (tot[c] / two_m);
  return q;
}

CommunityResult detect_communities(Graph& g, int target_count) {
  if (target_count < 1) throw ParamError("detect_communities: target_count must be >= 1");
  if (target_count > g.n())
    throw ParamError("detect_communities: target_count " + std::to_string(target_count) +
                     " exceeds node count " + std::to_string(g.n()));

  // Louvain: local moving + aggregation until no further improvement.
  std::vector<int> node_comm(g.n());
  for (int i = 0; i < g.n(); ++i) node_comm[i] = i;

  if (g.m() > 0) {
    LevelGraph lg = level_from(g);
    std::vector<int> level_map(lg.n);
    for (;;) {
      std::vector<int> comm(lg.n);
      for (int i = 0; i < lg.n; ++i) comm[i] = i;
      const bool changed = local_move(lg, comm);
      if (!changed) break;
      comm = compact_labels(std::move(comm));
      int n_comm = *std::max_element(comm.begin(), comm.end()) + 1;
      for (int i = 0; i < g.n(); ++i) node_comm[i] = comm[node_comm[i]];
      if (n_comm == lg.n) break;
      lg = aggregate(lg, comm, n_comm);
    }
  }
  node_comm = compact_labels(std::move(node_comm));
  int count = *std::max_element(node_comm.begin(), node_comm.end()) + 1;

  // Merge down to the requested count, fusing the pair of communities with
  // the largest total inter-community edge weight each round.
  while (count > target_count) {
    std::vector<std::map<int, double>> inter(count);
    for (const Edge& e : g.edges()) {
      int a = node_comm[e.u], b = node_comm[e.v];
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      inter[a][b] += e.w;
    }
    int best_a = -1, best_b = -1;
    double best_w = -1.0;
    for (int a = 0; a < count; ++a)
      for (const auto& [b, w] : inter[a])
        if (w > best_w) {
          best_w = w;
          best_a = a;
          best_b = b;
        }
    if (best_a < 0) {
      // No inter-community edges left; fuse the two smallest ids.
      best_a = 0;
      best_b = 1;
    }
    for (int& c : node_comm)
      if (c == best_b) c = best_a;
    node_comm = compact_labels(std::move(node_comm));
    --count;
  }

  CommunityResult res;
  res.labels = std::move(node_comm);
  res.count = count;
  res.reached_target = (count == target_count);
  g.set_communities(res.labels);
  return res;
}

}  // namespace unigo

#include "unigo/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "unigo/errors.hpp"
#include "unigo/rng.hpp"

namespace unigo {

Graph Graph::from_edges(int n, std::vector<Edge> edges) {
  if (n < 1) throw ParamError("graph: node count must be >= 1, got " + std::to_string(n));
  for (auto& e : edges) {
    if (e.u > e.v) std::swap(e.u, e.v);
    if (e.u == e.v)
      throw ParamError("graph: self-loop on node " + std::to_string(e.u));
    if (e.u < 0 || e.v >= n)
      throw ParamError("graph: edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                       ") out of range for n=" + std::to_string(n));
    if (!std::isfinite(e.w) || e.w < 0.0)
      throw ParamError("graph: edge weight must be finite and >= 0");
  }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (edges[i].u == edges[i - 1].u && edges[i].v == edges[i - 1].v)
      throw ParamError("graph: duplicate edge (" + std::to_string(edges[i].u) + "," +
                       std::to_string(edges[i].v) + ")");

  Graph g;
  g.n_ = n;
  g.edges_ = std::move(edges);
  g.offsets_.assign(n + 1, 0);
  for (const Edge& e : g.edges_) {
    ++g.offsets_[e.u + 1];
    ++g.offsets_[e.v + 1];
  }
  for (int i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
  g.nbr_.resize(g.edges_.size() * 2);
  g.nbr_w_.resize(g.edges_.size() * 2);
  std::vector<int> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const Edge& e : g.edges_) {
    g.nbr_[cursor[e.u]] = e.v;
    g.nbr_w_[cursor[e.u]++] = e.w;
    g.nbr_[cursor[e.v]] = e.u;
    g.nbr_w_[cursor[e.v]++] = e.w;
  }
  // Sort each neighbor row by id so iteration order is canonical.
  for (int u = 0; u < n; ++u) {
    const int lo = g.offsets_[u], hi = g.offsets_[u + 1];
    std::vector<std::pair<int, double>> row;
    row.reserve(hi - lo);
    for (int i = lo; i < hi; ++i) row.emplace_back(g.nbr_[i], g.nbr_w_[i]);
    std::sort(row.begin(), row.end());
    for (int i = lo; i < hi; ++i) {
      g.nbr_[i] = row[i - lo].first;
      g.nbr_w_[i] = row[i - lo].second;
    }
  }
  return g;
}

double Graph::weighted_degree(int u) const {
  double s = 0.0;
  for (int i = offsets_[u]; i < offsets_[u + 1]; ++i) s += nbr_w_[i];
  return s;
}

void Graph::set_communities(std::vector<int> labels) {
  if (static_cast<int>(labels.size()) != n_)
    throw ParamError("communities: expected " + std::to_string(n_) + " labels, got " +
                     std::to_string(labels.size()));
  int c = 0;
  for (int id : labels) {
    if (id < 0) throw ParamError("communities: negative id");
    c = std::max(c, id + 1);
  }
  std::vector<bool> seen(c, false);
  for (int id : labels) seen[id] = true;
  for (int i = 0; i < c; ++i)
    if (!seen[i]) throw ParamError("communities: ids not contiguous, missing " + std::to_string(i));
  communities_ = std::move(labels);
  community_count_ = c;
}

bool operator==(const Graph& a, const Graph& b) {
  return a.n_ == b.n_ && a.edges_ == b.edges_ && a.communities_ == b.communities_;
}

Graph generate_er(int n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0))
    throw ParamError("generate_er: p must lie in [0,1], got " + std::to_string(p));
  SplitMix64 rng = derive_stream(seed, {0x4552ULL});  // "ER"
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng.next_double() < p) edges.push_back({u, v, 1.0});
  return Graph::from_edges(n, std::move(edges));
}

Graph generate_ws(int n, int k, double p, std::uint64_t seed) {
  if (k % 2 != 0) throw ParamError("generate_ws: k must be even, got " + std::to_string(k));
  if (k >= n) throw ParamError("generate_ws: k must be < n");
  if (!(p >= 0.0 && p <= 1.0)) throw ParamError("generate_ws: p must lie in [0,1]");
  SplitMix64 rng = derive_stream(seed, {0x5753ULL});  // "WS"

  // Ring lattice edges keyed for O(1) duplicate checks during rewiring.
  auto key = [n](int u, int v) {
    if (u > v) std::swap(u, v);
    return static_cast<std::uint64_t>(u) * static_cast<std::uint64_t>(n) + v;
  };
  std::vector<Edge> edges;
  std::unordered_set<std::uint64_t> present;
  edges.reserve(static_cast<std::size_t>(n) * k / 2);
  for (int u = 0; u < n; ++u)
    for (int j = 1; j <= k / 2; ++j) {
      const int v = (u + j) % n;
      edges.push_back({u, v, 1.0});
      present.insert(key(u, v));
    }
  // Each lattice edge is rewired with probability p: keep endpoint u, retarget
  // v uniformly among nodes that are neither u nor already adjacent to u.
  for (Edge& e : edges) {
    if (rng.next_double() >= p) continue;
    const int u = e.u;
    for (int attempt = 0; attempt < 16 * n; ++attempt) {
      const int w = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      if (w == u || present.count(key(u, w))) continue;
      present.erase(key(e.u, e.v));
      present.insert(key(u, w));
      e.v = w;
      break;
    }
    // No admissible target (u adjacent to everyone): edge kept as is.
  }
  return Graph::from_edges(n, std::move(edges));
}

Graph generate_ba(int n, int k, std::uint64_t seed) {
  if (k < 1 || k >= n)
    throw ParamError("generate_ba: need 1 <= k < n, got k=" + std::to_string(k) +
                     " n=" + std::to_string(n));
  SplitMix64 rng = derive_stream(seed, {0x4241ULL});  // "BA"
  std::vector<Edge> edges;
  // Seed clique on k+1 nodes, so every node ends with degree >= k.
  for (int u = 0; u <= k; ++u)
    for (int v = u + 1; v <= k; ++v) edges.push_back({u, v, 1.0});
  // Endpoint multiset: sampling a uniform entry is degree-proportional.
  std::vector<int> endpoints;
  endpoints.reserve(static_cast<std::size_t>(2) * (edges.size() + static_cast<std::size_t>(n) * k));
  for (const Edge& e : edges) {
    endpoints.push_back(e.u);
    endpoints.push_back(e.v);
  }
  std::vector<int> picked;
  for (int u = k + 1; u < n; ++u) {
    picked.clear();
    while (static_cast<int>(picked.size()) < k) {
      const int cand = endpoints[rng.below(endpoints.size())];
      if (std::find(picked.begin(), picked.end(), cand) == picked.end())
        picked.push_back(cand);
    }
    for (int v : picked) {
      edges.push_back({v, u, 1.0});
      endpoints.push_back(u);
      endpoints.push_back(v);
    }
  }
  return Graph::from_edges(n, std::move(edges));
}

std::string graph_to_string(const Graph& g) {
  std::string out;
  char buf[96];
  std::snprintf(buf, sizeof buf, "n %d m %d\n", g.n(), g.m());
  out += buf;
  for (const Edge& e : g.edges()) {
    std::snprintf(buf, sizeof buf, "%d %d %.17g\n", e.u, e.v, e.w);
    out += buf;
  }
  if (g.has_communities()) {
    out += "communities\n";
    for (int i = 0; i < g.n(); ++i) {
      std::snprintf(buf, sizeof buf, "%d %d\n", i, g.communities()[i]);
      out += buf;
    }
  }
  return out;
}

void save_graph(const Graph& g, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("save_graph: cannot open " + path);
  f << graph_to_string(g);
  if (!f) throw IoError("save_graph: write failed for " + path);
}

Graph graph_from_string(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  std::string tok_n, tok_m;
  int n = 0, m = 0;
  if (!(in >> tok_n >> n >> tok_m >> m) || tok_n != "n" || tok_m != "m")
    throw ParseError(name + ": expected header `n <N> m <M>`");
  if (n < 1) throw ParseError(name + ": invalid node count");
  std::vector<Edge> edges;
  edges.reserve(m);
  for (int i = 0; i < m; ++i) {
    Edge e;
    if (!(in >> e.u >> e.v >> e.w))
      throw ParseError(name + ": edge line " + std::to_string(i + 1) + " of " +
                       std::to_string(m) + " is missing or malformed");
    edges.push_back(e);
  }
  Graph g = Graph::from_edges(n, std::move(edges));
  std::string section;
  if (in >> section) {
    if (section != "communities")
      throw ParseError(name + ": unexpected section `" + section + "`");
    std::vector<int> labels(n, -1);
    for (int i = 0; i < n; ++i) {
      int node = 0, comm = 0;
      if (!(in >> node >> comm))
        throw ParseError(name + ": community line " + std::to_string(i + 1) + " malformed");
      if (node < 0 || node >= n)
        throw ParseError(name + ": community line " + std::to_string(i + 1) +
                         " names node " + std::to_string(node) + " out of range");
      labels[node] = comm;
    }
    g.set_communities(std::move(labels));
  }
  return g;
}

Graph load_graph(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("load_graph: cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return graph_from_string(ss.str(), path);
}

double clustering_coefficient(const Graph& g) {
  double total = 0.0;
  for (int u = 0; u < g.n(); ++u) {
    const int deg = g.degree(u);
    if (deg < 2) continue;
    int links = 0;
    for (const int* a = g.nbr_begin(u); a != g.nbr_end(u); ++a)
      for (const int* b = a + 1; b != g.nbr_end(u); ++b) {
        // neighbor rows are sorted by id
        const int* lo = g.nbr_begin(*a);
        const int* hi = g.nbr_end(*a);
        if (std::binary_search(lo, hi, *b)) ++links;
      }
    total += 2.0 * links / (static_cast<double>(deg) * (deg - 1));
  }
  return total / g.n();
}

}  // namespace unigo

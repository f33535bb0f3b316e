#ifndef FR_PATHS_HPP
#define FR_PATHS_HPP

#include <algorithm>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "fr/network.hpp"

namespace fr {

// ---------------------------------------------------------------------------
// PathCatalog: per-commodity finite sets of simple paths (edge-index
// sequences). Path identity is the edge-index sequence and all ordering is
// lexicographic on it.
// ---------------------------------------------------------------------------

class PathCatalog {
public:
  PathCatalog() = default;

  explicit PathCatalog(std::vector<std::vector<Path>> per_commodity)
      : paths_(std::move(per_commodity)) {}

  int n_commodities() const { return static_cast<int>(paths_.size()); }
  const std::vector<Path>& paths(int k) const {
    return paths_.at(static_cast<std::size_t>(k));
  }
  std::vector<std::vector<Path>>& mutable_paths() { return paths_; }
  int n_paths(int k) const { return static_cast<int>(paths(k).size()); }

  int total_paths() const {
    int n = 0;
    for (const auto& ps : paths_) n += static_cast<int>(ps.size());
    return n;
  }

  // Longest path length H = max |p| over the whole catalog.
  int max_path_length() const {
    std::size_t h = 0;
    for (const auto& ps : paths_)
      for (const auto& p : ps) h = std::max(h, p.size());
    return static_cast<int>(h);
  }

  void validate(const Network& net) const {
    require(paths_.size() == static_cast<std::size_t>(net.n_commodities()),
            "catalog/commodity count mismatch");
    for (int k = 0; k < n_commodities(); ++k) {
      const auto& ps = paths(k);
      require(!ps.empty(), "commodity " + std::to_string(k) + " has empty path set");
      std::set<Path> seen;
      for (const Path& p : ps) {
        require(!p.empty(), "empty path");
        require(seen.insert(p).second, "duplicate path in commodity catalog");
        int at = net.commodity(k).origin;
        std::set<int> visited{at};
        for (int e : p) {
          if (e < 0 || e >= net.n_edges())
            throw StructuralError("path references unknown edge");
          require(net.edge(e).tail == at, "path edges are not contiguous");
          at = net.edge(e).head;
          require(visited.insert(at).second, "path is not simple");
        }
        require(at == net.commodity(k).destination, "path does not reach destination");
      }
    }
  }

private:
  std::vector<std::vector<Path>> paths_;
};

// ---------------------------------------------------------------------------
// FlowVector: per-commodity path flows plus derived edge loads.
// ---------------------------------------------------------------------------

struct FlowVector {
  std::vector<std::vector<double>> path_flows;  // [commodity][path]
  std::vector<double> edge_loads;               // derived

  static FlowVector from_path_flows(const Network& net, const PathCatalog& catalog,
                                    std::vector<std::vector<double>> flows) {
    FlowVector fv;
    fv.path_flows = std::move(flows);
    fv.edge_loads.assign(static_cast<std::size_t>(net.n_edges()), 0.0);
    require(fv.path_flows.size() == static_cast<std::size_t>(catalog.n_commodities()),
            "flow/catalog commodity mismatch");
    for (int k = 0; k < catalog.n_commodities(); ++k) {
      const auto& ps = catalog.paths(k);
      require(fv.path_flows[static_cast<std::size_t>(k)].size() == ps.size(),
              "flow/path count mismatch");
      for (std::size_t i = 0; i < ps.size(); ++i) {
        const double f = fv.path_flows[static_cast<std::size_t>(k)][i];
        require(f >= 0.0, "path flows must be nonnegative");
        for (int e : ps[i]) fv.edge_loads[static_cast<std::size_t>(e)] += f;
      }
    }
    return fv;
  }

  void check_conservation(const Network& net) const {
    for (std::size_t k = 0; k < path_flows.size(); ++k) {
      const double d = net.commodity(static_cast<int>(k)).demand;
      double s = 0.0;
      for (double f : path_flows[k]) s += f;
      require(std::abs(s - d) <= 1e-9 * std::max(1.0, d),
              "flow conservation violated for commodity " + std::to_string(k));
    }
  }
};

inline std::vector<double> edge_loads_of(const Network& net, const PathCatalog& catalog,
                                         const std::vector<std::vector<double>>& flows) {
  std::vector<double> loads(static_cast<std::size_t>(net.n_edges()), 0.0);
  for (int k = 0; k < catalog.n_commodities(); ++k)
    for (std::size_t i = 0; i < catalog.paths(k).size(); ++i)
      for (int e : catalog.paths(k)[i])
        loads[static_cast<std::size_t>(e)] += flows[static_cast<std::size_t>(k)][i];
  return loads;
}

// ---------------------------------------------------------------------------
// Exhaustive simple-path enumeration (DFS in increasing edge-index order, so
// output is lexicographic in the edge-index sequence).
// ---------------------------------------------------------------------------

namespace detail {

inline void dfs_paths(const Network& net,
                      const std::vector<std::vector<int>>& out_edges, int at, int goal,
                      std::vector<int>& visited, Path& stack, std::vector<Path>& out,
                      std::size_t max_count) {
  if (out.size() >= max_count) return;
  if (at == goal) {
    out.push_back(stack);
    return;
  }
  for (int e : out_edges[static_cast<std::size_t>(at)]) {
    const int next = net.edge(e).head;
    if (visited[static_cast<std::size_t>(next)]) continue;
    visited[static_cast<std::size_t>(next)] = 1;
    stack.push_back(e);
    dfs_paths(net, out_edges, next, goal, visited, stack, out, max_count);
    stack.pop_back();
    visited[static_cast<std::size_t>(next)] = 0;
    if (out.size() >= max_count) return;
  }
}

inline std::vector<std::vector<int>> out_edge_lists(const Network& net) {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(net.n_nodes()));
  for (int e = 0; e < net.n_edges(); ++e)
    out[static_cast<std::size_t>(net.edge(e).tail)].push_back(e);
  // already in increasing edge order since e is increasing
  return out;
}

}  // namespace detail

inline std::vector<Path> enumerate_paths(
    const Network& net, int k,
    std::size_t max_count = std::numeric_limits<std::size_t>::max()) {
  const Commodity& c = net.commodity(k);
  const auto out = detail::out_edge_lists(net);
  std::vector<int> visited(static_cast<std::size_t>(net.n_nodes()), 0);
  visited[static_cast<std::size_t>(c.origin)] = 1;
  Path stack;
  std::vector<Path> result;
  detail::dfs_paths(net, out, c.origin, c.destination, visited, stack, result, max_count);
  if (result.empty())
    throw InfeasibleError("no path from origin to destination for commodity " +
                          std::to_string(k));
  return result;
}

// ---------------------------------------------------------------------------
// Yen's k-shortest simple paths on free-flow costs ell_e(0). Ties broken
// lexicographically by edge-index sequence. If fewer than K simple paths
// exist, all are returned and `truncated` is set.
// ---------------------------------------------------------------------------

struct YenResult {
  std::vector<Path> paths;  // nondecreasing free-flow cost, lex tie-break
  std::vector<double> costs;
  bool truncated = false;  // fewer than K simple paths exist
};

namespace detail {

// Backward Dijkstra distances to `goal` over edges not in `banned_edges`,
// avoiding `banned_nodes` (goal itself is never banned).
inline std::vector<double> dist_to_goal(const Network& net,
                                        const std::vector<double>& w, int goal,
                                        const std::vector<char>& banned_edge,
                                        const std::vector<char>& banned_node) {
  const std::size_t n = static_cast<std::size_t>(net.n_nodes());
  std::vector<std::vector<int>> in(n);
  for (int e = 0; e < net.n_edges(); ++e)
    if (!banned_edge[static_cast<std::size_t>(e)])
      in[static_cast<std::size_t>(net.edge(e).head)].push_back(e);
  std::vector<double> dist(n, kInf);
  std::vector<char> done(n, 0);
  dist[static_cast<std::size_t>(goal)] = 0.0;
  for (;;) {
    int best = -1;
    double bd = kInf;
    for (std::size_t v = 0; v < n; ++v)
      if (!done[v] && dist[v] < bd) {
        bd = dist[v];
        best = static_cast<int>(v);
      }
    if (best < 0) break;
    done[static_cast<std::size_t>(best)] = 1;
    for (int e : in[static_cast<std::size_t>(best)]) {
      const int u = net.edge(e).tail;
      if (banned_node[static_cast<std::size_t>(u)]) continue;
      const double cand = w[static_cast<std::size_t>(e)] + bd;
      if (cand < dist[static_cast<std::size_t>(u)]) dist[static_cast<std::size_t>(u)] = cand;
    }
  }
  return dist;
}

// Lexicographically smallest shortest path from `from` to `goal` (false when
// unreachable). Label-guided DFS: only edges consistent with the backward
// distance labels are explored, smallest edge index first, backtracking over
// zero-cost ties that dead-end. The first completed walk is the lex-min
// shortest path.
inline bool lex_shortest_path(const Network& net, const std::vector<double>& w,
                              int from, int goal, const std::vector<char>& banned_edge,
                              const std::vector<char>& banned_node, Path& out,
                              double& cost) {
  const auto dist = dist_to_goal(net, w, goal, banned_edge, banned_node);
  if (!(dist[static_cast<std::size_t>(from)] < kInf)) return false;
  std::vector<std::vector<int>> outs(static_cast<std::size_t>(net.n_nodes()));
  for (int e = 0; e < net.n_edges(); ++e)
    if (!banned_edge[static_cast<std::size_t>(e)])
      outs[static_cast<std::size_t>(net.edge(e).tail)].push_back(e);
  out.clear();
  cost = dist[static_cast<std::size_t>(from)];
  const double eps = 1e-12 * (1.0 + std::abs(cost));
  std::vector<char> used_node(static_cast<std::size_t>(net.n_nodes()), 0);
  used_node[static_cast<std::size_t>(from)] = 1;
  std::function<bool(int)> walk = [&](int at) -> bool {
    if (at == goal) return true;
    for (int e : outs[static_cast<std::size_t>(at)]) {
      const int v = net.edge(e).head;
      if (used_node[static_cast<std::size_t>(v)]) continue;
      if (std::abs(w[static_cast<std::size_t>(e)] + dist[static_cast<std::size_t>(v)] -
                   dist[static_cast<std::size_t>(at)]) > eps)
        continue;
      used_node[static_cast<std::size_t>(v)] = 1;
      out.push_back(e);
      if (walk(v)) return true;
      out.pop_back();
      used_node[static_cast<std::size_t>(v)] = 0;
    }
    return false;
  };
  return walk(from);
}

}  // namespace detail

inline YenResult yen_k_shortest(const Network& net, int k, int K) {
  require(K >= 1, "yen_k_shortest requires K >= 1");
  const Commodity& c = net.commodity(k);
  std::vector<double> w(static_cast<std::size_t>(net.n_edges()));
  for (int e = 0; e < net.n_edges(); ++e) w[static_cast<std::size_t>(e)] = net.edge(e).latency(0.0);

  using Cand = std::pair<double, Path>;
  const auto lex_less = [](const Cand& a, const Cand& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second;
  };

  YenResult res;
  std::vector<char> no_edge(static_cast<std::size_t>(net.n_edges()), 0);
  std::vector<char> no_node(static_cast<std::size_t>(net.n_nodes()), 0);
  Path sp;
  double sp_cost = 0.0;
  if (!detail::lex_shortest_path(net, w, c.origin, c.destination, no_edge, no_node, sp,
                                 sp_cost))
    throw InfeasibleError("no path from origin to destination for commodity " +
                          std::to_string(k));
  res.paths.push_back(sp);
  res.costs.push_back(sp_cost);

  std::set<Cand, decltype(lex_less)> candidates(lex_less);
  std::set<Path> known{sp};

  while (static_cast<int>(res.paths.size()) < K) {
    const Path prev = res.paths.back();
    // Spur from each node of the previous path.
    Path root;
    double root_cost = 0.0;
    int spur_node = c.origin;
    std::vector<char> root_nodes(static_cast<std::size_t>(net.n_nodes()), 0);
    for (std::size_t i = 0; i <= prev.size(); ++i) {
      std::vector<char> banned_edge(static_cast<std::size_t>(net.n_edges()), 0);
      std::vector<char> banned_node = root_nodes;
      // Ban the next edge of every accepted path sharing this root.
      for (const Path& ap : res.paths) {
        if (ap.size() > root.size() &&
            std::equal(root.begin(), root.end(), ap.begin()))
          banned_edge[static_cast<std::size_t>(ap[root.size()])] = 1;
      }
      Path spur;
      double spur_cost = 0.0;
      if (detail::lex_shortest_path(net, w, spur_node, c.destination, banned_edge,
                                    banned_node, spur, spur_cost)) {
        Path full = root;
        full.insert(full.end(), spur.begin(), spur.end());
        if (!known.count(full)) candidates.insert({root_cost + spur_cost, full});
      }
      if (i == prev.size()) break;
      root_nodes[static_cast<std::size_t>(spur_node)] = 1;
      root_cost += w[static_cast<std::size_t>(prev[i])];
      root.push_back(prev[i]);
      spur_node = net.edge(prev[i]).head;
    }
    if (candidates.empty()) {
      res.truncated = true;
      break;
    }
    auto it = candidates.begin();
    res.paths.push_back(it->second);
    res.costs.push_back(it->first);
    known.insert(it->second);
    candidates.erase(it);
  }
  return res;
}

}  // namespace fr

#endif  // FR_PATHS_HPP

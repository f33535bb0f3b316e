#ifndef FR_INSTANCES_HPP
#define FR_INSTANCES_HPP

#include <string>
#include <vector>

#include "fr/paths.hpp"
#include "fr/sp_tree.hpp"

namespace fr {

// Canonical small instances used across solvers, experiments and tests.

struct Instance {
  Network net;
  PathCatalog catalog;
};

// Two parallel routes, demand 1: route a constant 1, route b identity x.
// Edge 0 = a, edge 1 = b; paths ordered {a}, {b}.
inline Instance make_pigou(double demand = 1.0) {
  Network net(2,
              {Edge{0, 1, LatencyFn::constant(1.0)}, Edge{0, 1, LatencyFn::monomial(1.0)}},
              {Commodity{0, 1, demand}});
  PathCatalog cat({{Path{0}, Path{1}}});
  return {std::move(net), std::move(cat)};
}

// Textbook Braess network, demand 1: nodes s=0, v=1, w=2, t=3.
// Edges: 0 s->v (x), 1 s->w (1), 2 v->t (1), 3 w->t (x), 4 v->w (0).
// Paths (lex order): {0,2} s-v-t, {0,4,3} s-v-w-t, {1,3} s-w-t.
inline Instance make_braess(double demand = 1.0) {
  Network net(4,
              {Edge{0, 1, LatencyFn::monomial(1.0)}, Edge{0, 2, LatencyFn::constant(1.0)},
               Edge{1, 3, LatencyFn::constant(1.0)}, Edge{2, 3, LatencyFn::monomial(1.0)},
               Edge{1, 2, LatencyFn::constant(0.0)}},
              {Commodity{0, 3, demand}});
  PathCatalog cat({enumerate_paths(net, 0)});
  return {std::move(net), std::move(cat)};
}

// m parallel routes with given latency functions.
inline Instance make_parallel(const std::vector<LatencyFn>& latencies, double demand = 1.0) {
  std::vector<Edge> edges;
  std::vector<Path> paths;
  for (std::size_t i = 0; i < latencies.size(); ++i) {
    edges.push_back(Edge{0, 1, latencies[i]});
    paths.push_back(Path{static_cast<int>(i)});
  }
  Network net(2, std::move(edges), {Commodity{0, 1, demand}});
  PathCatalog cat({paths});
  return {std::move(net), std::move(cat)};
}

// The fixed 5-route parallel instance used for design/frontier checks:
// affine latencies a*x + b.
inline Instance make_parallel5(double demand = 1.0) {
  return make_parallel({LatencyFn::affine(1.0, 0.10), LatencyFn::affine(0.6, 0.25),
                        LatencyFn::affine(1.4, 0.05), LatencyFn::affine(0.3, 0.40),
                        LatencyFn::affine(2.0, 0.02)},
                       demand);
}

// Chain of k two-edge diamond gadgets in series: |E| = 2k, |paths| = 2^k.
// Gadget i contributes edges 2i (upper) and 2i+1 (lower).
struct SpInstance {
  SpTree tree;
  Network net;
};

inline SpInstance make_diamond_chain(int k, const std::vector<LatencyFn>& latencies,
                                     double demand = 1.0) {
  require(k >= 1, "diamond chain needs k >= 1");
  require(latencies.size() == static_cast<std::size_t>(2 * k),
          "diamond chain needs 2k latencies");
  std::string expr;
  for (int i = 0; i < k; ++i) {
    const std::string gadget =
        "P(e" + std::to_string(2 * i) + ",e" + std::to_string(2 * i + 1) + ")";
    expr = (i == 0) ? gadget : "S(" + expr + "," + gadget + ")";
  }
  SpTree tree = parse_sp_expression(expr, 2 * k);
  Network net = sp_build_network(tree, latencies, demand);
  return {std::move(tree), std::move(net)};
}

// Deterministic pseudo-random affine latencies for stress instances.
inline std::vector<LatencyFn> random_affine_latencies(int count, std::uint64_t seed,
                                                      double a_max = 2.0,
                                                      double b_max = 1.0) {
  RngStream rng(seed, 0, 0);
  std::vector<LatencyFn> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double a = 0.1 + (a_max - 0.1) * rng.next_double();
    const double b = 0.05 + (b_max - 0.05) * rng.next_double();
    out.push_back(LatencyFn::affine(a, b));
  }
  return out;
}

}  // namespace fr

#endif  // FR_INSTANCES_HPP

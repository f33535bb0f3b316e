#ifndef FR_SP_TREE_HPP
#define FR_SP_TREE_HPP

#include <cctype>
#include <set>
#include <string>
#include <vector>

#include "fr/network.hpp"

namespace fr {

// ---------------------------------------------------------------------------
// Two-terminal series-parallel decomposition trees. Binary nodes: a leaf
// references an edge id; S(l,r) composes in series, P(l,r) in parallel.
// Parallel nodes carry an optional left-branch log-bias delta and a split y.
// ---------------------------------------------------------------------------

struct SpNode {
  enum class Kind { Leaf, Series, Parallel };
  Kind kind = Kind::Leaf;
  int edge = -1;   // leaf edge id
  int left = -1;   // child node ids
  int right = -1;
  double delta = 0.0;  // parallel: left-branch bias (log units)
};

class SpTree {
public:
  std::vector<SpNode> nodes;
  int root = -1;

  int n_parallel() const {
    int n = 0;
    for (const auto& nd : nodes)
      if (nd.kind == SpNode::Kind::Parallel) ++n;
    return n;
  }

  std::vector<int> leaf_edges() const {
    std::vector<int> out;
    for (const auto& nd : nodes)
      if (nd.kind == SpNode::Kind::Leaf) out.push_back(nd.edge);
    return out;
  }

  // Number of s-t paths the tree induces; saturates at `cap`.
  double count_paths(double cap = 1e18) const { return count_rec(root, cap); }

  // All induced paths as edge-index sequences (small trees only).
  std::vector<Path> enumerate_tree_paths() const { return enum_rec(root); }

private:
  double count_rec(int id, double cap) const {
    const SpNode& nd = nodes[static_cast<std::size_t>(id)];
    switch (nd.kind) {
      case SpNode::Kind::Leaf: return 1.0;
      case SpNode::Kind::Series: {
        const double c = count_rec(nd.left, cap) * count_rec(nd.right, cap);
        return c > cap ? cap : c;
      }
      case SpNode::Kind::Parallel: {
        const double c = count_rec(nd.left, cap) + count_rec(nd.right, cap);
        return c > cap ? cap : c;
      }
    }
    return 0.0;
  }

  std::vector<Path> enum_rec(int id) const {
    const SpNode& nd = nodes[static_cast<std::size_t>(id)];
    if (nd.kind == SpNode::Kind::Leaf) return {Path{nd.edge}};
    const auto ls = enum_rec(nd.left);
    const auto rs = enum_rec(nd.right);
    std::vector<Path> out;
    if (nd.kind == SpNode::Kind::Series) {
      for (const Path& a : ls)
        for (const Path& b : rs) {
          Path p = a;
          p.insert(p.end(), b.begin(), b.end());
          out.push_back(std::move(p));
        }
    } else {
      out = ls;
      out.insert(out.end(), rs.begin(), rs.end());
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Parser for the grammar  expr := e<id> | S(expr,expr) | P(expr,expr),
// whitespace-insensitive. Each leaf edge may appear at most once; when
// n_edges >= 0, leaf ids must lie in [0, n_edges). Round-trips bit-exactly
// through print_sp_expression.
// ---------------------------------------------------------------------------

namespace detail {

struct SpParser {
  const std::string& text;
  std::size_t pos = 0;
  SpTree tree;
  std::set<int> seen_edges;
  int n_edges;

  explicit SpParser(const std::string& t, int n) : text(t), n_edges(n) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  char peek() {
    skip_ws();
    if (pos >= text.size()) throw ParseError("unexpected end of SP expression", pos);
    return text[pos];
  }

  void expect(char c) {
    if (peek() != c)
      throw ParseError(std::string("expected '") + c + "'", pos);
    ++pos;
  }

  int parse_expr() {
    const char c = peek();
    if (c == 'e') return parse_leaf();
    if (c == 'S' || c == 'P') return parse_composite(c == 'S');
    throw ParseError("expected 'e<id>', 'S(' or 'P('", pos);
  }

  int parse_leaf() {
    expect('e');
    skip_ws();
    const std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start) throw ParseError("expected edge id digits after 'e'", pos);
    const int id = std::stoi(text.substr(start, pos - start));
    if (!seen_edges.insert(id).second)
      throw ParseError("duplicate leaf edge e" + std::to_string(id), start);
    if (n_edges >= 0 && id >= n_edges)
      throw ParseError("unknown edge id e" + std::to_string(id), start);
    SpNode nd;
    nd.kind = SpNode::Kind::Leaf;
    nd.edge = id;
    tree.nodes.push_back(nd);
    return static_cast<int>(tree.nodes.size()) - 1;
  }

  int parse_composite(bool series) {
    ++pos;  // past S/P
    expect('(');
    const int l = parse_expr();
    expect(',');
    const int r = parse_expr();
    expect(')');
    SpNode nd;
    nd.kind = series ? SpNode::Kind::Series : SpNode::Kind::Parallel;
    nd.left = l;
    nd.right = r;
    tree.nodes.push_back(nd);
    return static_cast<int>(tree.nodes.size()) - 1;
  }
};

}  // namespace detail

inline SpTree parse_sp_expression(const std::string& text, int n_edges = -1) {
  detail::SpParser p(text, n_edges);
  p.tree.root = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size())
    throw ParseError("trailing characters after SP expression", p.pos);
  return p.tree;
}

inline std::string print_sp_expression(const SpTree& tree, int id = -1) {
  if (id < 0) id = tree.root;
  const SpNode& nd = tree.nodes[static_cast<std::size_t>(id)];
  switch (nd.kind) {
    case SpNode::Kind::Leaf: return "e" + std::to_string(nd.edge);
    case SpNode::Kind::Series:
      return "S(" + print_sp_expression(tree, nd.left) + "," +
             print_sp_expression(tree, nd.right) + ")";
    case SpNode::Kind::Parallel:
      return "P(" + print_sp_expression(tree, nd.left) + "," +
             print_sp_expression(tree, nd.right) + ")";
  }
  return "";
}

// ---------------------------------------------------------------------------
// Materialize the two-terminal network an SP tree represents. Leaf ids must
// be 0..E-1; network edge indices coincide with leaf ids. A single commodity
// carries `demand` from the synthesized source to the sink.
// ---------------------------------------------------------------------------

namespace detail {

struct SpBuild {
  std::vector<Edge> edges;
  int next_node = 0;

  int fresh() { return next_node++; }

  // Returns (s, t) terminals of the realized subnetwork.
  std::pair<int, int> realize(const SpTree& tree, int id, int s, int t,
                              const std::vector<LatencyFn>& lat) {
    const SpNode& nd = tree.nodes[static_cast<std::size_t>(id)];
    switch (nd.kind) {
      case SpNode::Kind::Leaf: {
        if (static_cast<std::size_t>(nd.edge) >= edges.size())
          edges.resize(static_cast<std::size_t>(nd.edge) + 1);
        edges[static_cast<std::size_t>(nd.edge)] =
            Edge{s, t, lat[static_cast<std::size_t>(nd.edge)]};
        return {s, t};
      }
      case SpNode::Kind::Series: {
        const int mid = fresh();
        realize(tree, nd.left, s, mid, lat);
        realize(tree, nd.right, mid, t, lat);
        return {s, t};
      }
      case SpNode::Kind::Parallel: {
        realize(tree, nd.left, s, t, lat);
        realize(tree, nd.right, s, t, lat);
        return {s, t};
      }
    }
    return {s, t};
  }
};

}  // namespace detail

inline Network sp_build_network(const SpTree& tree, const std::vector<LatencyFn>& latencies,
                                double demand) {
  const auto leaves = tree.leaf_edges();
  require(!leaves.empty(), "SP tree has no leaves");
  std::set<int> ids(leaves.begin(), leaves.end());
  require(ids.size() == leaves.size(), "duplicate leaf edges in SP tree");
  require(*ids.begin() == 0 && *ids.rbegin() == static_cast<int>(leaves.size()) - 1,
          "SP leaf ids must be contiguous 0..E-1");
  require(latencies.size() == leaves.size(), "latency count must match SP leaves");
  detail::SpBuild b;
  const int s = b.fresh();
  const int t = b.fresh();
  b.realize(tree, tree.root, s, t, latencies);
  return Network(b.next_node, std::move(b.edges), {Commodity{s, t, demand}});
}

}  // namespace fr

#endif  // FR_SP_TREE_HPP

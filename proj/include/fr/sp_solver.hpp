#ifndef FR_SP_SOLVER_HPP
#define FR_SP_SOLVER_HPP

#include <cmath>
#include <string>
#include <vector>

#include "fr/network.hpp"
#include "fr/sp_tree.hpp"

namespace fr {

// Generalized edge costs c_e = ell_e(x_e) - u_e / beta for edge-additive
// log-salience u.
inline std::vector<double> generalized_costs(const Network& net,
                                             const std::vector<double>& loads,
                                             const std::vector<double>& u_edge,
                                             double beta) {
  require(beta > 0.0, "generalized_costs: beta must be positive");
  require(u_edge.size() == static_cast<std::size_t>(net.n_edges()),
          "generalized_costs: u size mismatch");
  std::vector<double> c(static_cast<std::size_t>(net.n_edges()));
  for (int e = 0; e < net.n_edges(); ++e)
    c[static_cast<std::size_t>(e)] =
        net.edge(e).latency(loads[static_cast<std::size_t>(e)]) -
        u_edge[static_cast<std::size_t>(e)] / beta;
  return c;
}

// ---------------------------------------------------------------------------
// Gibbs quantities on an SP tree: per-node log partition values, traversal
// probabilities, and per-edge marginals. Bottom-up pass for log Z (leaf:
// -beta c_e; series: sum; parallel: log-sum-exp), top-down pass for w.
// ---------------------------------------------------------------------------

struct SPGibbs {
  std::vector<double> log_z;      // per tree node
  std::vector<double> traversal;  // per tree node, w_H
  std::vector<double> edge_marginal;  // per edge id, pi_e
};

namespace detail {

inline void sp_logz_rec(const SpTree& tree, int id, const std::vector<double>& costs,
                        double beta, std::vector<double>& log_z, bool use_delta) {
  const SpNode& nd = tree.nodes[static_cast<std::size_t>(id)];
  switch (nd.kind) {
    case SpNode::Kind::Leaf:
      log_z[static_cast<std::size_t>(id)] =
          -beta * costs[static_cast<std::size_t>(nd.edge)];
      return;
    case SpNode::Kind::Series:
      sp_logz_rec(tree, nd.left, costs, beta, log_z, use_delta);
      sp_logz_rec(tree, nd.right, costs, beta, log_z, use_delta);
      log_z[static_cast<std::size_t>(id)] = log_z[static_cast<std::size_t>(nd.left)] +
                                            log_z[static_cast<std::size_t>(nd.right)];
      return;
    case SpNode::Kind::Parallel: {
      sp_logz_rec(tree, nd.left, costs, beta, log_z, use_delta);
      sp_logz_rec(tree, nd.right, costs, beta, log_z, use_delta);
      const double bias = use_delta ? nd.delta : 0.0;
      log_z[static_cast<std::size_t>(id)] =
          log_add_exp(bias + log_z[static_cast<std::size_t>(nd.left)],
                      log_z[static_cast<std::size_t>(nd.right)]);
      return;
    }
  }
}

inline void sp_traversal_rec(const SpTree& tree, int id, double w,
                             const std::vector<double>& log_z,
                             std::vector<double>& traversal,
                             std::vector<double>& edge_marginal, bool use_delta) {
  traversal[static_cast<std::size_t>(id)] = w;
  const SpNode& nd = tree.nodes[static_cast<std::size_t>(id)];
  switch (nd.kind) {
    case SpNode::Kind::Leaf:
      edge_marginal[static_cast<std::size_t>(nd.edge)] = w;
      return;
    case SpNode::Kind::Series:
      sp_traversal_rec(tree, nd.left, w, log_z, traversal, edge_marginal, use_delta);
      sp_traversal_rec(tree, nd.right, w, log_z, traversal, edge_marginal, use_delta);
      return;
    case SpNode::Kind::Parallel: {
      const double bias = use_delta ? nd.delta : 0.0;
      const double pl = std::exp(bias + log_z[static_cast<std::size_t>(nd.left)] -
                                 log_z[static_cast<std::size_t>(id)]);
      sp_traversal_rec(tree, nd.left, w * pl, log_z, traversal, edge_marginal, use_delta);
      sp_traversal_rec(tree, nd.right, w * (1.0 - pl), log_z, traversal, edge_marginal,
                       use_delta);
      return;
    }
  }
}

}  // namespace detail

inline SPGibbs sp_partition(const SpTree& tree, const std::vector<double>& generalized_costs,
                            double beta, bool use_delta = false) {
  require(beta > 0.0, "sp_partition: beta must be positive");
  SPGibbs g;
  g.log_z.assign(tree.nodes.size(), 0.0);
  const auto leaves = tree.leaf_edges();
  int max_edge = 0;
  for (int e : leaves) max_edge = std::max(max_edge, e);
  require(generalized_costs.size() > static_cast<std::size_t>(max_edge),
          "sp_partition: cost vector too short for leaf ids");
  g.traversal.assign(tree.nodes.size(), 0.0);
  g.edge_marginal.assign(generalized_costs.size(), 0.0);
  detail::sp_logz_rec(tree, tree.root, generalized_costs, beta, g.log_z, use_delta);
  detail::sp_traversal_rec(tree, tree.root, 1.0, g.log_z, g.traversal, g.edge_marginal,
                           use_delta);
  return g;
}

// ---------------------------------------------------------------------------
// Split-flow convex program for SW-SUE on SP networks under edge-additive
// salience. Variables: one left-branch flow y_H per parallel node. Objective
//   Psi_u(y) = sum_e int_0^{x_e} ell - (1/beta) sum_e u_e x_e
//            + (1/beta) sum_H [y log y + (d_H - y) log(d_H - y) - d_H log d_H].
// Projected gradient with step 1/L on the interior box; the gradient comes
// from one forward (flow) pass and one reverse (adjoint) pass, both O(|E|).
// ---------------------------------------------------------------------------

struct SpSplitOptions {
  double tol = 1e-10;   // infinity norm of the projected gradient
  int max_iter = 200000;
  double interior_rel = 1e-9;  // epsilon = interior_rel * demand
  bool record_trace = false;   // objective per iteration (diagnostics only)
};

struct SpSplitResult {
  std::vector<double> splits;      // y_H per parallel node (tree order)
  std::vector<int> parallel_nodes; // tree node ids matching `splits`
  std::vector<double> edge_loads;
  double social_cost = 0.0;
  double objective = 0.0;
  double grad_norm = kInf;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;
  std::string diagnostics;
};

namespace detail {

struct SpSplitWork {
  const SpTree& tree;
  const Network& net;  // edge index == leaf id
  const std::vector<double>& u;
  double beta;
  std::vector<int> parallel_nodes;      // discovery order (pre-order)
  std::vector<int> node_to_split;       // tree node id -> split index or -1
  std::vector<double> inflow;           // per tree node, d_H
  std::vector<double> adjoint;          // per tree node, J_H
  std::vector<double> loads;            // per edge

  SpSplitWork(const SpTree& t, const Network& n, const std::vector<double>& u_edge,
              double b)
      : tree(t), net(n), u(u_edge), beta(b) {
    node_to_split.assign(tree.nodes.size(), -1);
    collect(tree.root);
    inflow.assign(tree.nodes.size(), 0.0);
    adjoint.assign(tree.nodes.size(), 0.0);
    loads.assign(static_cast<std::size_t>(net.n_edges()), 0.0);
  }

  void collect(int id) {
    const SpNode& nd = tree.nodes[static_cast<std::size_t>(id)];
    if (nd.kind == SpNode::Kind::Leaf) return;
    if (nd.kind == SpNode::Kind::Parallel) {
      node_to_split[static_cast<std::size_t>(id)] =
          static_cast<int>(parallel_nodes.size());
      parallel_nodes.push_back(id);
    }
    collect(nd.left);
    collect(nd.right);
  }

  // Top-down flow pass: fills inflow[] and loads[].
  void forward(const std::vector<double>& y, int id, double d) {
    inflow[static_cast<std::size_t>(id)] = d;
    const SpNode& nd = tree.nodes[static_cast<std::size_t>(id)];
    switch (nd.kind) {
      case SpNode::Kind::Leaf:
        loads[static_cast<std::size_t>(nd.edge)] = d;
        return;
      case SpNode::Kind::Series:
        forward(y, nd.left, d);
        forward(y, nd.right, d);
        return;
      case SpNode::Kind::Parallel: {
        const double yl = y[static_cast<std::size_t>(
            node_to_split[static_cast<std::size_t>(id)])];
        forward(y, nd.left, yl);
        forward(y, nd.right, d - yl);
        return;
      }
    }
  }

  // Bottom-up adjoint pass: J_H = d(subtree objective)/d(inflow).
  double reverse(const std::vector<double>& y, int id) {
    const SpNode& nd = tree.nodes[static_cast<std::size_t>(id)];
    double j = 0.0;
    switch (nd.kind) {
      case SpNode::Kind::Leaf:
        j = net.edge(nd.edge).latency(loads[static_cast<std::size_t>(nd.edge)]) -
            u[static_cast<std::size_t>(nd.edge)] / beta;
        break;
      case SpNode::Kind::Series:
        j = reverse(y, nd.left) + reverse(y, nd.right);
        break;
      case SpNode::Kind::Parallel: {
        reverse(y, nd.left);
        const double jr = reverse(y, nd.right);
        const double d = inflow[static_cast<std::size_t>(id)];
        const double yl = y[static_cast<std::size_t>(
            node_to_split[static_cast<std::size_t>(id)])];
        // Extra inflow with y fixed routes to the right child; the node's own
        // entropy contributes d/dd of (d-y)log(d-y) - d log d.
        j = jr + (std::log(std::max(d - yl, 1e-300)) - std::log(std::max(d, 1e-300))) / beta;
        break;
      }
    }
    adjoint[static_cast<std::size_t>(id)] = j;
    return j;
  }

  double objective(const std::vector<double>& y, double demand) {
    forward(y, tree.root, demand);
    double val = 0.0;
    for (int e = 0; e < net.n_edges(); ++e)
      val += net.edge(e).latency.integral(loads[static_cast<std::size_t>(e)]) -
             u[static_cast<std::size_t>(e)] * loads[static_cast<std::size_t>(e)] / beta;
    for (std::size_t s = 0; s < parallel_nodes.size(); ++s) {
      const int id = parallel_nodes[s];
      const double d = inflow[static_cast<std::size_t>(id)];
      const double yl = y[s];
      const double yr = d - yl;
      double ent = 0.0;
      if (yl > 0.0) ent += yl * std::log(yl);
      if (yr > 0.0) ent += yr * std::log(yr);
      if (d > 0.0) ent -= d * std::log(d);
      val += ent / beta;
    }
    return val;
  }

  // Gradient w.r.t. y; forward() must be current. grad[s] for split s at
  // parallel node H: J_L - J_R + (log y - log(d_H - y))/beta.
  void gradient(const std::vector<double>& y, std::vector<double>& grad) {
    reverse(y, tree.root);
    grad.resize(parallel_nodes.size());
    for (std::size_t s = 0; s < parallel_nodes.size(); ++s) {
      const int id = parallel_nodes[s];
      const SpNode& nd = tree.nodes[static_cast<std::size_t>(id)];
      const double d = inflow[static_cast<std::size_t>(id)];
      const double yl = y[s];
      grad[s] = adjoint[static_cast<std::size_t>(nd.left)] -
                adjoint[static_cast<std::size_t>(nd.right)] +
                (std::log(std::max(yl, 1e-300)) - std::log(std::max(d - yl, 1e-300))) / beta;
    }
  }
};

}  // namespace detail

inline SpSplitResult sp_split_solve(const SpTree& tree, const Network& net,
                                    const std::vector<double>& u_edge_additive,
                                    double beta, double demand,
                                    const SpSplitOptions& opts = SpSplitOptions{}) {
  require(beta > 0.0, "sp_split_solve: beta must be positive");
  require(demand >= 0.0, "sp_split_solve: demand must be nonnegative");
  require(u_edge_additive.size() == static_cast<std::size_t>(net.n_edges()),
          "sp_split_solve: u size mismatch");

  detail::SpSplitWork w(tree, net, u_edge_additive, beta);
  SpSplitResult res;
  res.parallel_nodes = w.parallel_nodes;

  if (demand == 0.0) {
    res.splits.assign(w.parallel_nodes.size(), 0.0);
    res.edge_loads.assign(static_cast<std::size_t>(net.n_edges()), 0.0);
    res.converged = true;
    res.grad_norm = 0.0;
    return res;
  }

  const double eps = opts.interior_rel * demand;
  // Even splits to start: assign y = d_H / 2 on the way down.
  std::vector<double> y(w.parallel_nodes.size(), 0.0);
  {
    std::function<void(int, double)> init = [&](int id, double d) {
      const SpNode& nd = tree.nodes[static_cast<std::size_t>(id)];
      switch (nd.kind) {
        case SpNode::Kind::Leaf: return;
        case SpNode::Kind::Series:
          init(nd.left, d);
          init(nd.right, d);
          return;
        case SpNode::Kind::Parallel: {
          const double yl = 0.5 * d;
          y[static_cast<std::size_t>(w.node_to_split[static_cast<std::size_t>(id)])] = yl;
          init(nd.left, yl);
          init(nd.right, d - yl);
          return;
        }
      }
    };
    init(tree.root, demand);
  }

  // Lipschitz estimate by power iteration on a finite-difference
  // Hessian-vector oracle, with a 2x safety factor.
  std::vector<double> grad0, gplus, gminus;
  w.forward(y, tree.root, demand);
  w.gradient(y, grad0);
  double L = 1.0;
  {
    const std::size_t n = y.size();
    if (n > 0) {
      std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
      const double h = 1e-6 * demand;
      double lam = 1.0;
      for (int it = 0; it < 40; ++it) {
        auto yp = y, ym = y;
        for (std::size_t i = 0; i < n; ++i) {
          yp[i] += h * v[i];
          ym[i] -= h * v[i];
        }
        w.forward(yp, tree.root, demand);
        w.gradient(yp, gplus);
        w.forward(ym, tree.root, demand);
        w.gradient(ym, gminus);
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          v[i] = (gplus[i] - gminus[i]) / (2.0 * h);
          norm += v[i] * v[i];
        }
        norm = std::sqrt(norm);
        if (norm <= 0.0) break;
        lam = norm;
        for (std::size_t i = 0; i < n; ++i) v[i] /= norm;
      }
      L = std::max(2.0 * lam, 1e-8);
    }
  }

  const double step = 1.0 / L;
  std::vector<double> grad;
  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    w.forward(y, tree.root, demand);
    // nested parallels: an outer split update can shrink a subtree's inflow
    // below an inner split, so re-clamp against the fresh inflows
    bool adjusted = false;
    for (std::size_t s = 0; s < y.size(); ++s) {
      const double d = w.inflow[static_cast<std::size_t>(w.parallel_nodes[s])];
      const double lo = std::min(eps, 0.5 * d);
      const double clamped = clamp(y[s], lo, d - lo);
      if (clamped != y[s]) {
        y[s] = clamped;
        adjusted = true;
      }
    }
    if (adjusted) w.forward(y, tree.root, demand);
    if (opts.record_trace) res.objective_trace.push_back(w.objective(y, demand));
    w.gradient(y, grad);
    // Projected-gradient optimality: gradient components count only when not
    // pressing against the active box bound.
    double gnorm = 0.0;
    for (std::size_t s = 0; s < y.size(); ++s) {
      const double d = w.inflow[static_cast<std::size_t>(w.parallel_nodes[s])];
      const double lo = std::min(eps, 0.5 * d);
      const double hi = d - lo;
      double g = grad[s];
      if (y[s] <= lo + 1e-15 * demand && g > 0.0) g = 0.0;
      if (y[s] >= hi - 1e-15 * demand && g < 0.0) g = 0.0;
      gnorm = std::max(gnorm, std::abs(g));
    }
    res.grad_norm = gnorm;
    if (gnorm <= opts.tol) {
      res.converged = true;
      break;
    }
    for (std::size_t s = 0; s < y.size(); ++s) {
      const double d = w.inflow[static_cast<std::size_t>(w.parallel_nodes[s])];
      const double lo = std::min(eps, 0.5 * d);
      y[s] = clamp(y[s] - step * grad[s], lo, d - lo);
    }
  }

  w.forward(y, tree.root, demand);
  res.splits = y;
  res.edge_loads = w.loads;
  res.social_cost = social_cost(net, w.loads);
  res.objective = w.objective(y, demand);
  res.iterations = iter;
  if (!res.converged)
    res.diagnostics = "sp_split_solve: projected gradient norm " +
                      std::to_string(res.grad_norm) + " after " + std::to_string(iter) +
                      " iterations";
  return res;
}

}  // namespace fr

#endif  // FR_SP_SOLVER_HPP

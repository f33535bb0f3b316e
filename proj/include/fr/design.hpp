#ifndef FR_DESIGN_HPP
#define FR_DESIGN_HPP

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fr/sp_solver.hpp"
#include "fr/sue.hpp"

namespace fr {

// ---------------------------------------------------------------------------
// Inverse salience: s_{k,p} = f_{k,p} exp(beta L_p(x(f))) implements an
// interior target flow exactly. Boundary targets error out, optionally after
// an epsilon-mix with the uniform flow (set perturb_eps > 0).
// ---------------------------------------------------------------------------

inline std::vector<std::vector<double>> interior_perturbation(
    const Network& net, const PathCatalog& catalog,
    const std::vector<std::vector<double>>& flows, double eps) {
  auto out = flows;
  for (int k = 0; k < catalog.n_commodities(); ++k) {
    const double d = net.commodity(k).demand;
    const double u = d / catalog.n_paths(k);
    for (auto& f : out[static_cast<std::size_t>(k)]) f = (1.0 - eps) * f + eps * u;
  }
  return out;
}

inline SaliencePolicy inverse_salience(const Network& net, const PathCatalog& catalog,
                                       const std::vector<std::vector<double>>& target_flow,
                                       double beta, double perturb_eps = 0.0) {
  require(beta > 0.0, "inverse_salience: beta must be positive");
  auto flows = perturb_eps > 0.0
                   ? interior_perturbation(net, catalog, target_flow, perturb_eps)
                   : target_flow;
  for (int k = 0; k < catalog.n_commodities(); ++k) {
    const double d = net.commodity(k).demand;
    double s = 0.0;
    for (double f : flows[static_cast<std::size_t>(k)]) {
      if (f < 1e-9 * d)
        throw DomainError(
            "inverse_salience: target flow is not interior; pass perturb_eps > 0 for an "
            "epsilon-implementable mix");
      s += f;
    }
    require(std::abs(s - d) <= 1e-9 * std::max(1.0, d),
            "inverse_salience: target violates conservation");
  }
  const auto loads = edge_loads_of(net, catalog, flows);
  std::vector<std::vector<double>> weights(static_cast<std::size_t>(catalog.n_commodities()));
  for (int k = 0; k < catalog.n_commodities(); ++k) {
    const auto& ps = catalog.paths(k);
    auto& wk = weights[static_cast<std::size_t>(k)];
    wk.resize(ps.size());
    for (std::size_t p = 0; p < ps.size(); ++p) {
      const double L = path_latency(net, loads, ps[p]);
      // computed in log space, then canonicalized, to dodge overflow
      wk[p] = std::log(flows[static_cast<std::size_t>(k)][p]) + beta * L;
    }
    const double mn = *std::min_element(wk.begin(), wk.end());
    for (double& w : wk) w = std::exp(w - mn);
  }
  return SaliencePolicy(std::move(weights));
}

// ---------------------------------------------------------------------------
// Governance: per-commodity ratio budgets plus an optional affine tying map
// u = A theta + b on the stacked log-salience vector.
// ---------------------------------------------------------------------------

struct GovernanceSpec {
  std::vector<double> ratio_budgets;  // R_k >= 1; empty = unbounded
  std::optional<Eigen::MatrixXd> tying_matrix;  // A, rows = stacked (k,p)
  std::optional<Eigen::VectorXd> tying_offset;  // b, defaults to zero
  double tol = 1e-8;

  void validate() const {
    for (double r : ratio_budgets) require(r >= 1.0, "ratio budgets must be >= 1");
  }
};

struct ImplementabilityReport {
  std::vector<std::vector<double>> required_log_salience;  // a_{k,p}
  std::vector<double> range;                               // per commodity
  std::vector<double> r_min;                               // exp(range)
  std::vector<bool> feasible_ratio;
  bool feasible_ratio_all = true;
  bool feasible_tied = true;     // true when no tying map was given
  bool feasible_governed = true;
  double tying_residual = 0.0;   // distance to U + C when infeasible
  SaliencePolicy implementing_salience;  // populated when governed-feasible
};

inline ImplementabilityReport implementability_report(
    const Network& net, const PathCatalog& catalog,
    const std::vector<std::vector<double>>& target_flow, double beta,
    const GovernanceSpec& gov = GovernanceSpec{}) {
  gov.validate();
  // required log-salience up to scale: a = log f + beta L
  for (int k = 0; k < catalog.n_commodities(); ++k) {
    const double d = net.commodity(k).demand;
    for (double f : target_flow[static_cast<std::size_t>(k)])
      if (f < 1e-9 * d)
        throw DomainError("implementability_report: target flow is not interior");
  }
  const auto loads = edge_loads_of(net, catalog, target_flow);
  ImplementabilityReport rep;
  rep.required_log_salience.resize(static_cast<std::size_t>(catalog.n_commodities()));
  int stacked = 0;
  for (int k = 0; k < catalog.n_commodities(); ++k) {
    const auto& ps = catalog.paths(k);
    auto& ak = rep.required_log_salience[static_cast<std::size_t>(k)];
    ak.resize(ps.size());
    for (std::size_t p = 0; p < ps.size(); ++p)
      ak[p] = std::log(target_flow[static_cast<std::size_t>(k)][p]) +
              beta * path_latency(net, loads, ps[p]);
    const double mx = *std::max_element(ak.begin(), ak.end());
    const double mn = *std::min_element(ak.begin(), ak.end());
    rep.range.push_back(mx - mn);
    rep.r_min.push_back(std::exp(mx - mn));
    stacked += static_cast<int>(ps.size());
  }

  for (int k = 0; k < catalog.n_commodities(); ++k) {
    bool ok = true;
    if (!gov.ratio_budgets.empty()) {
      require(gov.ratio_budgets.size() == static_cast<std::size_t>(catalog.n_commodities()),
              "implementability_report: one budget per commodity");
      ok = rep.range[static_cast<std::size_t>(k)] <=
           std::log(gov.ratio_budgets[static_cast<std::size_t>(k)]) + gov.tol;
    }
    rep.feasible_ratio.push_back(ok);
    rep.feasible_ratio_all = rep.feasible_ratio_all && ok;
  }

  if (gov.tying_matrix) {
    // least squares over [A | commodity-intercept columns]; minimum-norm via
    // a complete orthogonal decomposition when A is rank-deficient
    const Eigen::MatrixXd& A = *gov.tying_matrix;
    require(A.rows() == stacked, "tying matrix rows must match stacked path count");
    Eigen::VectorXd a(stacked);
    int at = 0;
    for (int k = 0; k < catalog.n_commodities(); ++k)
      for (double v : rep.required_log_salience[static_cast<std::size_t>(k)]) a(at++) = v;
    if (gov.tying_offset) a -= *gov.tying_offset;
    Eigen::MatrixXd design(stacked, A.cols() + catalog.n_commodities());
    design.leftCols(A.cols()) = A;
    design.rightCols(catalog.n_commodities()).setZero();
    at = 0;
    for (int k = 0; k < catalog.n_commodities(); ++k)
      for (int p = 0; p < catalog.n_paths(k); ++p)
        design(at++, A.cols() + k) = 1.0;
    const Eigen::VectorXd sol =
        design.completeOrthogonalDecomposition().solve(a);
    rep.tying_residual = (design * sol - a).norm();
    rep.feasible_tied = rep.tying_residual <= gov.tol;
  }

  rep.feasible_governed = rep.feasible_ratio_all && rep.feasible_tied;
  if (rep.feasible_governed) {
    std::vector<std::vector<double>> w(rep.required_log_salience.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
      const auto& ak = rep.required_log_salience[k];
      const double mn = *std::min_element(ak.begin(), ak.end());
      w[k].resize(ak.size());
      for (std::size_t p = 0; p < ak.size(); ++p) w[k][p] = std::exp(ak[p] - mn);
    }
    rep.implementing_salience = SaliencePolicy(std::move(w));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Closed-form optimal bounded-influence salience on the Pigou network.
// r(f_b) = f_b/(1-f_b) exp(beta (f_b - 1)) is strictly increasing; the
// optimal split clips 1/2 to [f_b(1/R), f_b(R)].
// ---------------------------------------------------------------------------

struct PigouOptimal {
  double f_star = 0.0;
  double r_star = 0.0;
  double sc_star = 0.0;
  double f_min = 0.0;
  double f_max = 0.0;
};

inline double pigou_ratio_of_split(double f, double beta) {
  return f / (1.0 - f) * std::exp(beta * (f - 1.0));
}

inline double pigou_split_of_ratio(double r, double beta) {
  if (r <= 0.0) return 0.0;
  if (std::isinf(r)) return 1.0;
  return bisect(
      [&](double f) { return std::log(f / (1.0 - f)) + beta * (f - 1.0) - std::log(r); },
      1e-15, 1.0 - 1e-15, 1e-16);
}

inline PigouOptimal pigou_optimal(double beta, double budget) {
  require(beta > 0.0, "pigou_optimal: beta must be positive");
  require(budget >= 1.0, "pigou_optimal: budget must be >= 1");
  PigouOptimal out;
  out.f_min = pigou_split_of_ratio(std::isinf(budget) ? 0.0 : 1.0 / budget, beta);
  out.f_max = pigou_split_of_ratio(budget, beta);
  out.f_star = clamp(0.5, out.f_min, out.f_max);
  out.r_star = pigou_ratio_of_split(out.f_star, beta);
  out.sc_star = 1.0 - out.f_star + out.f_star * out.f_star;
  return out;
}

// ---------------------------------------------------------------------------
// Parallel-network bounded-influence design: outer one-dimensional search on
// the band anchor t, inner convex program on the box-constrained simplex via
// clipped marginal-cost equalization (bisection on the multiplier).
// ---------------------------------------------------------------------------

struct ParallelDesignOptions {
  int coarse_grid = 64;
  double t_tol = 1e-6;
  double mass_tol = 1e-10;
};

struct ParallelDesignResult {
  std::vector<double> flows;
  std::vector<double> salience;  // canonicalized implementing weights
  double social_cost = kInf;
  double t_star = 0.0;
  double required_r = 1.0;  // exp(range of g_i(f_i)) at the optimum
};

namespace detail {

struct ParallelWork {
  const std::vector<LatencyFn>& lat;
  double beta;
  double demand;

  double g(std::size_t i, double z) const { return std::log(z) + beta * lat[i](z); }

  double g_inv(std::size_t i, double t) const {
    if (g(i, demand) <= t) return demand;
    const double lo = 1e-12 * demand;
    if (g(i, lo) >= t) return lo;
    return bisect([&](double z) { return g(i, z) - t; }, lo, demand, 1e-15 * demand);
  }

  double marginal(std::size_t i, double z) const {
    return lat[i](z) + z * lat[i].derivative(z);
  }

  // min sum f_i lat_i(f_i) over the box-constrained simplex; empty optional
  // when the box is infeasible.
  std::optional<std::vector<double>> inner(const std::vector<double>& lo,
                                           const std::vector<double>& up,
                                           double mass_tol) const {
    const std::size_t m = lat.size();
    double lo_sum = 0.0, up_sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (lo[i] > up[i] + 1e-15) return std::nullopt;
      lo_sum += lo[i];
      up_sum += up[i];
    }
    if (lo_sum > demand + 1e-12 || up_sum < demand - 1e-12) return std::nullopt;

    const auto f_of = [&](double lambda) {
      std::vector<double> f(m);
      for (std::size_t i = 0; i < m; ++i) {
        if (marginal(i, lo[i]) >= lambda)
          f[i] = lo[i];
        else if (marginal(i, up[i]) <= lambda)
          f[i] = up[i];
        else
          f[i] = bisect([&](double z) { return marginal(i, z) - lambda; }, lo[i], up[i],
                        1e-15 * std::max(1.0, demand));
      }
      return f;
    };
    double lam_lo = kInf, lam_hi = -kInf;
    for (std::size_t i = 0; i < m; ++i) {
      lam_lo = std::min(lam_lo, marginal(i, lo[i]));
      lam_hi = std::max(lam_hi, marginal(i, up[i]));
    }
    lam_lo -= 1.0;
    lam_hi += 1.0;
    for (int it = 0; it < 200; ++it) {
      const double lam = 0.5 * (lam_lo + lam_hi);
      const double s = sum(f_of(lam));
      if (s < demand)
        lam_lo = lam;
      else
        lam_hi = lam;
    }
    const double lam = 0.5 * (lam_lo + lam_hi);
    auto f = f_of(lam);
    // distribute any multiplier-plateau residual (constant marginal costs)
    double resid = demand - sum(f);
    if (std::abs(resid) > mass_tol) {
      for (std::size_t i = 0; i < m && std::abs(resid) > mass_tol; ++i) {
        if (std::abs(marginal(i, lo[i]) - lam) > 1e-7 &&
            std::abs(marginal(i, up[i]) - lam) > 1e-7)
          continue;
        const double room = resid > 0 ? up[i] - f[i] : lo[i] - f[i];
        const double take = resid > 0 ? std::min(resid, room) : std::max(resid, room);
        f[i] += take;
        resid -= take;
      }
      if (std::abs(resid) > 1e-6 * std::max(1.0, demand)) return std::nullopt;
      // final exact rebalance on any route with slack
      for (std::size_t i = 0; i < m && std::abs(resid) > 0.0; ++i) {
        const double room = resid > 0 ? up[i] - f[i] : lo[i] - f[i];
        const double take = resid > 0 ? std::min(resid, room) : std::max(resid, room);
        f[i] += take;
        resid -= take;
      }
    }
    return f;
  }

  double sc(const std::vector<double>& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * lat[i](f[i]);
    return s;
  }
};

}  // namespace detail

inline ParallelDesignResult parallel_design(const std::vector<LatencyFn>& latencies,
                                            double beta, double budget, double demand,
                                            const ParallelDesignOptions& opts =
                                                ParallelDesignOptions{}) {
  require(latencies.size() >= 2, "parallel_design: need at least two routes");
  require(beta > 0.0 && demand > 0.0, "parallel_design: beta and demand must be positive");
  require(budget >= 1.0, "parallel_design: budget must be >= 1");
  detail::ParallelWork w{latencies, beta, demand};
  // ratios beyond e^60 are numerically unconstrained; keeps budget = inf finite
  const double log_r = std::min(std::log(budget), 60.0);
  const std::size_t m = latencies.size();

  double t_lo = kInf, t_hi = -kInf;
  for (std::size_t i = 0; i < m; ++i) {
    t_lo = std::min(t_lo, w.g(i, 1e-9 * demand));
    t_hi = std::max(t_hi, w.g(i, demand));
  }

  // Feasible anchors form an interval: t_max solves sum_i g_i^{-1}(t) = d
  // (lower bounds exhaust demand) and t_min solves the same with t + log R.
  const auto mass_at = [&](double t) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += w.g_inv(i, t);
    return s;
  };
  const auto solve_mass = [&](double shift) {
    double lo = t_lo - shift, hi = t_hi;
    if (mass_at(lo + shift) >= demand) return lo;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mass_at(mid + shift) < demand)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double t_max = solve_mass(0.0);
  const double t_min = std::min(solve_mass(log_r), t_max);

  const auto value_at = [&](double t) -> std::pair<double, std::vector<double>> {
    std::vector<double> lo(m), up(m);
    for (std::size_t i = 0; i < m; ++i) {
      lo[i] = w.g_inv(i, t);
      up[i] = w.g_inv(i, t + log_r);
    }
    auto f = w.inner(lo, up, opts.mass_tol);
    if (!f) return {kInf, {}};
    return {w.sc(*f), *f};
  };

  double best_t = 0.5 * (t_min + t_max), best_v = kInf;
  std::vector<double> best_f;
  for (int i = 0; i <= opts.coarse_grid; ++i) {
    const double t =
        opts.coarse_grid > 0 ? t_min + (t_max - t_min) * i / opts.coarse_grid : t_min;
    auto [v, f] = value_at(t);
    if (v < best_v) {
      best_v = v;
      best_t = t;
      best_f = f;
    }
    if (t_max <= t_min) break;
  }
  if (best_v == kInf) throw InfeasibleError("parallel_design: no feasible band anchor");

  // golden-section refinement around the best coarse point
  const double h = std::max((t_max - t_min) / opts.coarse_grid, 0.5 * opts.t_tol);
  double a = std::max(best_t - h, t_min), b = std::min(best_t + h, t_max);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  auto v1 = value_at(x1), v2 = value_at(x2);
  while (b - a > opts.t_tol) {
    if (v1.first <= v2.first) {
      b = x2;
      x2 = x1;
      v2 = v1;
      x1 = b - gr * (b - a);
      v1 = value_at(x1);
    } else {
      a = x1;
      x1 = x2;
      v1 = v2;
      x2 = a + gr * (b - a);
      v2 = value_at(x2);
    }
  }
  for (const auto& cand : {v1, v2, value_at(0.5 * (a + b))}) {
    if (cand.first < best_v) {
      best_v = cand.first;
      best_f = cand.second;
    }
  }

  ParallelDesignResult res;
  res.flows = best_f;
  res.social_cost = best_v;
  res.t_star = 0.5 * (a + b);
  // implementing salience s_i ~ f_i exp(beta lat_i(f_i)), canonicalized
  std::vector<double> logs(m);
  for (std::size_t i = 0; i < m; ++i) logs[i] = w.g(i, best_f[i]);
  const double mn = *std::min_element(logs.begin(), logs.end());
  const double mx = *std::max_element(logs.begin(), logs.end());
  res.required_r = std::exp(mx - mn);
  res.salience.resize(m);
  for (std::size_t i = 0; i < m; ++i) res.salience[i] = std::exp(logs[i] - mn);
  return res;
}

// ---------------------------------------------------------------------------
// Decomposition-tied inverse on SP trees: one bottom-up pass computes the
// branch biases delta_H = log(d_L/d_R) - (V_L - V_R) and inclusive values;
// per-node budgets turn into |delta_H| <= log R_H tests.
// ---------------------------------------------------------------------------

struct SpInverseResult {
  std::vector<int> parallel_nodes;   // tree node ids, bottom-up pass order
  std::vector<double> delta;         // branch bias per parallel node
  std::vector<bool> feasible;        // |delta| <= log R_H when budgets given
  bool all_feasible = true;
  std::vector<double> inclusive_value;  // V_H per tree node
  std::vector<double> round_trip_loads;
  double round_trip_error = 0.0;     // infinity norm against the target
};

inline SpInverseResult sp_tied_inverse(const SpTree& tree, const Network& net,
                                       const std::vector<double>& target_edge_loads,
                                       double beta,
                                       const std::vector<double>& local_budgets = {}) {
  require(beta > 0.0, "sp_tied_inverse: beta must be positive");
  require(target_edge_loads.size() == static_cast<std::size_t>(net.n_edges()),
          "sp_tied_inverse: load vector size mismatch");

  SpInverseResult res;
  res.inclusive_value.assign(tree.nodes.size(), 0.0);
  std::vector<double> through(tree.nodes.size(), 0.0);

  // bottom-up: subgraph throughflow from the target loads
  std::function<double(int)> flow_of = [&](int id) -> double {
    const SpNode& nd = tree.nodes[static_cast<std::size_t>(id)];
    double d = 0.0;
    switch (nd.kind) {
      case SpNode::Kind::Leaf:
        d = target_edge_loads[static_cast<std::size_t>(nd.edge)];
        break;
      case SpNode::Kind::Series: {
        const double l = flow_of(nd.left);
        const double r = flow_of(nd.right);
        require(std::abs(l - r) <= 1e-9 * std::max(1.0, l),
                "sp_tied_inverse: series children carry unequal flow");
        d = l;
        break;
      }
      case SpNode::Kind::Parallel:
        d = flow_of(nd.left) + flow_of(nd.right);
        break;
    }
    through[static_cast<std::size_t>(id)] = d;
    return d;
  };
  const double demand = flow_of(tree.root);

  std::size_t split_idx = 0;
  std::function<void(int)> pass = [&](int id) {
    const SpNode& nd = tree.nodes[static_cast<std::size_t>(id)];
    switch (nd.kind) {
      case SpNode::Kind::Leaf:
        res.inclusive_value[static_cast<std::size_t>(id)] =
            -beta * net.edge(nd.edge).latency(
                        target_edge_loads[static_cast<std::size_t>(nd.edge)]);
        return;
      case SpNode::Kind::Series:
        pass(nd.left);
        pass(nd.right);
        res.inclusive_value[static_cast<std::size_t>(id)] =
            res.inclusive_value[static_cast<std::size_t>(nd.left)] +
            res.inclusive_value[static_cast<std::size_t>(nd.right)];
        return;
      case SpNode::Kind::Parallel: {
        const double dl = through[static_cast<std::size_t>(nd.left)];
        const double dr = through[static_cast<std::size_t>(nd.right)];
        if (dl < 1e-9 * demand || dr < 1e-9 * demand)
          throw DomainError("sp_tied_inverse: target not interior at parallel node " +
                            std::to_string(id));
        pass(nd.left);
        pass(nd.right);
        const double vl = res.inclusive_value[static_cast<std::size_t>(nd.left)];
        const double vr = res.inclusive_value[static_cast<std::size_t>(nd.right)];
        const double delta = std::log(dl / dr) - (vl - vr);
        res.parallel_nodes.push_back(id);
        res.delta.push_back(delta);
        if (!local_budgets.empty()) {
          const double rh = local_budgets[split_idx];
          require(rh >= 1.0, "sp_tied_inverse: local budgets must be >= 1");
          const bool ok = std::abs(delta) <= std::log(rh) + 1e-12;
          res.feasible.push_back(ok);
          res.all_feasible = res.all_feasible && ok;
        } else {
          res.feasible.push_back(true);
        }
        ++split_idx;
        res.inclusive_value[static_cast<std::size_t>(id)] =
            log_add_exp(delta + vl, vr);
        return;
      }
    }
  };
  pass(tree.root);

  // verification: forward the biases through the logit split assignment at
  // the target loads and compare the induced edge flows
  res.round_trip_loads.assign(static_cast<std::size_t>(net.n_edges()), 0.0);
  std::map<int, std::size_t> split_of;
  for (std::size_t i = 0; i < res.parallel_nodes.size(); ++i)
    split_of[res.parallel_nodes[i]] = i;
  std::function<void(int, double)> forward = [&](int id, double d) {
    const SpNode& nd = tree.nodes[static_cast<std::size_t>(id)];
    switch (nd.kind) {
      case SpNode::Kind::Leaf:
        res.round_trip_loads[static_cast<std::size_t>(nd.edge)] = d;
        return;
      case SpNode::Kind::Series:
        forward(nd.left, d);
        forward(nd.right, d);
        return;
      case SpNode::Kind::Parallel: {
        const double delta = res.delta[split_of.at(id)];
        const double vl = res.inclusive_value[static_cast<std::size_t>(nd.left)];
        const double vr = res.inclusive_value[static_cast<std::size_t>(nd.right)];
        const double pl = 1.0 / (1.0 + std::exp(-(delta + vl - vr)));
        forward(nd.left, d * pl);
        forward(nd.right, d * (1.0 - pl));
        return;
      }
    }
  };
  forward(tree.root, demand);
  res.round_trip_error = linf_diff(res.round_trip_loads, target_edge_loads);
  return res;
}

// ---------------------------------------------------------------------------
// Implicit differentiation through a fixed point x = T(x, theta):
//   dx/dtheta . probe = (I - dT/dx)^{-1} (dT/dtheta . probe).
// Jacobians come from the supplied oracles or central finite differences.
// ---------------------------------------------------------------------------

struct ImplicitMap {
  std::function<std::vector<double>(const std::vector<double>& x,
                                    const std::vector<double>& theta)>
      map;
  double fd_step_rel = 1e-5;
};

inline std::vector<double> implicit_sensitivity(const ImplicitMap& oracle,
                                                const std::vector<double>& x_star,
                                                const std::vector<double>& theta,
                                                const std::vector<double>& probe) {
  require(probe.size() == theta.size(), "implicit_sensitivity: probe/theta size mismatch");
  const int n = static_cast<int>(x_star.size());
  const auto tx = oracle.map(x_star, theta);
  require(linf_diff(tx, x_star) <= 1e-6,
          "implicit_sensitivity: x_star is not a fixed point of the map");

  Eigen::MatrixXd jac_x(n, n);
  for (int j = 0; j < n; ++j) {
    const double h = oracle.fd_step_rel * (1.0 + std::abs(x_star[static_cast<std::size_t>(j)]));
    auto xp = x_star, xm = x_star;
    xp[static_cast<std::size_t>(j)] += h;
    xm[static_cast<std::size_t>(j)] -= h;
    const auto fp = oracle.map(xp, theta);
    const auto fm = oracle.map(xm, theta);
    for (int i = 0; i < n; ++i)
      jac_x(i, j) = (fp[static_cast<std::size_t>(i)] - fm[static_cast<std::size_t>(i)]) /
                    (2.0 * h);
  }
  // directional derivative in theta along the probe
  double pn = 0.0;
  for (double v : probe) pn = std::max(pn, std::abs(v));
  require(pn > 0.0, "implicit_sensitivity: zero probe direction");
  const double h = oracle.fd_step_rel;
  auto tp = theta, tm = theta;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    tp[j] += h * probe[j];
    tm[j] -= h * probe[j];
  }
  const auto fp = oracle.map(x_star, tp);
  const auto fm = oracle.map(x_star, tm);
  Eigen::VectorXd jtheta(n);
  for (int i = 0; i < n; ++i)
    jtheta(i) = (fp[static_cast<std::size_t>(i)] - fm[static_cast<std::size_t>(i)]) / (2.0 * h);

  const Eigen::MatrixXd sys = Eigen::MatrixXd::Identity(n, n) - jac_x;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.singularValues()(n - 1) <= 1e-8)
    throw DegeneracyError("implicit_sensitivity: I - dT/dx is numerically singular");
  const Eigen::VectorXd v = svd.solve(jtheta);
  return std::vector<double>(v.data(), v.data() + n);
}

// ---------------------------------------------------------------------------
// Equilibrium-aware policy gradient: equilibrium solve, adjoint sensitivity
// solve, projected step onto the governed box [0, log R]^dim, backtracking
// halving on objective increase.
// ---------------------------------------------------------------------------

struct PolicyProblem {
  // x' = T(x, theta); the equilibrium is its fixed point
  std::function<std::vector<double>(const std::vector<double>& x,
                                    const std::vector<double>& theta)>
      reduced_map;
  std::function<double(const std::vector<double>& x)> objective;  // e.g. social cost
  std::vector<double> x0;       // initial loads for the inner solve
  double solve_damping = 0.3;
  double solve_tol = 1e-12;
  int solve_max_iter = 200000;
};

struct PolicyGradOptions {
  double step = 0.5;
  double eps = 1e-7;   // stop when the projected step is below this
  int max_iter = 300;
  double fd_step = 1e-6;
};

struct PolicyGradResult {
  std::vector<double> theta;
  std::vector<double> x;
  double objective = kInf;
  std::vector<std::pair<std::vector<double>, double>> trajectory;  // (theta, J)
  int iterations = 0;
  bool converged = false;
  std::string diagnostics;
};

namespace detail {

inline std::vector<double> solve_fixed_point(const PolicyProblem& prob,
                                             const std::vector<double>& theta,
                                             std::vector<double> x) {
  for (int it = 0; it < prob.solve_max_iter; ++it) {
    const auto tx = prob.reduced_map(x, theta);
    const double delta = linf_diff(tx, x);
    for (std::size_t e = 0; e < x.size(); ++e)
      x[e] = (1.0 - prob.solve_damping) * x[e] + prob.solve_damping * tx[e];
    if (delta <= prob.solve_tol) return x;
  }
  throw DomainError("policy_gradient_optimize: inner equilibrium solve did not converge");
}

}  // namespace detail

inline PolicyGradResult policy_gradient_optimize(const PolicyProblem& prob,
                                                 const std::vector<double>& theta0,
                                                 double log_budget,
                                                 const PolicyGradOptions& opts =
                                                     PolicyGradOptions{}) {
  require(log_budget >= 0.0, "policy_gradient_optimize: log budget must be >= 0");
  PolicyGradResult res;
  std::vector<double> theta = theta0;
  for (double& t : theta) t = clamp(t, 0.0, log_budget);

  auto x = detail::solve_fixed_point(prob, theta, prob.x0);
  double J = prob.objective(x);
  res.trajectory.push_back({theta, J});
  double step = opts.step;

  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    const int n = static_cast<int>(x.size());
    const int d = static_cast<int>(theta.size());
    // Jacobians of the reduced map at (x, theta)
    Eigen::MatrixXd jx(n, n), jt(n, d);
    for (int j = 0; j < n; ++j) {
      const double h = opts.fd_step * (1.0 + std::abs(x[static_cast<std::size_t>(j)]));
      auto xp = x, xm = x;
      xp[static_cast<std::size_t>(j)] += h;
      xm[static_cast<std::size_t>(j)] -= h;
      const auto fp = prob.reduced_map(xp, theta);
      const auto fm = prob.reduced_map(xm, theta);
      for (int i = 0; i < n; ++i)
        jx(i, j) =
            (fp[static_cast<std::size_t>(i)] - fm[static_cast<std::size_t>(i)]) / (2.0 * h);
    }
    for (int j = 0; j < d; ++j) {
      const double h = opts.fd_step * (1.0 + std::abs(theta[static_cast<std::size_t>(j)]));
      auto tp = theta, tm = theta;
      tp[static_cast<std::size_t>(j)] += h;
      tm[static_cast<std::size_t>(j)] -= h;
      const auto fp = prob.reduced_map(x, tp);
      const auto fm = prob.reduced_map(x, tm);
      for (int i = 0; i < n; ++i)
        jt(i, j) =
            (fp[static_cast<std::size_t>(i)] - fm[static_cast<std::size_t>(i)]) / (2.0 * h);
    }
    // objective gradient in x by central differences
    Eigen::VectorXd gx(n);
    for (int j = 0; j < n; ++j) {
      const double h = opts.fd_step * (1.0 + std::abs(x[static_cast<std::size_t>(j)]));
      auto xp = x, xm = x;
      xp[static_cast<std::size_t>(j)] += h;
      xm[static_cast<std::size_t>(j)] -= h;
      gx(j) = (prob.objective(xp) - prob.objective(xm)) / (2.0 * h);
    }
    // adjoint: (I - Jx)^T v = grad_x J, then grad_theta = Jt^T v
    const Eigen::MatrixXd sys = (Eigen::MatrixXd::Identity(n, n) - jx).transpose();
    const Eigen::VectorXd v = sys.partialPivLu().solve(gx);
    const Eigen::VectorXd gtheta = jt.transpose() * v;

    bool accepted = false;
    while (step > 1e-12) {
      auto cand = theta;
      double move = 0.0;
      for (int j = 0; j < d; ++j) {
        cand[static_cast<std::size_t>(j)] =
            clamp(theta[static_cast<std::size_t>(j)] - step * gtheta(j), 0.0, log_budget);
        move = std::max(move,
                        std::abs(cand[static_cast<std::size_t>(j)] -
                                 theta[static_cast<std::size_t>(j)]));
      }
      if (move <= opts.eps) {
        res.converged = true;
        break;
      }
      auto xc = detail::solve_fixed_point(prob, cand, x);
      const double Jc = prob.objective(xc);
      if (Jc < J) {
        theta = std::move(cand);
        x = std::move(xc);
        J = Jc;
        res.trajectory.push_back({theta, J});
        step = std::min(step * 1.5, 10.0);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (res.converged || !accepted) {
      res.converged = res.converged || !accepted;
      break;
    }
  }
  res.theta = theta;
  res.x = x;
  res.objective = J;
  res.iterations = iter;
  return res;
}

// ---------------------------------------------------------------------------
// Welfare-governance frontier on instances with tractable governed design.
// ---------------------------------------------------------------------------

struct FrontierPoint {
  double budget = 1.0;
  double sc = 0.0;
  double required_r = 1.0;
};

inline std::vector<FrontierPoint> governed_frontier_pigou(double beta,
                                                          const std::vector<double>& budgets) {
  std::vector<FrontierPoint> out;
  for (double r : budgets) {
    auto opt = pigou_optimal(beta, r);
    out.push_back({r, opt.sc_star, std::max(opt.r_star, 1.0 / opt.r_star)});
  }
  return out;
}

inline std::vector<FrontierPoint> governed_frontier_parallel(
    const std::vector<LatencyFn>& latencies, double beta, double demand,
    const std::vector<double>& budgets) {
  std::vector<FrontierPoint> out;
  for (double r : budgets) {
    auto res = parallel_design(latencies, beta, r, demand);
    out.push_back({r, res.social_cost, res.required_r});
  }
  return out;
}

}  // namespace fr

#endif  // FR_DESIGN_HPP

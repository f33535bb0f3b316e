#ifndef FR_SUE_HPP
#define FR_SUE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "fr/choice.hpp"
#include "fr/paths.hpp"

namespace fr {

// ---------------------------------------------------------------------------
// Equilibrium results shared by the SUE-family solvers.
// ---------------------------------------------------------------------------

struct EquilibriumResult {
  FlowVector flow;
  std::vector<double> edge_loads;
  double social_cost = 0.0;
  double potential = 0.0;
  double residual = kInf;  // infinity-norm fixed-point residual
  int iterations = 0;
  bool converged = false;
  std::vector<double> potential_trace;  // potential after each accepted iteration
  std::string diagnostics;
};

struct SueOptions {
  double tol = 1e-8;
  int max_iter = 200000;
  double eta_min = 0.05;              // MSA damping floor
  double newton_threshold = 1e-6;     // polish with Newton below this residual
  bool use_newton = true;
  int stall_window = 4000;            // MSA iterations without progress -> mirror descent
  enum class Method { MsaThenMirror, MsaOnly, Mirror };
  Method method = Method::MsaThenMirror;
  std::vector<std::vector<double>> init;  // optional warm start (path flows)
};

namespace detail {

// Potential evaluated in long double so that acceptance tests near the
// minimizer can still observe strict decreases.
inline long double beckmann_integral_ld(const LatencyFn& fn, long double x) {
  using K = LatencyFn::Kind;
  switch (fn.kind) {
    case K::Constant: return static_cast<long double>(fn.b) * x;
    case K::Affine:
      return 0.5L * static_cast<long double>(fn.a) * x * x +
             static_cast<long double>(fn.b) * x;
    case K::Bpr:
      return static_cast<long double>(fn.fft) * x +
             static_cast<long double>(fn.fft) * static_cast<long double>(fn.b) *
                 powl(x / static_cast<long double>(fn.cap), static_cast<long double>(fn.p)) *
                 x / (static_cast<long double>(fn.p) + 1.0L);
    case K::Monomial:
      return powl(x, static_cast<long double>(fn.p) + 1.0L) /
             (static_cast<long double>(fn.p) + 1.0L);
  }
  return 0.0L;
}

inline long double potential_ld(const Network& net, const PathCatalog& catalog,
                                const std::vector<std::vector<double>>& flows,
                                const SaliencePolicy& salience, double beta) {
  std::vector<long double> loads(static_cast<std::size_t>(net.n_edges()), 0.0L);
  for (int k = 0; k < catalog.n_commodities(); ++k)
    for (std::size_t i = 0; i < catalog.paths(k).size(); ++i)
      for (int e : catalog.paths(k)[i])
        loads[static_cast<std::size_t>(e)] +=
            static_cast<long double>(flows[static_cast<std::size_t>(k)][i]);
  long double phi = 0.0L;
  for (int e = 0; e < net.n_edges(); ++e)
    phi += beckmann_integral_ld(net.edge(e).latency, loads[static_cast<std::size_t>(e)]);
  long double ent = 0.0L;
  for (int k = 0; k < catalog.n_commodities(); ++k) {
    const auto& sk = salience.weights(k);
    for (std::size_t i = 0; i < sk.size(); ++i) {
      const long double f =
          static_cast<long double>(flows[static_cast<std::size_t>(k)][i]);
      if (f <= 1e-300L) continue;  // 0 log 0 = 0
      ent += f * (logl(f) - logl(static_cast<long double>(sk[i])));
    }
  }
  return phi + ent / static_cast<long double>(beta);
}

}  // namespace detail

// Phi_s(f): Beckmann integral (closed form per latency kind) plus the entropy
// term (1/beta) * sum f (log f - log s).
inline double potential_value(const Network& net, const PathCatalog& catalog,
                              const std::vector<std::vector<double>>& flows,
                              const SaliencePolicy& salience, double beta) {
  require(beta > 0.0, "potential_value: beta must be positive");
  for (int k = 0; k < catalog.n_commodities(); ++k) {
    double s = 0.0;
    for (double f : flows[static_cast<std::size_t>(k)]) {
      require(f >= 0.0, "potential_value: flows must be nonnegative");
      s += f;
    }
    const double d = net.commodity(k).demand;
    require(std::abs(s - d) <= 1e-9 * std::max(1.0, d),
            "potential_value: infeasible flow (conservation violated)");
  }
  return static_cast<double>(detail::potential_ld(net, catalog, flows, salience, beta));
}

namespace detail {

inline std::vector<std::vector<double>> logit_target(
    const Network& net, const PathCatalog& catalog, const SaliencePolicy& salience,
    double beta, const std::vector<double>& loads) {
  std::vector<std::vector<double>> g(static_cast<std::size_t>(catalog.n_commodities()));
  for (int k = 0; k < catalog.n_commodities(); ++k) {
    const auto& ps = catalog.paths(k);
    std::vector<double> costs(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
      double c = 0.0;
      for (int e : ps[i]) c += net.edge(e).latency(loads[static_cast<std::size_t>(e)]);
      costs[i] = c;
    }
    auto p = salience_logit(costs, salience.weights(k), beta);
    const double d = net.commodity(k).demand;
    for (double& v : p) v *= d;
    g[static_cast<std::size_t>(k)] = std::move(p);
  }
  return g;
}

inline double flow_residual(const std::vector<std::vector<double>>& f,
                            const std::vector<std::vector<double>>& g) {
  double r = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k)
    for (std::size_t i = 0; i < f[k].size(); ++i)
      r = std::max(r, std::abs(f[k][i] - g[k][i]));
  return r;
}

// One Newton step on F(f) = f - G(f) where G is the logit reassignment map.
// Returns true when the step was applied.
inline bool newton_step(const Network& net, const PathCatalog& catalog, double beta,
                        std::vector<std::vector<double>>& flows,
                        const std::vector<std::vector<double>>& target,
                        const std::vector<double>& loads) {
  int n = 0;
  std::vector<int> offset(static_cast<std::size_t>(catalog.n_commodities()) + 1, 0);
  for (int k = 0; k < catalog.n_commodities(); ++k) {
    offset[static_cast<std::size_t>(k) + 1] = n + catalog.n_paths(k);
    n = offset[static_cast<std::size_t>(k) + 1];
  }
  if (n > 4096) return false;  // keep dense solves bounded

  // Edge derivative weights at the current loads.
  std::vector<double> lp(static_cast<std::size_t>(net.n_edges()));
  for (int e = 0; e < net.n_edges(); ++e)
    lp[static_cast<std::size_t>(e)] =
        net.edge(e).latency.derivative(loads[static_cast<std::size_t>(e)]);

  // M[r][q] = sum_{e in r and q} lp_e over all stacked path pairs.
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  {
    std::vector<std::vector<int>> edge_paths(static_cast<std::size_t>(net.n_edges()));
    for (int k = 0; k < catalog.n_commodities(); ++k)
      for (int i = 0; i < catalog.n_paths(k); ++i)
        for (int e : catalog.paths(k)[static_cast<std::size_t>(i)])
          edge_paths[static_cast<std::size_t>(e)].push_back(offset[static_cast<std::size_t>(k)] + i);
    for (int e = 0; e < net.n_edges(); ++e) {
      const double w = lp[static_cast<std::size_t>(e)];
      if (w == 0.0) continue;
      const auto& rows = edge_paths[static_cast<std::size_t>(e)];
      for (int r : rows)
        for (int q : rows) M(r, q) += w;
    }
  }

  // J = I + beta * d_k (diag(sigma) - sigma sigma^T) M, built block-row-wise.
  Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd rhs(n);
  for (int k = 0; k < catalog.n_commodities(); ++k) {
    const double d = net.commodity(k).demand;
    const int o = offset[static_cast<std::size_t>(k)];
    const int nk = catalog.n_paths(k);
    Eigen::VectorXd sigma(nk);
    for (int i = 0; i < nk; ++i) {
      sigma(i) = d > 0.0 ? target[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] / d
                         : 0.0;
      rhs(o + i) = target[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] -
                   flows[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
    }
    if (d <= 0.0) continue;
    const Eigen::MatrixXd Mrows = M.middleRows(o, nk);
    const Eigen::MatrixXd SM =
        sigma.asDiagonal() * Mrows - sigma * (sigma.transpose() * Mrows);
    J.middleRows(o, nk) += beta * d * SM;
  }

  Eigen::VectorXd step = J.partialPivLu().solve(rhs);
  if (!step.allFinite()) return false;

  auto cand = flows;
  for (int k = 0; k < catalog.n_commodities(); ++k) {
    const double d = net.commodity(k).demand;
    const int o = offset[static_cast<std::size_t>(k)];
    double s = 0.0;
    for (int i = 0; i < catalog.n_paths(k); ++i) {
      double v = flows[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] + step(o + i);
      v = std::max(v, 1e-13 * std::max(d, 1.0));
      cand[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = v;
      s += v;
    }
    if (s <= 0.0) return false;
    for (auto& v : cand[static_cast<std::size_t>(k)]) v *= d / s;
  }
  flows = std::move(cand);
  return true;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// SW-SUE solver. Default: damped logit reassignment (MSA schedule
// eta_t = max(eta_min, 1/(t+2))) with backtracking so the potential strictly
// decreases on every accepted iteration, plus a Newton polish once the
// residual is small. Falls back to mirror descent on Phi_s when MSA stalls.
// ---------------------------------------------------------------------------

inline EquilibriumResult swsue_solve(const Network& net, const PathCatalog& catalog,
                                     const SaliencePolicy& salience, double beta,
                                     const SueOptions& opts = SueOptions{}) {
  require(beta > 0.0, "swsue_solve: beta must be positive");
  catalog.validate(net);
  require(salience.n_commodities() == catalog.n_commodities(),
          "swsue_solve: salience/catalog mismatch");

  std::vector<std::vector<double>> f;
  if (!opts.init.empty()) {
    f = opts.init;
  } else {
    f.resize(static_cast<std::size_t>(catalog.n_commodities()));
    for (int k = 0; k < catalog.n_commodities(); ++k)
      f[static_cast<std::size_t>(k)].assign(
          static_cast<std::size_t>(catalog.n_paths(k)),
          net.commodity(k).demand / catalog.n_paths(k));
  }

  EquilibriumResult res;
  long double phi = detail::potential_ld(net, catalog, f, salience, beta);
  res.potential_trace.push_back(static_cast<double>(phi));

  bool mirror_mode = (opts.method == SueOptions::Method::Mirror);
  double best_residual = kInf;
  int last_progress_iter = 0;
  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    auto loads = edge_loads_of(net, catalog, f);
    auto target = detail::logit_target(net, catalog, salience, beta, loads);
    const double residual = detail::flow_residual(f, target);
    res.residual = residual;
    if (residual <= opts.tol) {
      res.converged = true;
      break;
    }
    if (residual < 0.9999 * best_residual) {
      best_residual = residual;
      last_progress_iter = iter;
    } else if (!mirror_mode && opts.method == SueOptions::Method::MsaThenMirror &&
               iter - last_progress_iter > opts.stall_window) {
      mirror_mode = true;  // MSA stalled
      last_progress_iter = iter;
    }

    // Newton polish near the fixed point.
    if (opts.use_newton && residual <= opts.newton_threshold) {
      auto backup = f;
      if (detail::newton_step(net, catalog, beta, f, target, loads)) {
        const long double phi_new = detail::potential_ld(net, catalog, f, salience, beta);
        auto loads2 = edge_loads_of(net, catalog, f);
        auto target2 = detail::logit_target(net, catalog, salience, beta, loads2);
        const double res2 = detail::flow_residual(f, target2);
        if (phi_new < phi && res2 < residual) {
          phi = phi_new;
          res.potential_trace.push_back(static_cast<double>(phi));
          continue;
        }
      }
      f = std::move(backup);
    }

    bool accepted = false;
    if (!mirror_mode) {
      // Damped logit reassignment with adaptive damping.
      double eta = std::max(opts.eta_min, 1.0 / (iter + 2.0));
      while (eta > 1e-16) {
        auto cand = f;
        for (std::size_t k = 0; k < f.size(); ++k)
          for (std::size_t i = 0; i < f[k].size(); ++i)
            cand[k][i] = f[k][i] + eta * (target[k][i] - f[k][i]);
        const long double phi_new = detail::potential_ld(net, catalog, cand, salience, beta);
        if (phi_new < phi) {
          f = std::move(cand);
          phi = phi_new;
          res.potential_trace.push_back(static_cast<double>(phi));
          accepted = true;
          break;
        }
        eta *= 0.5;
      }
    } else {
      // Mirror descent on Phi_s: multiplicative update along the entropy
      // geometry with Armijo backtracking.
      double gamma = 1.0;
      while (gamma > 1e-16) {
        auto cand = f;
        for (int k = 0; k < catalog.n_commodities(); ++k) {
          const auto& ps = catalog.paths(k);
          const auto& sk = salience.weights(k);
          const double d = net.commodity(k).demand;
          std::vector<double> logw(ps.size());
          double wmax = -kInf;
          // interior floor keeps log() finite; the minimizer itself is interior
          const double floor = 1e-9 * std::max(d, 1e-12);
          for (std::size_t i = 0; i < ps.size(); ++i) {
            double cost = 0.0;
            for (int e : ps[i]) cost += net.edge(e).latency(loads[static_cast<std::size_t>(e)]);
            const double fi = std::max(f[static_cast<std::size_t>(k)][i], floor);
            const double grad = cost + (std::log(fi) - std::log(sk[i])) / beta;
            logw[i] = std::log(fi) - gamma * beta * grad;
            wmax = std::max(wmax, logw[i]);
          }
          double z = 0.0;
          for (std::size_t i = 0; i < ps.size(); ++i) {
            cand[static_cast<std::size_t>(k)][i] = std::exp(logw[i] - wmax);
            z += cand[static_cast<std::size_t>(k)][i];
          }
          for (std::size_t i = 0; i < ps.size(); ++i)
            cand[static_cast<std::size_t>(k)][i] *= d / z;
        }
        const long double phi_new = detail::potential_ld(net, catalog, cand, salience, beta);
        if (phi_new < phi) {
          f = std::move(cand);
          phi = phi_new;
          res.potential_trace.push_back(static_cast<double>(phi));
          accepted = true;
          break;
        }
        gamma *= 0.5;
      }
    }

    if (!accepted) {
      // Potential is flat at extended machine precision; take a tiny forced
      // step (not recorded as an accepted iteration) to keep moving.
      for (std::size_t k = 0; k < f.size(); ++k)
        for (std::size_t i = 0; i < f[k].size(); ++i)
          f[k][i] += 1e-3 * (target[k][i] - f[k][i]);
      phi = detail::potential_ld(net, catalog, f, salience, beta);
    }
  }

  res.iterations = iter;
  res.flow = FlowVector::from_path_flows(net, catalog, f);
  res.edge_loads = res.flow.edge_loads;
  res.social_cost = social_cost(net, res.edge_loads);
  res.potential = static_cast<double>(phi);
  if (!res.converged)
    res.diagnostics = "swsue_solve: no convergence after " + std::to_string(iter) +
                      " iterations, residual=" + std::to_string(res.residual);
  return res;
}

// ---------------------------------------------------------------------------
// ICWE / RCWE: Beckmann minimization over type-restricted path flows via
// Frank-Wolfe with exact line search. Types see fixed menus; at the solution
// every used path has minimal latency within its type's menu.
// ---------------------------------------------------------------------------

struct IcweOptions {
  double kkt_tol = 1e-8;
  int max_iter = 100000;
  double used_threshold_rel = 1e-9;  // f > thr * d counts as "used"
};

struct IcweResult {
  std::vector<std::vector<double>> type_flows;  // [type][path in menu]
  std::vector<double> edge_loads;
  double social_cost = 0.0;
  double beckmann = 0.0;
  double kkt_slack = kInf;
  int iterations = 0;
  bool converged = false;
};

inline IcweResult icwe_solve(const Network& net,
                             const std::vector<std::vector<Path>>& typed_path_sets,
                             const std::vector<double>& demands,
                             const IcweOptions& opts = IcweOptions{}) {
  require(typed_path_sets.size() == demands.size(), "icwe_solve: type/demand mismatch");
  const int T = static_cast<int>(typed_path_sets.size());
  for (int i = 0; i < T; ++i) {
    if (typed_path_sets[static_cast<std::size_t>(i)].empty())
      throw InfeasibleError("icwe_solve: type " + std::to_string(i) + " has empty path set");
    require(demands[static_cast<std::size_t>(i)] >= 0.0, "icwe_solve: negative demand");
  }

  std::vector<std::vector<double>> f(static_cast<std::size_t>(T));
  for (int i = 0; i < T; ++i)
    f[static_cast<std::size_t>(i)].assign(
        typed_path_sets[static_cast<std::size_t>(i)].size(),
        demands[static_cast<std::size_t>(i)] /
            static_cast<double>(typed_path_sets[static_cast<std::size_t>(i)].size()));

  const auto loads_of = [&](const std::vector<std::vector<double>>& flows) {
    std::vector<double> x(static_cast<std::size_t>(net.n_edges()), 0.0);
    for (int i = 0; i < T; ++i)
      for (std::size_t j = 0; j < flows[static_cast<std::size_t>(i)].size(); ++j)
        for (int e : typed_path_sets[static_cast<std::size_t>(i)][j])
          x[static_cast<std::size_t>(e)] += flows[static_cast<std::size_t>(i)][j];
    return x;
  };

  IcweResult res;
  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    const auto x = loads_of(f);
    // Per-type path latencies, minima, and the all-or-nothing target.
    auto g = f;
    double slack = 0.0;
    for (int i = 0; i < T; ++i) {
      const auto& menu = typed_path_sets[static_cast<std::size_t>(i)];
      std::vector<double> L(menu.size());
      double lmin = kInf;
      std::size_t best = 0;
      for (std::size_t j = 0; j < menu.size(); ++j) {
        double c = 0.0;
        for (int e : menu[j]) c += net.edge(e).latency(x[static_cast<std::size_t>(e)]);
        L[j] = c;
        if (c < lmin - 1e-15) {
          lmin = c;
          best = j;
        }
      }
      const double thr = opts.used_threshold_rel * std::max(demands[static_cast<std::size_t>(i)], 1.0);
      for (std::size_t j = 0; j < menu.size(); ++j)
        if (f[static_cast<std::size_t>(i)][j] > thr)
          slack = std::max(slack, L[j] - lmin);
      std::fill(g[static_cast<std::size_t>(i)].begin(), g[static_cast<std::size_t>(i)].end(), 0.0);
      g[static_cast<std::size_t>(i)][best] = demands[static_cast<std::size_t>(i)];
    }
    res.kkt_slack = slack;
    if (slack <= opts.kkt_tol) {
      res.converged = true;
      break;
    }

    // Exact line search on gamma in [0,1] along (g - f).
    const auto xg = loads_of(g);
    std::vector<double> delta(x.size());
    for (std::size_t e = 0; e < x.size(); ++e) delta[e] = xg[e] - x[e];
    const auto dphi = [&](double gamma) {
      double s = 0.0;
      for (int e = 0; e < net.n_edges(); ++e) {
        const std::size_t ei = static_cast<std::size_t>(e);
        s += net.edge(e).latency(x[ei] + gamma * delta[ei]) * delta[ei];
      }
      return s;
    };
    double gamma = 1.0;
    if (dphi(0.0) >= 0.0) {
      gamma = 0.0;  // no descent along FW direction
    } else if (dphi(1.0) > 0.0) {
      gamma = bisect(dphi, 0.0, 1.0, 1e-15);
    }
    if (gamma <= 0.0) break;
    for (int i = 0; i < T; ++i)
      for (std::size_t j = 0; j < f[static_cast<std::size_t>(i)].size(); ++j)
        f[static_cast<std::size_t>(i)][j] +=
            gamma * (g[static_cast<std::size_t>(i)][j] - f[static_cast<std::size_t>(i)][j]);
  }

  res.iterations = iter;
  res.type_flows = f;
  res.edge_loads = loads_of(f);
  res.social_cost = social_cost(net, res.edge_loads);
  double beck = 0.0;
  for (int e = 0; e < net.n_edges(); ++e)
    beck += net.edge(e).latency.integral(res.edge_loads[static_cast<std::size_t>(e)]);
  res.beckmann = beck;
  return res;
}

}  // namespace fr

#endif  // FR_SUE_HPP

#ifndef FR_SURROGATE_HPP
#define FR_SURROGATE_HPP

#include <cmath>
#include <string>
#include <vector>

#include "fr/micro.hpp"

namespace fr {

// ---------------------------------------------------------------------------
// TTL / characteristic-time machinery: the cache surrogate where route p is
// "in memory" iff requested within the last T units, with T solving the
// occupancy equation sum_p (1 - exp(-pi_p T)) = B.
// ---------------------------------------------------------------------------

struct TTLState {
  double characteristic_time = 0.0;  // kInf sentinel when the cache is full
  std::vector<double> hit;           // recall probabilities h_p
};

inline TTLState characteristic_time(const std::vector<double>& shares, double budget) {
  require(budget >= 0.0, "characteristic_time: negative budget");
  const std::size_t n = shares.size();
  require(n > 0, "characteristic_time: empty share vector");
  double total = 0.0;
  for (double s : shares) {
    require(s >= 0.0, "characteristic_time: shares must be nonnegative");
    total += s;
  }
  require(std::abs(total - 1.0) <= 1e-8, "characteristic_time: shares must lie on the simplex");

  TTLState out;
  out.hit.assign(n, 0.0);
  if (budget == 0.0) {
    out.characteristic_time = 0.0;
    return out;
  }
  if (budget >= static_cast<double>(n)) {
    out.characteristic_time = kInf;
    out.hit.assign(n, 1.0);
    return out;
  }

  const auto occupancy = [&](double t) {
    double s = 0.0;
    for (double p : shares) s += 1.0 - std::exp(-p * t);
    return s;
  };

  // bracket doubling from 1; 60 doublings without reaching B means the
  // reachable occupancy saturates below B -> treat as a full cache
  double hi = 1.0;
  int doublings = 0;
  while (occupancy(hi) < budget) {
    hi *= 2.0;
    if (++doublings >= 60) {
      out.characteristic_time = kInf;
      out.hit.assign(n, 1.0);
      return out;
    }
  }
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (occupancy(mid) < budget)
      lo = mid;
    else
      hi = mid;
    if (occupancy(0.5 * (lo + hi)) - budget < 1e-10 &&
        budget - occupancy(0.5 * (lo + hi)) < 1e-10)
      break;
  }
  out.characteristic_time = 0.5 * (lo + hi);
  for (std::size_t p = 0; p < n; ++p)
    out.hit[p] = 1.0 - std::exp(-shares[p] * out.characteristic_time);
  return out;
}

// eta = h + (1 - h) rho, elementwise.
inline std::vector<double> ttl_availability(const std::vector<double>& hit,
                                            const std::vector<double>& rho) {
  require(hit.size() == rho.size(), "ttl_availability: size mismatch");
  std::vector<double> eta(hit.size());
  for (std::size_t i = 0; i < hit.size(); ++i) {
    require(hit[i] >= 0.0 && hit[i] <= 1.0, "ttl_availability: h must lie in [0,1]");
    require(rho[i] >= 0.0 && rho[i] <= 1.0, "ttl_availability: rho must lie in [0,1]");
    eta[i] = hit[i] + (1.0 - hit[i]) * rho[i];
  }
  return eta;
}

// ---------------------------------------------------------------------------
// Working-set vs Poisson TTL hit probabilities and the Poissonization gap
//   gap = e^{-pi W} - (1-pi)^W in [0, pi^2 W e^{-pi W} / (1-pi)].
// ---------------------------------------------------------------------------

inline double working_set_hit(double pi, int window) {
  require(pi > 0.0 && pi < 1.0, "working_set_hit: pi must lie in (0,1)");
  require(window >= 0, "working_set_hit: negative window");
  return 1.0 - std::pow(1.0 - pi, window);
}

struct PoissonizationGap {
  double gap = 0.0;
  double bound = 0.0;
};

inline PoissonizationGap poissonization_gap(double pi, int window) {
  require(pi > 0.0 && pi < 1.0, "poissonization_gap: pi must lie in (0,1)");
  require(window >= 0, "poissonization_gap: negative window");
  PoissonizationGap out;
  const double w = static_cast<double>(window);
  out.gap = std::exp(-pi * w) - std::pow(1.0 - pi, window);
  out.bound = pi * pi * w * std::exp(-pi * w) / (1.0 - pi);
  require(out.gap >= -1e-15, "poissonization gap must be nonnegative");
  require(out.gap <= out.bound + 1e-15, "poissonization gap exceeded its bound");
  return out;
}

// ---------------------------------------------------------------------------
// TTL-salience mean-field equilibrium: iterate characteristic time, TTL
// recall, availability, and the availability-weighted logit share update,
// plus a damped load update. Tracks only per-route frequencies.
// ---------------------------------------------------------------------------

struct TTLOptions {
  double tol_x = 1e-10;
  double tol_share = 1e-10;
  int max_iter = 100000;
  bool damp_shares = false;  // literal update rule leaves shares undamped
};

struct TTLResult {
  std::vector<double> edge_loads;
  std::vector<std::vector<double>> shares;        // pi per commodity
  std::vector<std::vector<double>> hit;           // h per commodity
  std::vector<std::vector<double>> availability;  // eta per commodity
  std::vector<double> characteristic_times;       // kInf sentinel possible
  std::vector<double> budgets;
  double beta = 0.0;
  double social_cost = 0.0;
  double residual_x = kInf;
  double residual_share = kInf;
  int iterations = 0;
  bool converged = false;
  std::string diagnostics;
};

inline TTLResult ttl_salience_equilibrium(const Network& net, const PathCatalog& catalog,
                                          const std::vector<MemoryPolicy>& policies,
                                          double beta, double eta_damp = 0.5,
                                          const TTLOptions& opts = TTLOptions{}) {
  catalog.validate(net);
  require(beta > 0.0, "ttl_salience_equilibrium: beta must be positive");
  require(eta_damp > 0.0 && eta_damp <= 1.0, "ttl_salience_equilibrium: damping in (0,1]");
  const int K = catalog.n_commodities();
  require(policies.size() == static_cast<std::size_t>(K), "one policy per commodity");
  for (int k = 0; k < K; ++k) policies[static_cast<std::size_t>(k)].validate(catalog.n_paths(k));

  TTLResult res;
  res.beta = beta;
  res.shares.resize(static_cast<std::size_t>(K));
  res.hit.resize(static_cast<std::size_t>(K));
  res.availability.resize(static_cast<std::size_t>(K));
  res.characteristic_times.assign(static_cast<std::size_t>(K), 0.0);
  res.budgets.resize(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    res.shares[static_cast<std::size_t>(k)].assign(
        static_cast<std::size_t>(catalog.n_paths(k)), 1.0 / catalog.n_paths(k));
    res.budgets[static_cast<std::size_t>(k)] = policies[static_cast<std::size_t>(k)].budget;
  }
  std::vector<double> x(static_cast<std::size_t>(net.n_edges()), 0.0);

  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    double share_delta = 0.0;
    std::vector<std::vector<double>> flows(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
      auto& pi = res.shares[static_cast<std::size_t>(k)];
      const auto& pol = policies[static_cast<std::size_t>(k)];
      auto ttl = characteristic_time(pi, pol.budget);
      auto eta = ttl_availability(ttl.hit, pol.rho);
      std::vector<double> costs(pi.size());
      for (std::size_t p = 0; p < pi.size(); ++p)
        costs[p] = path_latency(net, x, catalog.paths(k)[p]);
      auto next = availability_weighted_logit(costs, eta, beta);
      if (opts.damp_shares)
        for (std::size_t p = 0; p < pi.size(); ++p)
          next[p] = (1.0 - eta_damp) * pi[p] + eta_damp * next[p];
      share_delta = std::max(share_delta, l1_diff(pi, next));
      pi = std::move(next);
      res.hit[static_cast<std::size_t>(k)] = std::move(ttl.hit);
      res.characteristic_times[static_cast<std::size_t>(k)] = ttl.characteristic_time;
      res.availability[static_cast<std::size_t>(k)] = std::move(eta);
      flows[static_cast<std::size_t>(k)] = pi;
      const double d = net.commodity(k).demand;
      for (double& f : flows[static_cast<std::size_t>(k)]) f *= d;
    }
    const auto tx = edge_loads_of(net, catalog, flows);
    const double x_delta = linf_diff(tx, x);
    for (std::size_t e = 0; e < x.size(); ++e)
      x[e] = (1.0 - eta_damp) * x[e] + eta_damp * tx[e];
    res.residual_x = x_delta;
    res.residual_share = share_delta;
    if (x_delta <= opts.tol_x && share_delta <= opts.tol_share) {
      res.converged = true;
      break;
    }
  }
  res.iterations = iter;
  res.edge_loads = x;
  res.social_cost = social_cost(net, x);
  if (!res.converged)
    res.diagnostics = "ttl_salience_equilibrium: residual_x=" + std::to_string(res.residual_x) +
                      " residual_share=" + std::to_string(res.residual_share) + " after " +
                      std::to_string(iter) + " iterations";
  return res;
}

// ---------------------------------------------------------------------------
// Micro-vs-surrogate error report. The theoretical combined rate
// e^{beta (Lmax - Lmin)} / B + sqrt(log B / B) is reported for reference,
// never asserted.
// ---------------------------------------------------------------------------

struct BridgeErrorReport {
  double share_l1 = 0.0;
  double hit_l1 = 0.0;
  double sc_rel_gap = 0.0;
  double wmax_over_mu = 0.0;
  double cv2_bound = 0.0;
  double theory_rate = 0.0;
};

inline BridgeErrorReport bridge_error(const Network& net, const PathCatalog& catalog,
                                      const MicroEstimates& micro, const TTLResult& ttl) {
  BridgeErrorReport rep;
  const int K = catalog.n_commodities();
  require(static_cast<int>(micro.path_shares.size()) == K &&
              static_cast<int>(ttl.shares.size()) == K,
          "bridge_error: commodity count mismatch");
  double wmax_over_mu = 0.0;
  double theory = 0.0;
  for (int k = 0; k < K; ++k) {
    const auto& ms = micro.path_shares[static_cast<std::size_t>(k)];
    const auto& ts = ttl.shares[static_cast<std::size_t>(k)];
    require(ms.size() == ts.size(), "bridge_error: path count mismatch");
    rep.share_l1 += l1_diff(ms, ts);
    rep.hit_l1 += l1_diff(micro.recall_freq[static_cast<std::size_t>(k)],
                          ttl.hit[static_cast<std::size_t>(k)]);
    // menu-size proxy and cv(Z)^2 bound at the surrogate solution
    double wmax = 0.0, wmin = kInf, mu = 0.0;
    for (std::size_t p = 0; p < ts.size(); ++p) {
      const double L = path_latency(net, ttl.edge_loads, catalog.paths(k)[p]);
      const double w = std::exp(-ttl.beta * L);
      wmax = std::max(wmax, w);
      wmin = std::min(wmin, w);
      mu += ttl.availability[static_cast<std::size_t>(k)][p] * w;
    }
    if (mu > 0.0) wmax_over_mu = std::max(wmax_over_mu, wmax / mu);
    const double B = ttl.budgets[static_cast<std::size_t>(k)];
    if (B >= 1.0 && wmin > 0.0)
      theory = std::max(theory, (wmax / wmin) / B + std::sqrt(std::log(std::max(B, 2.0)) / B));
  }
  rep.wmax_over_mu = wmax_over_mu;
  rep.cv2_bound = wmax_over_mu;  // Var(Z) <= wmax mu under independent availability
  rep.theory_rate = theory;
  rep.sc_rel_gap = micro.social_cost != 0.0
                       ? (ttl.social_cost - micro.social_cost) / micro.social_cost
                       : 0.0;
  return rep;
}

}  // namespace fr

#endif  // FR_SURROGATE_HPP

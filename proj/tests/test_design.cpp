#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fr/design.hpp"
#include "fr/instances.hpp"

using namespace fr;

TEST_CASE("inverse_salience on Pigou yields the optimal ratio") {
  auto pig = make_pigou();
  auto s = inverse_salience(pig.net, pig.catalog, {{0.5, 0.5}}, 5.0);
  // s_b / s_a = exp(-2.5)
  CHECK(s.weights(0)[1] / s.weights(0)[0] == Catch::Approx(std::exp(-2.5)).epsilon(1e-10));

  // boundary target errors, epsilon-perturbation fixes it
  CHECK_THROWS_AS(inverse_salience(pig.net, pig.catalog, {{1.0, 0.0}}, 5.0), DomainError);
  auto s2 = inverse_salience(pig.net, pig.catalog, {{1.0, 0.0}}, 5.0, 1e-3);
  CHECK(s2.weights(0)[0] > 0.0);
}

TEST_CASE("inverse_salience symmetry: uniform costs and target give uniform weights") {
  auto sym = make_parallel({LatencyFn::affine(1.0, 0.2), LatencyFn::affine(1.0, 0.2),
                            LatencyFn::affine(1.0, 0.2)});
  auto s = inverse_salience(sym.net, sym.catalog, {{1.0 / 3, 1.0 / 3, 1.0 / 3}}, 3.0);
  for (double w : s.weights(0)) CHECK(w == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("inverse_salience round trip on random interior targets") {
  RngStream rng(2024, 0, 0);
  auto braess = make_braess();
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> f(3);
    double s = 0.0;
    for (double& v : f) {
      v = 0.05 + rng.next_double();
      s += v;
    }
    for (double& v : f) v /= s;
    auto sal = inverse_salience(braess.net, braess.catalog, {f}, 3.0);
    auto eq = swsue_solve(braess.net, braess.catalog, sal, 3.0);
    REQUIRE(eq.converged);
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(eq.flow.path_flows[0][i] == Catch::Approx(f[i]).margin(1e-6));
  }
}

TEST_CASE("implementability_report: budgets, R_min, and the flip point") {
  auto pig = make_pigou();
  GovernanceSpec gov;
  gov.ratio_budgets = {13.0};
  auto rep = implementability_report(pig.net, pig.catalog, {{0.5, 0.5}}, 5.0, gov);
  CHECK(rep.r_min[0] == Catch::Approx(std::exp(2.5)).epsilon(1e-9));
  CHECK(rep.feasible_ratio_all);
  CHECK(rep.feasible_governed);

  // feasibility flips exactly at R_min (1 +- 1e-6)
  GovernanceSpec above, below;
  above.ratio_budgets = {rep.r_min[0] * (1.0 + 1e-6)};
  below.ratio_budgets = {rep.r_min[0] * (1.0 - 1e-6)};
  above.tol = 0.0;
  below.tol = 0.0;
  CHECK(implementability_report(pig.net, pig.catalog, {{0.5, 0.5}}, 5.0, above)
            .feasible_ratio_all);
  CHECK_FALSE(implementability_report(pig.net, pig.catalog, {{0.5, 0.5}}, 5.0, below)
                  .feasible_ratio_all);

  // uniform target with uniform costs requires no influence
  auto sym = make_parallel({LatencyFn::constant(1.0), LatencyFn::constant(1.0)});
  GovernanceSpec unit;
  unit.ratio_budgets = {1.0};
  auto rep2 = implementability_report(sym.net, sym.catalog, {{0.5, 0.5}}, 5.0, unit);
  CHECK(rep2.r_min[0] == Catch::Approx(1.0).margin(1e-12));
  CHECK(rep2.feasible_ratio_all);

  CHECK_THROWS_AS(implementability_report(pig.net, pig.catalog, {{1.0, 0.0}}, 5.0, gov),
                  DomainError);
}

TEST_CASE("group-blind tying is infeasible for unequal target shares") {
  // two groups over the same two parallel routes with identical latencies
  Network net(2, {Edge{0, 1, LatencyFn::affine(1.0, 0.0)}, Edge{0, 1, LatencyFn::constant(1.0)}},
              {Commodity{0, 1, 0.6}, Commodity{0, 1, 0.4}});
  PathCatalog cat({{Path{0}, Path{1}}, {Path{0}, Path{1}}});

  // group-blind: u_{k,p} = theta_p for both groups
  Eigen::MatrixXd A(4, 2);
  A << 1, 0, 0, 1, 1, 0, 0, 1;
  GovernanceSpec gov;
  gov.tying_matrix = A;

  // identical shares are implementable under tying
  auto same = implementability_report(net, cat, {{0.3, 0.3}, {0.2, 0.2}}, 2.0, gov);
  CHECK(same.feasible_tied);
  CHECK(same.tying_residual <= 1e-8);

  // different shares are not
  auto diff = implementability_report(net, cat, {{0.45, 0.15}, {0.1, 0.3}}, 2.0, gov);
  CHECK_FALSE(diff.feasible_tied);
  CHECK(diff.tying_residual > 1e-3);
}

TEST_CASE("range invariance: adding a constant latency leaves R_min unchanged") {
  auto base = make_parallel({LatencyFn::affine(1.0, 0.1), LatencyFn::affine(0.5, 0.3),
                             LatencyFn::affine(2.0, 0.05)});
  auto shifted = make_parallel({LatencyFn::affine(1.0, 2.1), LatencyFn::affine(0.5, 2.3),
                                LatencyFn::affine(2.0, 2.05)});
  std::vector<double> f{0.2, 0.5, 0.3};
  auto r1 = implementability_report(base.net, base.catalog, {f}, 2.0);
  auto r2 = implementability_report(shifted.net, shifted.catalog, {f}, 2.0);
  CHECK(r1.r_min[0] == Catch::Approx(r2.r_min[0]).margin(1e-9));
}

TEST_CASE("pigou_optimal closed form") {
  auto at_budget = pigou_optimal(5.0, std::exp(2.5));
  CHECK(at_budget.f_star == Catch::Approx(0.5).margin(1e-9));
  CHECK(at_budget.r_star == Catch::Approx(std::exp(-2.5)).margin(1e-9));
  CHECK(at_budget.sc_star == Catch::Approx(0.75).margin(1e-9));

  auto unconstrained = pigou_optimal(5.0, kInf);
  CHECK(unconstrained.f_star == Catch::Approx(0.5).margin(1e-12));
  CHECK(unconstrained.sc_star == Catch::Approx(0.75).margin(1e-12));

  // R = 1: r* = 1 and f* is the root of r(f) = 1 (bisection oracle)
  auto pinned = pigou_optimal(5.0, 1.0);
  const double root = bisect(
      [&](double f) { return std::log(f / (1.0 - f)) + 5.0 * (f - 1.0); }, 1e-12,
      1.0 - 1e-12, 1e-15);
  CHECK(pinned.r_star == Catch::Approx(1.0).margin(1e-9));
  CHECK(pinned.f_star == Catch::Approx(root).margin(1e-9));
  CHECK(pinned.sc_star == Catch::Approx(1.0 - root + root * root).margin(1e-9));
}

TEST_CASE("pigou ratio map is strictly increasing") {
  for (double beta : {0.1, 1.0, 5.0, 10.0}) {
    double prev = -kInf;
    for (int i = 1; i <= 999; ++i) {
      const double f = i / 1000.0;
      if (f < 0.001 || f > 0.999) continue;
      const double r = pigou_ratio_of_split(f, beta);
      CHECK(r > prev);
      prev = r;
    }
  }
}

namespace {

// Independent oracle for the parallel design inner/outer problem: dense t
// grid with a projected-gradient inner solver (different algorithm from the
// production multiplier bisection).
double parallel_design_oracle(const std::vector<LatencyFn>& lat, double beta, double budget,
                              double demand) {
  detail::ParallelWork w{lat, beta, demand};
  const std::size_t m = lat.size();
  const double log_r = std::log(budget);
  double t_lo = kInf, t_hi = -kInf;
  for (std::size_t i = 0; i < m; ++i) {
    t_lo = std::min(t_lo, w.g(i, 1e-9 * demand));
    t_hi = std::max(t_hi, w.g(i, demand));
  }
  const auto project = [&](std::vector<double> v, const std::vector<double>& lo,
                           const std::vector<double>& up) {
    // projection onto {sum f = demand, lo <= f <= up} via shift bisection
    double tau_lo = -1e3, tau_hi = 1e3;
    for (int it = 0; it < 200; ++it) {
      const double tau = 0.5 * (tau_lo + tau_hi);
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += clamp(v[i] - tau, lo[i], up[i]);
      if (s > demand)
        tau_lo = tau;
      else
        tau_hi = tau;
    }
    const double tau = 0.5 * (tau_lo + tau_hi);
    for (std::size_t i = 0; i < m; ++i) v[i] = clamp(v[i] - tau, lo[i], up[i]);
    return v;
  };
  double best = kInf;
  const int grid = 1500;
  for (int gi = 0; gi <= grid; ++gi) {
    const double t = t_lo + (t_hi - t_lo) * gi / grid;
    std::vector<double> lo(m), up(m);
    double lo_sum = 0.0, up_sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      lo[i] = w.g_inv(i, t);
      up[i] = w.g_inv(i, t + log_r);
      lo_sum += lo[i];
      up_sum += up[i];
    }
    if (lo_sum > demand || up_sum < demand) continue;
    std::vector<double> f(m, demand / m);
    f = project(f, lo, up);
    for (int it = 0; it < 3000; ++it) {
      std::vector<double> g(m);
      for (std::size_t i = 0; i < m; ++i) g[i] = f[i] - 0.05 * w.marginal(i, f[i]);
      f = project(g, lo, up);
    }
    best = std::min(best, w.sc(f));
  }
  return best;
}

}  // namespace

TEST_CASE("parallel_design basics and the Pigou cross-check") {
  // identical routes split evenly at any budget
  auto even = parallel_design({LatencyFn::affine(1.0, 0.1), LatencyFn::affine(1.0, 0.1)},
                              3.0, 2.0, 1.0);
  CHECK(even.flows[0] == Catch::Approx(0.5).margin(1e-6));

  // Pigou latencies: matches the closed form once R >= exp(beta/2)
  const std::vector<LatencyFn> pigou_lat{LatencyFn::constant(1.0), LatencyFn::monomial(1.0)};
  auto wide = parallel_design(pigou_lat, 5.0, 13.0, 1.0);
  CHECK(wide.social_cost == Catch::Approx(0.75).margin(1e-5));
  auto tight = parallel_design(pigou_lat, 5.0, std::exp(2.5), 1.0);
  CHECK(tight.social_cost == Catch::Approx(0.75).margin(1e-4));
  // pinched budget: worse than the system optimum, matching pigou_optimal
  auto narrow = parallel_design(pigou_lat, 5.0, 2.0, 1.0);
  auto oracle = pigou_optimal(5.0, 2.0);
  CHECK(narrow.social_cost == Catch::Approx(oracle.sc_star).margin(1e-4));
}

TEST_CASE("parallel_design with an unbounded budget reaches the system optimum") {
  const std::vector<LatencyFn> pigou_lat{LatencyFn::constant(1.0), LatencyFn::monomial(1.0)};
  auto res = parallel_design(pigou_lat, 5.0, kInf, 1.0);
  CHECK(res.social_cost == Catch::Approx(0.75).margin(1e-5));
}

TEST_CASE("parallel_design matches an independent grid+projection oracle") {
  auto lat = random_affine_latencies(5, 909);
  for (double budget : {1.5, 3.0}) {
    auto got = parallel_design(lat, 5.0, budget, 1.0);
    const double oracle = parallel_design_oracle(lat, 5.0, budget, 1.0);
    CHECK(got.social_cost == Catch::Approx(oracle).margin(1e-3));
    CHECK(got.required_r <= budget * (1.0 + 1e-6));
  }
}

TEST_CASE("parallel_design satisfies clipped marginal-cost equalization") {
  auto lat = random_affine_latencies(5, 911);
  const double budget = 2.0;
  auto res = parallel_design(lat, 4.0, budget, 1.0);
  detail::ParallelWork w{lat, 4.0, 1.0};
  // classify routes against the band [t*, t* + log R]
  const double log_r = std::log(budget);
  std::vector<double> m_interior;
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const double gi = w.g(i, res.flows[i]);
    const bool at_lower = std::abs(gi - res.t_star) <= 1e-4;
    const bool at_upper = std::abs(gi - (res.t_star + log_r)) <= 1e-4;
    if (!at_lower && !at_upper) m_interior.push_back(w.marginal(i, res.flows[i]));
  }
  REQUIRE(m_interior.size() >= 1);
  const double lambda = m_interior.front();
  for (double mi : m_interior) CHECK(mi == Catch::Approx(lambda).margin(1e-5));
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const double gi = w.g(i, res.flows[i]);
    const double mi = w.marginal(i, res.flows[i]);
    if (std::abs(gi - res.t_star) <= 1e-4) CHECK(mi >= lambda - 1e-5);
    if (std::abs(gi - (res.t_star + log_r)) <= 1e-4) CHECK(mi <= lambda + 1e-5);
  }
}

TEST_CASE("sp_tied_inverse on single parallel nodes") {
  // symmetric node, even target -> delta = 0
  auto tree = parse_sp_expression("P(e0,e1)");
  std::vector<LatencyFn> sym{LatencyFn::affine(1.0, 0.2), LatencyFn::affine(1.0, 0.2)};
  auto net = sp_build_network(tree, sym, 1.0);
  auto res = sp_tied_inverse(tree, net, {0.5, 0.5}, 3.0);
  CHECK(res.delta[0] == Catch::Approx(0.0).margin(1e-12));

  // Pigou target (0.5, 0.5): |delta| = 2.5 = log R_min
  std::vector<LatencyFn> pig{LatencyFn::constant(1.0), LatencyFn::monomial(1.0)};
  auto pnet = sp_build_network(tree, pig, 1.0);
  auto pres = sp_tied_inverse(tree, pnet, {0.5, 0.5}, 5.0);
  CHECK(std::abs(pres.delta[0]) == Catch::Approx(2.5).margin(1e-12));
  CHECK(pres.round_trip_error <= 1e-12);

  // local budget flags
  auto ok = sp_tied_inverse(tree, pnet, {0.5, 0.5}, 5.0, {std::exp(2.5)});
  CHECK(ok.all_feasible);
  auto tight = sp_tied_inverse(tree, pnet, {0.5, 0.5}, 5.0, {std::exp(2.4)});
  CHECK_FALSE(tight.all_feasible);

  CHECK_THROWS_AS(sp_tied_inverse(tree, pnet, {1.0, 0.0}, 5.0), DomainError);
}

TEST_CASE("sp_tied_inverse round trip on a 3-gadget chain") {
  RngStream rng(33, 0, 0);
  const int k = 3;
  auto chain = make_diamond_chain(k, random_affine_latencies(2 * k, 501));
  for (int rep = 0; rep < 5; ++rep) {
    // random interior split per gadget
    std::vector<double> loads(static_cast<std::size_t>(2 * k));
    for (int g = 0; g < k; ++g) {
      const double y = 0.1 + 0.8 * rng.next_double();
      loads[static_cast<std::size_t>(2 * g)] = y;
      loads[static_cast<std::size_t>(2 * g + 1)] = 1.0 - y;
    }
    auto res = sp_tied_inverse(chain.tree, chain.net, loads, 2.0);
    CHECK(res.round_trip_error <= 1e-8);
  }
}

TEST_CASE("sp_tied_inverse on a nested tree feeds back through sp_partition") {
  auto tree = parse_sp_expression("P(S(e0,P(e1,e2)),e3)");
  std::vector<LatencyFn> lat{LatencyFn::affine(0.8, 0.1), LatencyFn::affine(1.2, 0.2),
                             LatencyFn::affine(0.5, 0.35), LatencyFn::affine(1.0, 0.3)};
  auto net = sp_build_network(tree, lat, 1.0);
  // consistent interior target: outer split 0.6/0.4, inner split 0.25/0.35
  const std::vector<double> target{0.6, 0.25, 0.35, 0.4};
  const double beta = 2.0;
  auto inv = sp_tied_inverse(tree, net, target, beta);
  REQUIRE(inv.parallel_nodes.size() == 2);
  CHECK(inv.round_trip_error <= 1e-8);

  // independent route: install the biases on the tree and let the Gibbs
  // marginals at the target loads reproduce the target edge flows
  SpTree biased = tree;
  for (std::size_t s = 0; s < inv.parallel_nodes.size(); ++s)
    biased.nodes[static_cast<std::size_t>(inv.parallel_nodes[s])].delta = inv.delta[s];
  std::vector<double> costs(4);
  for (int e = 0; e < 4; ++e)
    costs[static_cast<std::size_t>(e)] =
        net.edge(e).latency(target[static_cast<std::size_t>(e)]);
  auto gibbs = sp_partition(biased, costs, beta, /*use_delta=*/true);
  for (int e = 0; e < 4; ++e)
    CHECK(gibbs.edge_marginal[static_cast<std::size_t>(e)] ==
          Catch::Approx(target[static_cast<std::size_t>(e)]).margin(1e-10));
}

TEST_CASE("implicit_sensitivity closed forms") {
  // T independent of x: derivative equals dT/dtheta . probe
  ImplicitMap constant_map;
  constant_map.map = [](const std::vector<double>& /*x*/, const std::vector<double>& th) {
    return std::vector<double>{3.0 * th[0]};
  };
  auto d0 = implicit_sensitivity(constant_map, {3.0}, {1.0}, {1.0});
  CHECK(d0[0] == Catch::Approx(3.0).margin(1e-6));

  // scalar toy: T = 0.5 x + theta -> x* = 2 theta, dx*/dtheta = 2
  ImplicitMap toy;
  toy.map = [](const std::vector<double>& x, const std::vector<double>& th) {
    return std::vector<double>{0.5 * x[0] + th[0]};
  };
  auto d1 = implicit_sensitivity(toy, {2.0}, {1.0}, {1.0});
  CHECK(d1[0] == Catch::Approx(2.0).margin(1e-8));

  // degenerate: T = x exactly
  ImplicitMap identity;
  identity.map = [](const std::vector<double>& x, const std::vector<double>&) { return x; };
  CHECK_THROWS_AS(implicit_sensitivity(identity, {1.0}, {0.0}, {1.0}), DegeneracyError);
}

namespace {

// Pigou reduced map: loads -> demand * salience-logit at theta = log-salience.
std::vector<double> pigou_reduced_map(const std::vector<double>& x,
                                      const std::vector<double>& theta, double beta) {
  const double la = 1.0, lb = x[1];
  std::vector<double> s{std::exp(theta[0]), std::exp(theta[1])};
  auto p = salience_logit({la, lb}, s, beta);
  return {p[0], p[1]};
}

}  // namespace

TEST_CASE("implicit_sensitivity matches finite differences on the Pigou map") {
  const double beta = 5.0;
  ImplicitMap oracle;
  oracle.map = [&](const std::vector<double>& x, const std::vector<double>& th) {
    return pigou_reduced_map(x, th, beta);
  };
  // solve the fixed point at theta = (0, -1)
  std::vector<double> theta{0.0, -1.0};
  std::vector<double> x{0.5, 0.5};
  for (int it = 0; it < 20000; ++it) {
    auto tx = oracle.map(x, theta);
    for (int i = 0; i < 2; ++i) x[static_cast<std::size_t>(i)] =
        0.7 * x[static_cast<std::size_t>(i)] + 0.3 * tx[static_cast<std::size_t>(i)];
  }
  const std::vector<double> probe{0.0, 1.0};
  auto grad = implicit_sensitivity(oracle, x, theta, probe);

  // central finite difference of the resolved equilibrium
  const double h = 1e-5;
  auto solve_at = [&](double t1) {
    std::vector<double> th{0.0, t1};
    std::vector<double> z{0.5, 0.5};
    for (int it = 0; it < 60000; ++it) {
      auto tz = oracle.map(z, th);
      for (int i = 0; i < 2; ++i) z[static_cast<std::size_t>(i)] =
          0.7 * z[static_cast<std::size_t>(i)] + 0.3 * tz[static_cast<std::size_t>(i)];
    }
    return z;
  };
  auto zp = solve_at(theta[1] + h);
  auto zm = solve_at(theta[1] - h);
  for (int i = 0; i < 2; ++i) {
    const double fd = (zp[static_cast<std::size_t>(i)] - zm[static_cast<std::size_t>(i)]) /
                      (2.0 * h);
    CHECK(grad[static_cast<std::size_t>(i)] ==
          Catch::Approx(fd).epsilon(1e-4).margin(1e-8));
  }
}

TEST_CASE("policy gradient recovers the optimal Pigou ratio") {
  const double beta = 5.0;
  PolicyProblem prob;
  prob.reduced_map = [&](const std::vector<double>& x, const std::vector<double>& th) {
    return pigou_reduced_map(x, th, beta);
  };
  prob.objective = [](const std::vector<double>& x) {
    return x[0] * 1.0 + x[1] * x[1];  // Pigou social cost
  };
  prob.x0 = {0.5, 0.5};
  auto res = policy_gradient_optimize(prob, {1.0, 1.0}, 2.5);
  CHECK(res.objective == Catch::Approx(0.75).margin(1e-4));
  const double ratio = std::exp(res.theta[1] - res.theta[0]);
  CHECK(ratio == Catch::Approx(std::exp(-2.5)).epsilon(2e-2));
  // trajectory objective is monotone decreasing
  for (std::size_t i = 0; i + 1 < res.trajectory.size(); ++i)
    CHECK(res.trajectory[i + 1].second < res.trajectory[i].second);
}

TEST_CASE("policy gradient stops immediately on a constant objective") {
  PolicyProblem prob;
  prob.reduced_map = [](const std::vector<double>& x, const std::vector<double>&) {
    return std::vector<double>(x.size(), 0.25);
  };
  prob.objective = [](const std::vector<double>&) { return 42.0; };
  prob.x0 = {0.25, 0.25};
  auto res = policy_gradient_optimize(prob, {0.5, 0.5}, 1.0);
  CHECK(res.converged);
  CHECK(res.iterations <= 1);
  CHECK(res.objective == 42.0);
}

TEST_CASE("policy gradient agrees with parallel_design on the 5-route instance") {
  auto inst = make_parallel5();
  const double beta = 5.0;
  const double budget = 2.0;
  std::vector<LatencyFn> lat;
  for (const auto& e : inst.net.edges()) lat.push_back(e.latency);

  PolicyProblem prob;
  prob.reduced_map = [&](const std::vector<double>& x, const std::vector<double>& th) {
    std::vector<double> costs(5), s(5);
    for (int i = 0; i < 5; ++i) {
      costs[static_cast<std::size_t>(i)] = lat[static_cast<std::size_t>(i)](x[static_cast<std::size_t>(i)]);
      s[static_cast<std::size_t>(i)] = std::exp(th[static_cast<std::size_t>(i)]);
    }
    auto p = salience_logit(costs, s, beta);
    return std::vector<double>(p.begin(), p.end());
  };
  prob.objective = [&](const std::vector<double>& x) {
    double sc = 0.0;
    for (int i = 0; i < 5; ++i)
      sc += x[static_cast<std::size_t>(i)] * lat[static_cast<std::size_t>(i)](x[static_cast<std::size_t>(i)]);
    return sc;
  };
  prob.x0.assign(5, 0.2);
  auto pg = policy_gradient_optimize(prob, std::vector<double>(5, 0.3), std::log(budget));
  auto direct = parallel_design(lat, beta, budget, 1.0);
  CHECK(pg.objective == Catch::Approx(direct.social_cost).margin(1e-3));
}

TEST_CASE("governed frontier: Pigou budgets sweep") {
  const double beta = 5.0;
  const std::vector<double> budgets{1.0, std::exp(1.25), std::exp(2.5), 10.0 * std::exp(2.5)};
  auto frontier = governed_frontier_pigou(beta, budgets);
  REQUIRE(frontier.size() == 4);
  // decreasing then flat at 0.75 from R = exp(2.5)
  CHECK(frontier[0].sc > frontier[1].sc);
  CHECK(frontier[1].sc > frontier[2].sc);
  CHECK(frontier[2].sc == Catch::Approx(0.75).margin(1e-9));
  CHECK(frontier[3].sc == Catch::Approx(0.75).margin(1e-9));
  CHECK(frontier[3].required_r == Catch::Approx(std::exp(2.5)).epsilon(1e-9));

  // R=1 equals the uniform-salience SUE cost
  auto pig = make_pigou();
  auto sue = swsue_solve(pig.net, pig.catalog, SaliencePolicy::uniform({2}), beta);
  CHECK(frontier[0].sc == Catch::Approx(sue.social_cost).margin(1e-6));
}

TEST_CASE("governed frontier on the 5-route instance is monotone with a plateau") {
  auto inst = make_parallel5();
  std::vector<LatencyFn> lat;
  for (const auto& e : inst.net.edges()) lat.push_back(e.latency);
  const std::vector<double> budgets{1.0, 1.5, 2.0, 3.0, 5.0, 10.0, 50.0};
  auto frontier = governed_frontier_parallel(lat, 5.0, 1.0, budgets);
  for (std::size_t i = 0; i + 1 < frontier.size(); ++i)
    CHECK(frontier[i + 1].sc <= frontier[i].sc + 1e-6);
  // plateau: once R exceeds the largest required budget the frontier is flat
  double max_required = 0.0;
  for (const auto& p : frontier) max_required = std::max(max_required, p.required_r);
  const double flat = frontier.back().sc;
  for (const auto& p : frontier)
    if (p.budget >= max_required * (1.0 + 1e-9))
      CHECK(p.sc == Catch::Approx(flat).margin(1e-5));
}

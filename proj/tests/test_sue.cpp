#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fr/instances.hpp"
#include "fr/sue.hpp"

using namespace fr;

// Pigou equilibrium ratio map r(f_b) = f_b/(1-f_b) * exp(beta*(f_b-1)),
// strictly increasing; used as an independent scalar oracle.
static double pigou_fb_of_ratio(double r, double beta) {
  return bisect(
      [&](double f) { return std::log(f / (1.0 - f)) + beta * (f - 1.0) - std::log(r); },
      1e-12, 1.0 - 1e-12, 1e-15);
}

TEST_CASE("swsue on Pigou with the optimal salience ratio") {
  auto pig = make_pigou();
  SaliencePolicy s({{1.0, std::exp(-2.5)}});
  auto res = swsue_solve(pig.net, pig.catalog, s, 5.0);
  REQUIRE(res.converged);
  CHECK(res.flow.path_flows[0][1] == Catch::Approx(0.5).margin(1e-8));
  CHECK(res.social_cost == Catch::Approx(0.75).margin(1e-8));
  CHECK(res.residual <= 1e-8);
}

TEST_CASE("swsue beta -> 0 limit is salience-proportional") {
  auto pig = make_pigou();
  SaliencePolicy s({{1.0, 3.0}});
  auto res = swsue_solve(pig.net, pig.catalog, s, 1e-6);
  REQUIRE(res.converged);
  CHECK(res.flow.path_flows[0][0] == Catch::Approx(0.25).margin(1e-5));
  CHECK(res.flow.path_flows[0][1] == Catch::Approx(0.75).margin(1e-5));
}

TEST_CASE("swsue uniform salience matches the scalar bisection oracle") {
  auto pig = make_pigou();
  SaliencePolicy s = SaliencePolicy::uniform({2});
  auto res = swsue_solve(pig.net, pig.catalog, s, 5.0);
  REQUIRE(res.converged);
  const double oracle = pigou_fb_of_ratio(1.0, 5.0);
  CHECK(res.flow.path_flows[0][1] == Catch::Approx(oracle).margin(1e-7));
}

TEST_CASE("swsue fixed-point residual and reassignment consistency") {
  auto braess = make_braess();
  SaliencePolicy s({{1.0, 0.7, 1.8}});
  auto res = swsue_solve(braess.net, braess.catalog, s, 4.0);
  REQUIRE(res.converged);
  // recomputing d * Pr(.|x(f*); s) reproduces f*
  std::vector<double> costs(3);
  for (int i = 0; i < 3; ++i)
    costs[static_cast<std::size_t>(i)] =
        path_latency(braess.net, res.edge_loads, braess.catalog.paths(0)[static_cast<std::size_t>(i)]);
  auto p = salience_logit(costs, s.weights(0), 4.0);
  for (int i = 0; i < 3; ++i)
    CHECK(res.flow.path_flows[0][static_cast<std::size_t>(i)] ==
          Catch::Approx(p[static_cast<std::size_t>(i)]).margin(1e-8));
}

TEST_CASE("swsue uniqueness probe and monotone potential") {
  RngStream rng(55, 0, 0);
  for (int rep = 0; rep < 5; ++rep) {
    auto inst = make_parallel(random_affine_latencies(4, 100 + rep));
    std::vector<double> w(4);
    for (double& v : w) v = 0.2 + rng.next_double();
    SaliencePolicy s({w});
    const double beta = 1.0 + 4.0 * rng.next_double();

    SueOptions o1, o2;
    o2.init = {{0.97, 0.01, 0.01, 0.01}};
    auto r1 = swsue_solve(inst.net, inst.catalog, s, beta, o1);
    auto r2 = swsue_solve(inst.net, inst.catalog, s, beta, o2);
    REQUIRE(r1.converged);
    REQUIRE(r2.converged);
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(r1.flow.path_flows[0][i] == Catch::Approx(r2.flow.path_flows[0][i]).margin(1e-6));

    for (std::size_t i = 0; i + 1 < r1.potential_trace.size(); ++i)
      CHECK(r1.potential_trace[i + 1] < r1.potential_trace[i]);
  }
}

TEST_CASE("swsue handles multiple commodities sharing edges") {
  // two OD pairs over the same two parallel edges, different demands
  Network net(2, {Edge{0, 1, LatencyFn::affine(1.0, 0.0)}, Edge{0, 1, LatencyFn::constant(1.0)}},
              {Commodity{0, 1, 0.7}, Commodity{0, 1, 0.3}});
  PathCatalog cat({{Path{0}, Path{1}}, {Path{0}, Path{1}}});
  SaliencePolicy s({{1.0, 1.0}, {2.0, 1.0}});
  auto res = swsue_solve(net, cat, s, 3.0);
  REQUIRE(res.converged);
  res.flow.check_conservation(net);
  CHECK(res.residual <= 1e-8);
  // loads aggregate both commodities
  CHECK(res.edge_loads[0] + res.edge_loads[1] == Catch::Approx(1.0).margin(1e-10));
  // each commodity satisfies its own salience-logit fixed point
  for (int k = 0; k < 2; ++k) {
    std::vector<double> costs{res.edge_loads[0], 1.0};
    auto p = salience_logit(costs, s.weights(k), 3.0);
    const double d = net.commodity(k).demand;
    for (int i = 0; i < 2; ++i)
      CHECK(res.flow.path_flows[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] ==
            Catch::Approx(d * p[static_cast<std::size_t>(i)]).margin(1e-8));
  }
}

TEST_CASE("mirror descent method agrees with MSA") {
  auto pig = make_pigou();
  SaliencePolicy s({{1.0, std::exp(-2.5)}});
  SueOptions opts;
  opts.method = SueOptions::Method::Mirror;
  auto res = swsue_solve(pig.net, pig.catalog, s, 5.0, opts);
  REQUIRE(res.converged);
  CHECK(res.flow.path_flows[0][1] == Catch::Approx(0.5).margin(1e-7));
}

TEST_CASE("potential closed forms") {
  auto pig = make_pigou();
  // single-path commodity: entropy term is (1/beta) d (log d - log s)
  {
    Network net(2, {Edge{0, 1, LatencyFn::constant(2.0)}}, {Commodity{0, 1, 3.0}});
    PathCatalog cat({{Path{0}}});
    SaliencePolicy s(std::vector<std::vector<double>>{{0.5}});
    const double beta = 2.0;
    const double expect = 2.0 * 3.0 + (3.0 * (std::log(3.0) - std::log(0.5))) / beta;
    CHECK(potential_value(net, cat, {{3.0}}, s, beta) == Catch::Approx(expect).margin(1e-12));
  }
  // Pigou, f=(0.5,0.5), s=(1,1), beta=1: 0.5 + 0.125 + (ln 0.5) = -0.068147...
  {
    SaliencePolicy s = SaliencePolicy::uniform({2});
    const double v = potential_value(pig.net, pig.catalog, {{0.5, 0.5}}, s, 1.0);
    CHECK(v == Catch::Approx(0.625 - std::log(2.0)).margin(1e-12));
    CHECK(v == Catch::Approx(-0.068147).margin(1e-6));
  }
  // convexity probe on random feasible pairs
  RngStream rng(77, 0, 0);
  SaliencePolicy s({{1.0, 2.0}});
  for (int rep = 0; rep < 50; ++rep) {
    const double a = 0.05 + 0.9 * rng.next_double();
    const double b = 0.05 + 0.9 * rng.next_double();
    const double mid = 0.5 * (a + b);
    const double va = potential_value(pig.net, pig.catalog, {{a, 1.0 - a}}, s, 2.0);
    const double vb = potential_value(pig.net, pig.catalog, {{b, 1.0 - b}}, s, 2.0);
    const double vm = potential_value(pig.net, pig.catalog, {{mid, 1.0 - mid}}, s, 2.0);
    CHECK(vm <= 0.5 * (va + vb) + 1e-12);
  }
  CHECK_THROWS_AS(potential_value(pig.net, pig.catalog, {{0.5, 0.2}},
                                  SaliencePolicy::uniform({2}), 1.0),
                  DomainError);
}

TEST_CASE("icwe: Pigou suppression and full-menu Wardrop") {
  auto pig = make_pigou();
  const Path route_a{0}, route_b{1};

  for (double alpha : {0.2, 0.5, 0.8}) {
    // alpha mass sees only {a}; the rest both routes
    auto res = icwe_solve(pig.net, {{route_a}, {route_a, route_b}}, {alpha, 1.0 - alpha});
    REQUIRE(res.converged);
    CHECK(res.edge_loads[0] == Catch::Approx(alpha).margin(1e-9));
    CHECK(res.edge_loads[1] == Catch::Approx(1.0 - alpha).margin(1e-9));
    CHECK(res.kkt_slack <= 1e-6);
  }

  // all types full menu -> Wardrop: everything on route b
  auto ward = icwe_solve(pig.net, {{route_a, route_b}}, {1.0});
  REQUIRE(ward.converged);
  CHECK(ward.edge_loads[1] == Catch::Approx(1.0).margin(1e-9));
  CHECK(ward.social_cost == Catch::Approx(1.0).margin(1e-9));

  // single path per type
  auto forced = icwe_solve(pig.net, {{route_a}}, {1.0});
  CHECK(forced.edge_loads[0] == Catch::Approx(1.0).margin(1e-12));

  CHECK_THROWS_AS(icwe_solve(pig.net, {{}}, {1.0}), InfeasibleError);
}

TEST_CASE("icwe KKT slack on an interior instance") {
  // two strictly increasing routes shared by two types -> interior optimum
  auto inst = make_parallel({LatencyFn::affine(1.0, 0.0), LatencyFn::affine(2.0, 0.1)});
  const Path r0{0}, r1{1};
  auto res = icwe_solve(inst.net, {{r0, r1}, {r0, r1}}, {0.6, 0.4});
  REQUIRE(res.converged);
  CHECK(res.kkt_slack <= 1e-6);
  // Wardrop: latencies equalize: x0 = 2x1 + 0.1, x0 + x1 = 1
  const double x1 = (1.0 - 0.1) / 3.0;
  CHECK(res.edge_loads[1] == Catch::Approx(x1).margin(1e-6));
}

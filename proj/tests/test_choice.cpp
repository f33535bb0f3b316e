#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fr/choice.hpp"

using namespace fr;

static double dist_sum(const ChoiceDistribution& p) {
  double s = 0.0;
  for (double v : p) s += v;
  return s;
}

TEST_CASE("logit basics") {
  auto equal = logit({1.0, 1.0, 1.0}, 5.0);
  for (double v : equal) CHECK(v == Catch::Approx(1.0 / 3.0).margin(1e-14));

  auto zero_beta = logit({3.0, -1.0, 10.0}, 0.0);
  for (double v : zero_beta) CHECK(v == Catch::Approx(1.0 / 3.0).margin(1e-14));

  // softmax oracle: sigma(1) = 1/(1+e^-1)
  auto two = logit({0.0, 1.0}, 1.0);
  CHECK(two[0] == Catch::Approx(0.731059).margin(1e-6));
  CHECK(two[1] == Catch::Approx(0.268941).margin(1e-6));

  CHECK_THROWS_AS(logit({}, 1.0), DomainError);
  // overflow safety via max shift
  auto huge = logit({-1e6, 0.0}, 5.0);
  CHECK(huge[0] == Catch::Approx(1.0));
  CHECK(std::isfinite(huge[1]));
}

TEST_CASE("salience_logit examples") {
  // uniform salience reduces to logit
  auto a = salience_logit({0.3, 1.7, 0.9}, {2.0, 2.0, 2.0}, 3.0);
  auto b = logit({0.3, 1.7, 0.9}, 3.0);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == Catch::Approx(b[i]).margin(1e-14));

  // beta = 0 reduces to s-proportional
  auto c = salience_logit({5.0, -2.0}, {1.0, 3.0}, 0.0);
  CHECK(c[0] == Catch::Approx(0.25).margin(1e-14));
  CHECK(c[1] == Catch::Approx(0.75).margin(1e-14));

  // optimal Pigou ratio: costs (1, 0.5), s = (1, e^{-2.5}), beta = 5 -> even split
  auto d = salience_logit({1.0, 0.5}, {1.0, std::exp(-2.5)}, 5.0);
  CHECK(d[0] == Catch::Approx(0.5).margin(1e-12));
  CHECK(d[1] == Catch::Approx(0.5).margin(1e-12));

  CHECK_THROWS_AS(salience_logit({1.0, 1.0}, {1.0, 0.0}, 1.0), DomainError);
}

TEST_CASE("availability_weighted_logit examples") {
  auto full = availability_weighted_logit({0.4, 1.1}, {1.0, 1.0}, 2.0);
  auto plain = logit({0.4, 1.1}, 2.0);
  CHECK(full[0] == Catch::Approx(plain[0]).margin(1e-14));

  auto vanish = availability_weighted_logit({1.0, 0.0}, {1.0, 1e-12}, 1.0);
  CHECK(vanish[0] > 1.0 - 1e-9);

  // eta cancels when equal
  auto eq = availability_weighted_logit({0.0, 1.0}, {0.5, 0.5}, 1.0);
  CHECK(eq[0] == Catch::Approx(0.731059).margin(1e-6));
  CHECK(eq[1] == Catch::Approx(0.268941).margin(1e-6));

  CHECK_THROWS_AS(availability_weighted_logit({1.0}, {0.0}, 1.0), DomainError);
  CHECK_THROWS_AS(availability_weighted_logit({1.0}, {1.5}, 1.0), DomainError);
}

TEST_CASE("choice invariants: simplex, shift and scale invariance, Lipschitz") {
  RngStream rng(101, 0, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + rng.next_below(6);
    std::vector<double> costs(n), costs2(n), sal(n);
    const double beta = 5.0 * rng.next_double();
    for (std::size_t i = 0; i < n; ++i) {
      costs[i] = 4.0 * rng.next_double() - 2.0;
      costs2[i] = costs[i] + 0.5 * (rng.next_double() - 0.5);
      sal[i] = 0.1 + 3.0 * rng.next_double();
    }
    auto p = salience_logit(costs, sal, beta);
    CHECK(dist_sum(p) == Catch::Approx(1.0).margin(1e-12));
    for (double v : p) CHECK(v >= 0.0);

    // shift invariance
    auto shifted = costs;
    for (double& c : shifted) c += 7.31;
    auto ps = salience_logit(shifted, sal, beta);
    for (std::size_t i = 0; i < n; ++i) CHECK(ps[i] == Catch::Approx(p[i]).margin(1e-12));

    // salience scale invariance
    auto scaled = sal;
    for (double& s : scaled) s *= 41.7;
    auto pc = salience_logit(costs, scaled, beta);
    for (std::size_t i = 0; i < n; ++i) CHECK(pc[i] == Catch::Approx(p[i]).margin(1e-12));

    // logit Lipschitz: ||sigma(c) - sigma(c')||_1 <= beta ||c - c'||_inf
    auto q1 = logit(costs, beta);
    auto q2 = logit(costs2, beta);
    double l1 = 0.0, linf = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      l1 += std::abs(q1[i] - q2[i]);
      linf = std::max(linf, std::abs(costs[i] - costs2[i]));
    }
    CHECK(l1 <= beta * linf + 1e-9);
  }
}

TEST_CASE("salience policy canonicalization") {
  SaliencePolicy pol({{2.0, 8.0}, {5.0, 5.0, 10.0}});
  auto canon = pol.canonicalized();
  CHECK(canon.weights(0)[0] == Catch::Approx(1.0));
  CHECK(canon.weights(0)[1] == Catch::Approx(4.0));
  CHECK(canon.weights(1)[0] == Catch::Approx(1.0));
  auto u = canon.log_salience(0);
  CHECK(u[0] == Catch::Approx(0.0).margin(1e-15));
  CHECK_THROWS_AS(SaliencePolicy({{1.0, -2.0}}), DomainError);
}

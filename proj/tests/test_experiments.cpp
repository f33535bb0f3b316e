#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fr/experiments.hpp"

using namespace fr;

TEST_CASE("pigou suppression analytics") {
  CHECK(pigou_suppression_sc(0.0) == Catch::Approx(1.0));
  CHECK(pigou_suppression_sc(0.5) == Catch::Approx(0.75));
  CHECK(pigou_suppression_sc(1.0) == Catch::Approx(1.0));
  CHECK(pigou_suppression_argmin() == Catch::Approx(0.5).margin(1e-12));
  CHECK_THROWS_AS(pigou_suppression_sc(1.2), DomainError);

  // convexity and argmin on a 1001-point grid
  double best = kInf;
  double best_alpha = -1.0;
  double prev = kInf;
  bool decreasing = true;
  for (int i = 0; i <= 1000; ++i) {
    const double a = i / 1000.0;
    const double sc = pigou_suppression_sc(a);
    if (sc < best) {
      best = sc;
      best_alpha = a;
    }
    if (a <= 0.5 && sc > prev) decreasing = false;  // convex: falls then rises
    prev = sc;
  }
  CHECK(decreasing);
  CHECK(best_alpha == Catch::Approx(0.5).margin(1e-9));
}

TEST_CASE("vor ratios") {
  CHECK(vor(0.75, 1.0) == Catch::Approx(0.75));
  CHECK(vor(1.0, 1.0) == Catch::Approx(1.0));
  CHECK(vor(1.2, 1.0) == Catch::Approx(1.2));  // recall-rich worse
  CHECK_THROWS_AS(vor(1.0, 0.0), DomainError);
}

TEST_CASE("recall richness comparisons") {
  CHECK(recall_richness_compare({0.5, 0.5}, {0.5, 0.5}) == Richness::Equal);
  // Pigou suppression: alpha=0 has h=(1,1); alpha=0.5 has h=(1,0.5)
  CHECK(recall_richness_compare({1.0, 1.0}, {1.0, 0.5}) == Richness::StrictlyRicher);
  CHECK(recall_richness_compare({1.0, 0.5}, {1.0, 1.0}) == Richness::StrictlyPoorer);
  CHECK(recall_richness_compare({1.0, 0.0}, {0.0, 1.0}) == Richness::Incomparable);
  CHECK_THROWS_AS(recall_richness_compare({1.0}, {1.0, 0.0}), DomainError);
}

TEST_CASE("rbp certificate fires exactly on richer-and-costlier pairs") {
  RecallPolicyDescriptor full{"alpha=0", {1.0, 1.0}, 1.0, 0.0};
  RecallPolicyDescriptor half{"alpha=0.5", {1.0, 0.5}, 0.75, 0.0};
  auto witnesses = rbp_certificate({full, half});
  REQUIRE(witnesses.size() == 1);
  CHECK(witnesses[0].richer == 0);
  CHECK(witnesses[0].poorer == 1);
  CHECK(witnesses[0].sc_increase == Catch::Approx(0.25));

  // identical policies: no witness
  CHECK(rbp_certificate({full, full}).empty());
  // equal SC: no witness
  RecallPolicyDescriptor same_cost{"x", {1.0, 0.5}, 1.0, 0.0};
  CHECK(rbp_certificate({full, same_cost}).empty());
  // incomparable menus: no witness
  RecallPolicyDescriptor crossed{"y", {0.0, 1.0}, 0.5, 0.0};
  RecallPolicyDescriptor crossed2{"z", {1.0, 0.0}, 0.9, 0.0};
  CHECK(rbp_certificate({crossed, crossed2}).empty());
  // margin suppresses noise-level witnesses
  RecallPolicyDescriptor noisy{"n", {1.0, 1.0}, 0.76, 0.05};
  CHECK(rbp_certificate({noisy, half}).empty());
}

TEST_CASE("embed_pigou on Braess reduces to the Pigou game") {
  auto braess = make_braess();
  auto emb = embed_pigou(braess.net, 0, 10.0);
  REQUIRE_FALSE(emb.immune);

  // alpha = 0.5 suppression: half the mass sees only the constant path
  auto all_paths = enumerate_paths(emb.network, 0);
  auto res = icwe_solve(emb.network, {{emb.path_constant}, all_paths}, {0.5, 0.5});
  REQUIRE(res.converged);
  CHECK(res.social_cost == Catch::Approx(0.75).margin(1e-9));

  // all equilibrium flow stays on the designated union (off-flow <= 1e-9)
  std::set<int> covered(emb.path_constant.begin(), emb.path_constant.end());
  covered.insert(emb.path_variable.begin(), emb.path_variable.end());
  for (int e = 0; e < emb.network.n_edges(); ++e)
    if (!covered.count(e)) CHECK(res.edge_loads[static_cast<std::size_t>(e)] <= 1e-9);
}

TEST_CASE("embed_pigou identity and immunity cases") {
  auto pig = make_pigou();
  auto emb = embed_pigou(pig.net, 0, 10.0);
  REQUIRE_FALSE(emb.immune);
  CHECK(emb.path_constant == Path{0});
  CHECK(emb.path_variable == Path{1});
  CHECK(emb.network.edge(0).latency(0.7) == Catch::Approx(1.0));
  CHECK(emb.network.edge(1).latency(0.7) == Catch::Approx(0.7));

  // unique-path chain is immune
  Network chain(3, {Edge{0, 1, LatencyFn::constant(1.0)}, Edge{1, 2, LatencyFn::constant(1.0)}},
                {Commodity{0, 2, 1.0}});
  CHECK(embed_pigou(chain, 0, 10.0).immune);

  CHECK_THROWS_AS(embed_pigou(pig.net, 0, 1.5), DomainError);
}

TEST_CASE("experiment harness: exp4, exp5, exp6 fast paths") {
  // exp4 frontier: nonincreasing with a plateau
  ExperimentConfig c4;
  c4.id = "exp4";
  auto r4 = run_experiment(c4);
  const auto& f = r4.table("exp4_frontier");
  REQUIRE(f.rows.size() >= 4);
  for (std::size_t i = 0; i + 1 < f.rows.size(); ++i)
    CHECK(f.rows[i + 1][1] <= f.rows[i][1] + 1e-6);

  // exp5: heavy-tailed required budgets
  ExperimentConfig c5;
  c5.id = "exp5";
  c5.n_targets = 30;
  auto r5 = run_experiment(c5);
  const auto& s = r5.table("exp5_summary");
  REQUIRE(s.rows.size() == 1);
  const double median = s.rows[0][3];
  const double maxr = s.rows[0][5];
  CHECK(maxr > median);  // heavy tail: max well beyond the median
  CHECK(s.rows[0][1] <= s.rows[0][0]);

  // exp6 on a short sweep: SC agreement at tight tolerance
  ExperimentConfig c6;
  c6.id = "exp6";
  c6.kmax = 5;
  auto r6 = run_experiment(c6);
  const auto& t = r6.table("exp6_scaling");
  REQUIRE(t.rows.size() == 5);
  for (const auto& row : t.rows) CHECK(row[4] <= 1e-8);
  CHECK(r6.table("exp6_timing").rows.size() == 5);

  ExperimentConfig bad;
  bad.id = "exp9";
  CHECK_THROWS_AS(run_experiment(bad), DomainError);
}

TEST_CASE("experiment harness: exp1/exp2/exp3 smoke with reduced scale") {
  ExperimentConfig c1;
  c1.id = "exp1";
  c1.agents = 800;
  c1.horizon = 600;
  c1.burn_in = 200;
  c1.seeds = {1};
  auto r1 = run_experiment(c1);
  const auto& t1 = r1.table("exp1_micro_vs_surrogate");
  REQUIRE(t1.rows.size() == 1);
  CHECK(t1.rows[0][3] == Catch::Approx(0.82).margin(0.03));  // sc_micro
  CHECK(t1.rows[0][4] == Catch::Approx(0.82).margin(0.01));  // sc_ttl

  ExperimentConfig c2;
  c2.id = "exp2";
  c2.agents = 1200;
  c2.horizon = 800;
  c2.burn_in = 200;
  c2.seeds = {1};
  auto r2 = run_experiment(c2);
  CHECK(r2.table("exp2_per_route").rows.size() == 6);
  const auto& s2 = r2.table("exp2_summary");
  REQUIRE(s2.rows.size() == 1);
  CHECK(s2.rows[0][1] <= 0.2);  // share error small even at reduced scale

  // bridge-error serialization carries the exact field names
  const auto& br = r2.table("bridge_error");
  CHECK(br.columns == std::vector<std::string>{"share_l1", "hit_l1", "sc_rel_gap",
                                               "wmax_over_mu", "cv2_bound", "theory_rate"});
  REQUIRE(br.rows.size() == 1);
  CHECK(br.rows[0][0] >= 0.0);

  ExperimentConfig c3;
  c3.id = "exp3";
  c3.agents = 600;
  c3.horizon = 500;
  c3.burn_in = 200;
  c3.seeds = {1, 2};
  auto r3 = run_experiment(c3);
  CHECK(r3.table("exp3_braess_sc_vs_budget").rows.size() == 6);
  CHECK(r3.table("exp3_median").rows.size() == 3);
}

TEST_CASE("exp1 extended tier runs on a TNTP benchmark at reduced scale") {
  ExperimentConfig cfg;
  cfg.id = "exp1";
  cfg.agents = 40;
  cfg.horizon = 120;
  cfg.burn_in = 40;
  cfg.seeds = {1};
  cfg.tntp_net = std::string(FR_TEST_DATA_DIR) + "/siouxfalls_net.tntp";
  cfg.tntp_trips = std::string(FR_TEST_DATA_DIR) + "/siouxfalls_trips.tntp";
  cfg.tntp_top_od = 10;
  cfg.tntp_paths_per_od = 4;
  auto res = run_experiment(cfg);
  const auto& ext = res.table("exp1_extended");
  REQUIRE(ext.rows.size() == 1);
  CHECK(ext.rows[0][0] > 0.0);  // micro SC
  CHECK(ext.rows[0][1] > 0.0);  // surrogate SC
  CHECK(ext.rows[0][4] == 10.0);
}

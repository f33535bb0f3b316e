#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "fr/instances.hpp"
#include "fr/paths.hpp"

using namespace fr;

TEST_CASE("enumerate_paths counts on canonical instances") {
  auto braess = make_braess();
  CHECK(enumerate_paths(braess.net, 0).size() == 3);

  Network single(2, {Edge{0, 1, LatencyFn::constant(1.0)}}, {Commodity{0, 1, 1.0}});
  CHECK(enumerate_paths(single, 0).size() == 1);

  auto chain = make_diamond_chain(2, random_affine_latencies(4, 3));
  CHECK(enumerate_paths(chain.net, 0).size() == 4);

  Network disconnected(3, {Edge{0, 1, LatencyFn::constant(1.0)}}, {Commodity{0, 2, 1.0}});
  CHECK_THROWS_AS(enumerate_paths(disconnected, 0), InfeasibleError);
}

TEST_CASE("enumerate_paths is lexicographic and respects max_count") {
  auto braess = make_braess();
  auto ps = enumerate_paths(braess.net, 0);
  auto sorted = ps;
  std::sort(sorted.begin(), sorted.end());
  CHECK(ps == sorted);
  CHECK(enumerate_paths(braess.net, 0, 2).size() == 2);
}

TEST_CASE("yen on two-route and Braess instances") {
  auto pig = make_pigou();
  auto two = yen_k_shortest(pig.net, 0, 2);
  REQUIRE(two.paths.size() == 2);
  // free-flow costs: route a = 1, route b = 0 -> b first
  CHECK(two.paths[0] == Path{1});
  CHECK(two.paths[1] == Path{0});
  CHECK_FALSE(two.truncated);

  auto braess = make_braess();
  auto three = yen_k_shortest(braess.net, 0, 3);
  REQUIRE(three.paths.size() == 3);
  // brute-force oracle: enumerate + stable sort by (free-flow cost, lex)
  auto all = enumerate_paths(braess.net, 0);
  std::vector<std::pair<double, Path>> oracle;
  for (const auto& p : all) {
    double c = 0.0;
    for (int e : p) c += braess.net.edge(e).latency(0.0);
    oracle.push_back({c, p});
  }
  std::sort(oracle.begin(), oracle.end());
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(three.paths[i] == oracle[i].second);
    CHECK(three.costs[i] == Catch::Approx(oracle[i].first).margin(1e-12));
  }

  auto sat = yen_k_shortest(braess.net, 0, 10);
  CHECK(sat.paths.size() == 3);
  CHECK(sat.truncated);
}

TEST_CASE("yen agrees with brute force on random diamond chains") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const int k = seed <= 2 ? 5 : 7;  // 32 and 128 paths
    auto chain = make_diamond_chain(k, random_affine_latencies(2 * k, seed));
    auto all = enumerate_paths(chain.net, 0);
    std::vector<std::pair<double, Path>> oracle;
    for (const auto& p : all) {
      double c = 0.0;
      for (int e : p) c += chain.net.edge(e).latency(0.0);
      oracle.push_back({c, p});
    }
    std::sort(oracle.begin(), oracle.end(),
              [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first < b.first;
                return a.second < b.second;
              });
    const int K = 12;
    auto got = yen_k_shortest(chain.net, 0, K);
    REQUIRE(got.paths.size() == static_cast<std::size_t>(K));
    for (int i = 0; i < K; ++i) {
      CHECK(got.costs[static_cast<std::size_t>(i)] ==
            Catch::Approx(oracle[static_cast<std::size_t>(i)].first).margin(1e-9));
      CHECK(got.paths[static_cast<std::size_t>(i)] ==
            oracle[static_cast<std::size_t>(i)].second);
    }
    // subset property
    std::set<Path> known(all.begin(), all.end());
    for (const auto& p : got.paths) CHECK(known.count(p) == 1);
  }
}

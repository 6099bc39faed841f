#include <doctest.h>

#include <cmath>

#include "mergm/stats.hpp"
#include "oracles.hpp"

using namespace mergm;

namespace {

ModelSpec all_terms(double a, double b, double c) {
  return ModelSpec({{TermKind::Edges, 0}, {TermKind::TwoStars, 0}, {TermKind::Gwesp, a},
                    {TermKind::Gwnsp, b}, {TermKind::Gwdegree, c}});
}

}  // namespace

TEST_CASE("statistics of the empty graph vanish") {
  const auto spec = ModelSpec::parse("edges,twostars,gwesp:0.5");
  CHECK(statistics(UndirectedNetwork(5), spec).isZero());
}

TEST_CASE("triangle plus isolate") {
  const auto net = UndirectedNetwork::from_edges(4, {{0, 1}, {0, 2}, {1, 2}});
  for (double tau : {0.0, 0.5, 1.7, 4.0}) {
    const ModelSpec spec({{TermKind::Edges, 0}, {TermKind::TwoStars, 0}, {TermKind::Gwesp, tau}});
    const Vector s = statistics(net, spec);
    CHECK(s(0) == doctest::Approx(3.0));
    CHECK(s(1) == doctest::Approx(3.0));
    CHECK(s(2) == doctest::Approx(3.0).epsilon(1e-12));
  }
}

TEST_CASE("complete graph gwesp matches the closed form and a brute-force count") {
  const auto net = UndirectedNetwork::complete(4);
  const ModelSpec spec({{TermKind::Gwesp, 0.5}});
  const double expected = 6.0 * std::exp(0.5) * (1.0 - std::pow(1.0 - std::exp(-0.5), 2));
  CHECK(statistics(net, spec)(0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(oracle::statistic(oracle::adjacency(net), spec[0]) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("change statistic examples") {
  mergm::Rng rng(3);
  const auto spec = all_terms(0.5, 0.5, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto net = oracle::random_network(7, 0.4, rng);
    CHECK(change_statistics(net, spec, 2, 5)(0) == 1.0);
  }
  const ModelSpec two({{TermKind::TwoStars, 0}});
  CHECK(change_statistics(UndirectedNetwork(4), two, 0, 1)(0) == 0.0);

  const auto path = UndirectedNetwork::from_edges(3, {{0, 1}, {1, 2}});
  const ModelSpec gw({{TermKind::Gwesp, 0.5}});
  CHECK(change_statistics(path, gw, 0, 2)(0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS(change_statistics(path, gw, 1, 1), InvalidNode);
}

TEST_CASE("statistics agree with the adjacency-matrix oracle") {
  mergm::Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(12));
    const auto spec = all_terms(3.0 * rng.uniform(), 3.0 * rng.uniform(), 3.0 * rng.uniform());
    const auto net = oracle::random_network(n, rng.uniform(), rng);
    const Vector s = statistics(net, spec);
    const auto adj = oracle::adjacency(net);
    for (int k = 0; k < spec.size(); ++k) {
      CHECK(s(k) == doctest::Approx(oracle::statistic(adj, spec[k])).epsilon(1e-12));
    }
  }
}

TEST_CASE("change statistics equal brute-force differences") {
  mergm::Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(11));  // 2..12
    const auto spec = all_terms(2.0 * rng.uniform(), 2.0 * rng.uniform(), 2.0 * rng.uniform());
    auto net = oracle::random_network(n, rng.uniform(), rng);
    const auto i = static_cast<int>(rng.below(n));
    auto j = static_cast<int>(rng.below(n - 1));
    if (j >= i) ++j;

    const Vector delta = change_statistics(net, spec, i, j);
    net.set_edge(i, j, true);
    const Vector plus = statistics(net, spec);
    net.set_edge(i, j, false);
    const Vector minus = statistics(net, spec);
    CHECK((delta - (plus - minus)).lpNorm<Eigen::Infinity>() < 1e-10);
    // Δ is independent of the current state of the dyad.
    net.set_edge(i, j, true);
    CHECK((change_statistics(net, spec, i, j) - delta).lpNorm<Eigen::Infinity>() < 1e-10);
  }
}

TEST_CASE("toggling moves statistics by the signed change statistic") {
  mergm::Rng rng(5);
  const auto spec = all_terms(0.7, 0.3, 1.1);
  for (int trial = 0; trial < 200; ++trial) {
    auto net = oracle::random_network(9, 0.3, rng);
    const auto i = static_cast<int>(rng.below(9));
    auto j = static_cast<int>(rng.below(8));
    if (j >= i) ++j;
    const Vector before = statistics(net, spec);
    const Vector delta = change_statistics(net, spec, i, j);
    const double sign = net.toggle(i, j) ? 1.0 : -1.0;
    CHECK((statistics(net, spec) - (before + sign * delta)).lpNorm<Eigen::Infinity>() < 1e-10);
  }
}

TEST_CASE("zero decay counts edges and dyads with at least one partner") {
  mergm::Rng rng(8);
  const ModelSpec spec({{TermKind::Gwesp, 0.0}, {TermKind::Gwnsp, 0.0}, {TermKind::Gwdegree, 0.0}});
  for (int trial = 0; trial < 50; ++trial) {
    const auto net = oracle::random_network(10, 0.3, rng);
    const auto adj = oracle::adjacency(net);
    double esp = 0, nsp = 0, deg = 0;
    for (int i = 0; i < 10; ++i) {
      deg += net.degree(i) > 0;
      for (int j = i + 1; j < 10; ++j) {
        const bool partner = oracle::shared(adj, i, j) > 0;
        (adj[i][j] ? esp : nsp) += partner;
      }
    }
    const Vector s = statistics(net, spec);
    CHECK(s(0) == doctest::Approx(esp));
    CHECK(s(1) == doctest::Approx(nsp));
    CHECK(s(2) == doctest::Approx(deg));
  }
}

TEST_CASE("term strings") {
  const auto spec = ModelSpec::parse("edges, gwesp:0.25 ,gwdegree,2-stars");
  REQUIRE(spec.size() == 4);
  CHECK(spec[1].decay == 0.25);
  CHECK(spec[2].decay == kDefaultDecay);
  CHECK(spec[3].kind == TermKind::TwoStars);
  CHECK(spec.to_string() == "edges,gwesp:0.25,gwdegree:0.5,twostars");
  CHECK(ModelSpec::parse(spec.to_string()).to_string() == spec.to_string());
  CHECK_THROWS_AS(ModelSpec::parse("edges,triangles"), ConfigError);
  CHECK_THROWS_AS(ModelSpec::parse("edges,edges"), ConfigError);
  CHECK_THROWS_AS(ModelSpec::parse("edges:1"), ConfigError);
  CHECK_THROWS_AS(ModelSpec::parse("gwesp:-1"), ConfigError);
  CHECK_THROWS_AS(ModelSpec::parse("gwesp:abc"), ConfigError);
}

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "cggm/errors.hpp"
#include "cggm/simulate.hpp"
#include "oracles.hpp"

using namespace cggm;

TEST_CASE("full-scale preset") {
  const auto s = SimulationSpec::full_scale();
  CHECK(s.n == 700);
  CHECK(s.p == 30);
  CHECK(s.q == 40);
  CHECK(s.support == std::vector<int>{4, 10, 16, 23});
  CHECK(s.effects == std::vector<EffectKind>{EffectKind::sin, EffectKind::sin, EffectKind::linear, EffectKind::exp});
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("effect kinds") {
  for (const char* name : {"sin", "linear", "exp"}) CHECK(effect_name(parse_effect(name)) == name);
  CHECK_THROWS_AS(parse_effect("cubic"), InvalidArgument);
  CHECK(apply_effect(EffectKind::sin, 0.3) == std::sin(0.3));
  CHECK(apply_effect(EffectKind::exp, -0.4) == std::exp(-0.4));
  CHECK(apply_effect(EffectKind::linear, 0.7) == 0.7);
}

TEST_CASE("generated data follows the model") {
  SimulationSpec spec;
  spec.n = 200;
  spec.p = 6;
  spec.q = 5;
  spec.support = {1, 4};
  spec.effects = {EffectKind::sin, EffectKind::exp};
  spec.seed = 3;
  const auto d = generate(spec);
  REQUIRE(d.x.rows() == 200);
  REQUIRE(d.x.cols() == 6);
  REQUIRE(d.y.cols() == 5);
  CHECK(d.x.minCoeff() >= -1.0);
  CHECK(d.x.maxCoeff() < 1.0);
  CHECK(d.truth.support.selected() == spec.support);
  CHECK(d.truth.coefficients.minCoeff() > 0.0);
  CHECK(d.truth.graph.edge_count() == 5);
  for (int i = 0; i < 200; ++i)
    for (int j = 0; j < 5; ++j) {
      const double f = d.truth.coefficients(j, 0) * std::sin(d.x(i, 1)) + d.truth.coefficients(j, 1) * std::exp(d.x(i, 4));
      CHECK(d.truth.mean(i, j) == doctest::Approx(f).epsilon(1e-14));
    }
  // Noise precision respects the truth graph.
  const Eigen::MatrixXd k = d.truth.sigma.inverse();
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j)
      if (!d.truth.graph.has_edge(i, j)) CHECK(std::abs(k(i, j)) < 1e-8 * k.cwiseAbs().maxCoeff());

  spec.random_signs = true;
  spec.n = 10;
  spec.q = 20;
  const auto signed_data = generate(spec);
  CHECK(signed_data.truth.coefficients.minCoeff() < 0.0);
  CHECK(signed_data.truth.coefficients.maxCoeff() > 0.0);
}

TEST_CASE("noise covariance") {
  Eigen::MatrixXd sigma(3, 3);
  sigma << 1.0, 0.5, 0.0, 0.5, 2.0, -0.4, 0.0, -0.4, 0.7;
  SimulationSpec spec;
  spec.n = 10000;
  spec.p = 2;
  spec.q = 3;
  spec.graph = Graph::from_edges(3, {{0, 1}, {1, 2}});
  spec.fixed_sigma = sigma;
  spec.seed = 5;
  const auto d = generate(spec);
  const Eigen::MatrixXd e = d.y - d.truth.mean;
  CHECK(e.cwiseAbs().maxCoeff() > 0.0);
  CHECK(d.y == e);  // no true predictors
  const Eigen::MatrixXd cov = e.transpose() * e / spec.n;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double se = std::sqrt((sigma(i, i) * sigma(j, j) + sigma(i, j) * sigma(i, j)) / spec.n);
      CHECK(std::abs(cov(i, j) - sigma(i, j)) < 5.0 * se);
    }
  CHECK(std::abs(e.colwise().mean().maxCoeff()) < 5.0 * std::sqrt(2.0 / spec.n));
}

TEST_CASE("random decomposable graphs") {
  std::mt19937_64 rng(6);
  std::set<std::uint64_t> seen;
  for (int t = 0; t < 1000; ++t) {
    const auto g = random_decomposable_graph(4, 3, rng);
    CHECK(g.edge_count() == 3);
    const auto edges = g.edges();
    const auto mask = oracle::edge_mask(4, edges);
    CHECK(oracle::chordal(oracle::adj_from_mask(4, mask)));
    seen.insert(mask);
  }
  // 16 spanning trees plus 4 triangles.
  CHECK(seen.size() == 20u);

  for (int t = 0; t < 200; ++t) {
    const int q = 2 + t % 9;
    const int e = std::uniform_int_distribution<int>(0, q * (q - 1) / 2)(rng);
    const auto g = random_decomposable_graph(q, e, rng);
    CHECK(g.edge_count() == e);
    CHECK(oracle::chordal(oracle::adj_from_mask(q, oracle::edge_mask(q, g.edges()))));
  }
  CHECK_THROWS_AS(random_decomposable_graph(3, 4, rng), InvalidArgument);
  CHECK_THROWS_AS(random_decomposable_graph(3, -1, rng), InvalidArgument);
}

TEST_CASE("determinism and prefix extension") {
  SimulationSpec spec;
  spec.n = 40;
  spec.p = 4;
  spec.q = 4;
  spec.support = {0};
  spec.effects = {EffectKind::linear};
  spec.seed = 9;
  const auto a = generate(spec);
  const auto b = generate(spec);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
  spec.n = 90;
  const auto longer = generate(spec);
  CHECK(longer.x.topRows(40) == a.x);
  CHECK(longer.y.topRows(40) == a.y);
  CHECK(longer.truth.sigma == a.truth.sigma);
  spec.seed = 10;
  CHECK(generate(spec).y.topRows(40) != a.y);
}

TEST_CASE("simulation validation") {
  SimulationSpec spec;
  spec.support = {1};
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  spec.effects = {EffectKind::sin};
  CHECK_NOTHROW(spec.validate());
  spec.support = {10};
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  spec = SimulationSpec{};
  spec.graph = Graph::from_edges(8, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  spec = SimulationSpec{};
  spec.hiw_b = 2.0;
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  spec = SimulationSpec{};
  spec.graph_edges = 29;
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  spec = SimulationSpec{};
  spec.fixed_sigma = Eigen::MatrixXd::Identity(3, 3);
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "cggm/errors.hpp"
#include "cggm/posterior.hpp"
#include "oracles.hpp"

using namespace cggm;

namespace {

ChainTrace random_trace(int p, int q, int records, std::mt19937_64& rng) {
  ChainTrace t;
  t.p = p;
  t.q = q;
  std::bernoulli_distribution coin(0.35);
  for (int r = 0; r < records; ++r) {
    TraceRecord rec;
    rec.iteration = r + 1;
    rec.gamma.resize(p);
    for (auto& b : rec.gamma) b = coin(rng);
    for (int i = 0; i < q; ++i)
      for (int j = i + 1; j < q; ++j)
        if (coin(rng)) rec.edges.emplace_back(i, j);
    t.records.push_back(rec);
  }
  return t;
}

}  // namespace

TEST_CASE("edge and inclusion probabilities are recounts") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const int p = 1 + trial % 6, q = 2 + trial % 7;
    std::vector<ChainTrace> traces;
    for (int c = 0; c < 1 + trial % 3; ++c) traces.push_back(random_trace(p, q, 20 + 11 * c + trial, rng));

    Eigen::MatrixXd edges = Eigen::MatrixXd::Zero(q, q);
    Eigen::VectorXd incl = Eigen::VectorXd::Zero(p);
    double total = 0;
    for (const auto& t : traces)
      for (const auto& r : t.records) {
        for (const auto& [i, j] : r.edges) {
          edges(i, j) += 1;
          edges(j, i) += 1;
        }
        for (int i = 0; i < p; ++i) incl(i) += r.gamma[i];
        total += 1;
      }
    const Eigen::MatrixXd ep = edge_probabilities(traces);
    CHECK((ep - edges / total).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(ep.diagonal().isZero());
    CHECK((ep - ep.transpose()).isZero());
    CHECK(ep.minCoeff() >= 0.0);
    CHECK(ep.maxCoeff() <= 1.0);
    CHECK((inclusion_probabilities(traces) - incl / total).cwiseAbs().maxCoeff() < 1e-15);
  }
  CHECK_THROWS_AS(edge_probabilities(std::span<const ChainTrace>()), InvalidArgument);
  ChainTrace empty;
  empty.p = 2;
  empty.q = 3;
  CHECK_THROWS_AS(edge_probabilities(empty), InvalidArgument);
  CHECK_THROWS_AS(inclusion_probabilities(empty), InvalidArgument);
  std::vector<ChainTrace> mixed{random_trace(2, 3, 5, rng), random_trace(2, 4, 5, rng)};
  CHECK_THROWS_AS(edge_probabilities(mixed), InvalidArgument);
}

TEST_CASE("graph selection") {
  Eigen::MatrixXd prob = Eigen::MatrixXd::Zero(4, 4);
  prob(0, 1) = prob(1, 0) = 0.9;
  prob(1, 2) = prob(2, 1) = 0.5;
  prob(2, 3) = prob(3, 2) = 0.51;
  prob(0, 3) = prob(3, 0) = 0.2;
  const Graph g = select_graph(prob);
  CHECK(g.edges() == std::vector<Edge>{{0, 1}, {2, 3}});
  CHECK(select_graph(prob, 0.1).edge_count() == 4);
  // Thresholded graphs need not be chordal.
  Eigen::MatrixXd cyc = Eigen::MatrixXd::Zero(4, 4);
  for (int i = 0; i < 4; ++i) cyc(i, (i + 1) % 4) = cyc((i + 1) % 4, i) = 0.8;
  CHECK_FALSE(is_decomposable(select_graph(cyc)));
  CHECK_THROWS_AS(select_graph(prob, 1.0), InvalidArgument);
  CHECK_THROWS_AS(select_graph(Eigen::MatrixXd::Zero(2, 3)), InvalidArgument);
}

TEST_CASE("partial correlations") {
  Eigen::MatrixXd k(2, 2);
  k << 2.0, -1.0, -1.0, 2.0;
  const auto rho = partial_correlation(k);
  CHECK(rho(0, 1) == doctest::Approx(0.5));
  CHECK(rho(0, 0) == 1.0);

  std::mt19937_64 rng(2);
  for (int t = 0; t < 50; ++t) {
    const int q = 2 + t % 6;
    const Eigen::MatrixXd prec = oracle::random_spd(q, rng);
    const auto r = partial_correlation(prec);
    // Partial correlation from the regression of i on the rest: -k_ij / sqrt(k_ii k_jj),
    // checked through the conditional covariance of (i, j) given the others.
    const Eigen::MatrixXd sigma = prec.inverse();
    for (int i = 0; i < q; ++i)
      for (int j = i + 1; j < q; ++j) {
        std::vector<int> rest, pair{i, j};
        for (int m = 0; m < q; ++m)
          if (m != i && m != j) rest.push_back(m);
        Eigen::MatrixXd cond = oracle::sub(sigma, pair);
        if (!rest.empty()) {
          Eigen::MatrixXd cross(2, rest.size());
          for (int a = 0; a < 2; ++a)
            for (std::size_t b = 0; b < rest.size(); ++b) cross(a, b) = sigma(pair[a], rest[b]);
          cond -= cross * oracle::sub(sigma, rest).inverse() * cross.transpose();
        }
        const double expect = cond(0, 1) / std::sqrt(cond(0, 0) * cond(1, 1));
        CHECK(r(i, j) == doctest::Approx(expect).epsilon(1e-9));
        CHECK(std::abs(r(i, j)) < 1.0);
      }
  }
  std::vector<CovarianceDraw> draws{{Eigen::MatrixXd(), k}, {Eigen::MatrixXd(), Eigen::MatrixXd::Identity(2, 2)}};
  CHECK(partial_correlations(draws)(0, 1) == doctest::Approx(0.25));
  CHECK_THROWS_AS(partial_correlations(std::span<const CovarianceDraw>()), InvalidArgument);
}

TEST_CASE("hub ordering") {
  const Graph g = Graph::from_edges(5, {{0, 1}, {1, 2}, {1, 3}, {3, 4}, {2, 3}});
  const auto hubs = hub_nodes(g);
  const std::vector<std::pair<int, int>> expect{{1, 3}, {3, 3}, {2, 2}, {0, 1}, {4, 1}};
  CHECK(hubs == expect);
}

TEST_CASE("fitted curves") {
  std::mt19937_64 rng(3);
  const int n = 50, p = 3, q = 2;
  const Eigen::MatrixXd x = oracle::gaussian(n, p, rng);
  const std::vector<double> knots{-0.5, 0.5};
  auto u = build_basis(x, knots);
  u.center_columns();

  auto coef = [&](int rows) { return oracle::gaussian(rows, q, rng); };
  std::vector<CoefficientDraw> draws;
  draws.push_back({coef(6), {0, 2}, 3});
  draws.push_back({coef(3), {1}, 3});
  draws.push_back({coef(9), {0, 1, 2}, 3});

  const std::vector<double> grid{-1.0, -0.2, 0.0, 0.7, 1.3};
  const auto curve = fitted_curves(u, draws, 2, grid);
  REQUIRE(curve.draws_used == 2);
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const double v = grid[gi];
    for (int j = 0; j < q; ++j) {
      double total = 0.0;
      for (const auto& [d, offset] : {std::pair{0, 3}, std::pair{2, 6}}) {
        double f = 0.0;
        for (int s = 0; s < 3; ++s) {
          const double raw = s == 0 ? v : std::max(v - knots[s - 1], 0.0);
          double mean = 0.0;
          for (int r = 0; r < n; ++r) mean += s == 0 ? x(r, 2) : std::max(x(r, 2) - knots[s - 1], 0.0);
          mean /= n;
          f += (raw - mean) * draws[d].coefficients(offset + s, j);
        }
        total += f;
      }
      CHECK(curve.values(gi, j) == doctest::Approx(total / 2).epsilon(1e-12));
    }
  }
  std::vector<CoefficientDraw> without{draws[1]};
  CHECK(fitted_curves(u, without, 0, grid).empty());
  CHECK_THROWS_AS(fitted_curves(u, draws, 3, grid), InvalidArgument);
  std::vector<CoefficientDraw> wrong{{coef(2), {0}, 2}};
  CHECK_THROWS_AS(fitted_curves(u, wrong, 0, grid), InvalidArgument);
}

TEST_CASE("ROC area equals the Mann-Whitney statistic") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const int q = 3 + t % 9;
    Eigen::MatrixXd prob = Eigen::MatrixXd::Zero(q, q);
    Eigen::MatrixXi truth = Eigen::MatrixXi::Identity(q, q);
    int pos = 0, neg = 0;
    for (int i = 0; i < q; ++i)
      for (int j = i + 1; j < q; ++j) {
        // Coarse values so ties occur.
        prob(i, j) = prob(j, i) = std::round(unif(rng) * 8) / 8;
        const bool e = unif(rng) < 0.3 + 0.3 * prob(i, j);
        truth(i, j) = truth(j, i) = e;
        (e ? pos : neg) += 1;
      }
    if (pos == 0 || neg == 0) {
      CHECK_THROWS_AS(roc_curve(prob, truth), InvalidArgument);
      continue;
    }
    const auto roc = roc_curve(prob, truth);
    CHECK(roc.auc == doctest::Approx(oracle::mann_whitney_auc(prob, truth)).epsilon(1e-12));
    CHECK(roc.fpr.front() == 0.0);
    CHECK(roc.tpr.front() == 0.0);
    CHECK(roc.fpr.back() == 1.0);
    CHECK(roc.tpr.back() == 1.0);
    for (std::size_t k = 1; k < roc.fpr.size(); ++k) {
      CHECK(roc.fpr[k] >= roc.fpr[k - 1]);
      CHECK(roc.tpr[k] >= roc.tpr[k - 1]);
      CHECK(roc.thresholds[k] < roc.thresholds[k - 1]);
    }
    // Any strictly increasing transform of the scores leaves the area unchanged.
    const Eigen::MatrixXd warped = prob.array().pow(3.0).exp();
    CHECK(roc_curve(warped, truth).auc == doctest::Approx(roc.auc).epsilon(1e-12));
  }

  Eigen::MatrixXi truth = Eigen::MatrixXi::Zero(3, 3);
  truth(0, 1) = truth(1, 0) = 1;
  Eigen::MatrixXd perfect = Eigen::MatrixXd::Zero(3, 3);
  perfect(0, 1) = perfect(1, 0) = 0.9;
  CHECK(roc_curve(perfect, truth).auc == 1.0);
  CHECK(roc_curve(Eigen::MatrixXd::Constant(3, 3, 0.4), truth).auc == 0.5);
  Eigen::MatrixXi lopsided = truth;
  lopsided(1, 0) = 0;
  CHECK_THROWS_AS(roc_curve(perfect, lopsided), InvalidArgument);
  CHECK_THROWS_AS(roc_curve(Eigen::MatrixXd::Zero(2, 2), truth), InvalidArgument);
}

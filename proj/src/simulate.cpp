#include "cggm/simulate.hpp"

#include <cmath>

#include "cggm/errors.hpp"
#include "cggm/hiw.hpp"

namespace cggm {

EffectKind parse_effect(const std::string& name) {
  if (name == "sin") return EffectKind::sin;
  if (name == "linear") return EffectKind::linear;
  if (name == "exp") return EffectKind::exp;
  throw InvalidArgument("unknown effect kind '" + name + "' (expected sin, linear or exp)");
}

std::string effect_name(EffectKind kind) {
  switch (kind) {
    case EffectKind::sin: return "sin";
    case EffectKind::linear: return "linear";
    case EffectKind::exp: return "exp";
  }
  return "?";
}

double apply_effect(EffectKind kind, double x) {
  switch (kind) {
    case EffectKind::sin: return std::sin(x);
    case EffectKind::linear: return x;
    case EffectKind::exp: return std::exp(x);
  }
  return 0.0;
}

void SimulationSpec::validate() const {
  if (n < 1 || p < 0 || q < 1) throw InvalidArgument("simulation: n and q must be positive, p non-negative");
  if (support.size() != effects.size()) throw InvalidArgument("simulation: one effect kind per true predictor");
  for (int s : support)
    if (s < 0 || s >= p) throw InvalidArgument("simulation: support index out of range");
  if (graph) {
    if (graph->node_count() != q) throw InvalidArgument("simulation: graph size differs from q");
    if (!is_decomposable(*graph)) throw InvalidArgument("simulation: truth graph is not decomposable");
  }
  if (graph_edges > q * (q - 1) / 2) throw InvalidArgument("simulation: too many target edges");
  if (!(hiw_b > 2.0) || !(hiw_scale > 0.0)) throw InvalidArgument("simulation: invalid HIW parameters");
  if (fixed_sigma && (fixed_sigma->rows() != q || fixed_sigma->cols() != q)) {
    throw InvalidArgument("simulation: fixed sigma must be q x q");
  }
}

SimulationSpec SimulationSpec::full_scale() {
  SimulationSpec s;
  s.n = 700;
  s.p = 30;
  s.q = 40;
  s.support = {4, 10, 16, 23};
  s.effects = {EffectKind::sin, EffectKind::sin, EffectKind::linear, EffectKind::exp};
  return s;
}

DecomposableGraph random_decomposable_graph(int node_count, int target_edges, std::mt19937_64& rng) {
  const int max_edges = node_count * (node_count - 1) / 2;
  if (target_edges < 0 || target_edges > max_edges) {
    throw InvalidArgument("random_decomposable_graph: target edge count out of range");
  }
  Graph g(node_count);
  while (g.edge_count() < target_edges) {
    std::vector<Edge> candidates;
    for (int i = 0; i < node_count; ++i) {
      for (int j = i + 1; j < node_count; ++j) {
        if (g.has_edge(i, j)) continue;
        g.set_edge(i, j, true);
        if (is_decomposable(g)) candidates.emplace_back(i, j);
        g.set_edge(i, j, false);
      }
    }
    if (candidates.empty()) break;
    const auto pick = std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng);
    g.set_edge(candidates[pick].first, candidates[pick].second, true);
  }
  return DecomposableGraph(std::move(g));
}

SimulatedData generate(const SimulationSpec& spec, std::mt19937_64& rng) {
  spec.validate();
  SimulatedData out;
  SimulationTruth& truth = out.truth;
  truth.support = InclusionVector::from_indices(spec.p, spec.support);

  if (spec.graph) {
    truth.graph = DecomposableGraph(*spec.graph);
  } else {
    const int target = spec.graph_edges >= 0 ? spec.graph_edges : std::min(spec.q, spec.q * (spec.q - 1) / 2);
    truth.graph = random_decomposable_graph(spec.q, target, rng);
  }
  if (spec.fixed_sigma) {
    truth.sigma = *spec.fixed_sigma;
  } else {
    HiwParams params{spec.hiw_b, spec.hiw_scale * Eigen::MatrixXd::Identity(spec.q, spec.q), truth.graph};
    truth.sigma = sample_hiw(params, rng).sigma;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(truth.sigma);
  if (llt.info() != Eigen::Success) throw NumericError("simulation: noise covariance is not positive definite");
  const Eigen::MatrixXd noise_factor = llt.matrixL();

  const auto t = static_cast<Eigen::Index>(spec.support.size());
  truth.coefficients.resize(spec.q, t);
  std::exponential_distribution<double> expo(1.0);
  std::bernoulli_distribution coin(0.5);
  for (Eigen::Index j = 0; j < spec.q; ++j) {
    for (Eigen::Index s = 0; s < t; ++s) {
      double h = expo(rng);
      if (spec.random_signs && coin(rng)) h = -h;
      truth.coefficients(j, s) = h;
    }
  }

  out.x.resize(spec.n, spec.p);
  out.y.resize(spec.n, spec.q);
  truth.mean.resize(spec.n, spec.q);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::VectorXd e(spec.q);
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    for (Eigen::Index c = 0; c < spec.p; ++c) out.x(i, c) = unif(rng);
    for (Eigen::Index c = 0; c < spec.q; ++c) e(c) = z(rng);
    const Eigen::VectorXd noise = noise_factor * e;
    for (Eigen::Index j = 0; j < spec.q; ++j) {
      double f = 0.0;
      for (Eigen::Index s = 0; s < t; ++s) {
        f += truth.coefficients(j, s) * apply_effect(spec.effects[s], out.x(i, spec.support[s]));
      }
      truth.mean(i, j) = f;
      out.y(i, j) = f + noise(j);
    }
  }
  return out;
}

SimulatedData generate(const SimulationSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  return generate(spec, rng);
}

}  // namespace cggm

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cggm/graph.hpp"
#include "cggm/inclusion.hpp"

namespace cggm {

enum class EffectKind { sin, linear, exp };

EffectKind parse_effect(const std::string& name);
std::string effect_name(EffectKind kind);
double apply_effect(EffectKind kind, double x);

struct SimulationSpec {
  int n = 300;
  int p = 10;
  int q = 8;
  std::vector<int> support;          // 0-based predictor indices
  std::vector<EffectKind> effects;   // one per support entry
  std::optional<Graph> graph;        // explicit truth; must be chordal
  int graph_edges = -1;              // random chordal truth with this many edges (-1: q)
  double hiw_b = 3.0;
  double hiw_scale = 1.0;            // D = hiw_scale * I
  std::optional<Eigen::MatrixXd> fixed_sigma;  // bypass the HIW draw
  bool random_signs = false;         // flip each Exp(1) coefficient's sign w.p. 1/2
  std::uint64_t seed = 1;

  void validate() const;
  /// p = 30, q = 40, n = 700, support {5, 11, 17, 24} (1-based) with effects
  /// {sin, sin, linear, exp}.
  static SimulationSpec full_scale();
};

struct SimulationTruth {
  InclusionVector support;
  DecomposableGraph graph;
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd coefficients;  // q x |support|
  Eigen::MatrixXd mean;          // F(X), n x q
};

struct SimulatedData {
  Eigen::MatrixXd x;  // n x p, U(-1, 1)
  Eigen::MatrixXd y;  // n x q
  SimulationTruth truth;
};

/// Truth (graph, Sigma, coefficients) is drawn first, then rows (x_i, e_i) in
/// order, so a larger n with the same seed extends a smaller one.
SimulatedData generate(const SimulationSpec& spec, std::mt19937_64& rng);
SimulatedData generate(const SimulationSpec& spec);

/// Grows from the empty graph by uniformly chosen chordality-preserving
/// additions until `target_edges` or until no addition is possible.
DecomposableGraph random_decomposable_graph(int node_count, int target_edges, std::mt19937_64& rng);

}  // namespace cggm

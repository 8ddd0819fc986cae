#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cggm/graph.hpp"
#include "cggm/hiw.hpp"
#include "cggm/sampler.hpp"
#include "cggm/spline.hpp"

namespace cggm {

/// Fraction of recorded iterations containing each edge, pooled over traces
/// with equal weight per record. Throws InvalidArgument on an empty trace.
Eigen::MatrixXd edge_probabilities(std::span<const ChainTrace> traces);
Eigen::MatrixXd edge_probabilities(const ChainTrace& trace);

/// Fraction of recorded iterations with gamma_i = 1.
Eigen::VectorXd inclusion_probabilities(std::span<const ChainTrace> traces);
Eigen::VectorXd inclusion_probabilities(const ChainTrace& trace);

/// Edges with probability strictly above the cutoff. Not necessarily chordal.
Graph select_graph(const Eigen::MatrixXd& edge_prob, double cutoff = 0.5);

/// rho_ij = -k_ij / sqrt(k_ii k_jj) for one precision matrix; unit diagonal.
Eigen::MatrixXd partial_correlation(const Eigen::MatrixXd& precision);
/// Posterior mean of the per-draw partial correlations.
Eigen::MatrixXd partial_correlations(std::span<const CovarianceDraw> draws);

/// (node, degree) sorted by degree descending, then node index.
std::vector<std::pair<int, int>> hub_nodes(const Graph& g);

struct FittedCurves {
  std::vector<double> grid;
  Eigen::MatrixXd values;  // grid.size() x q
  int draws_used = 0;
  bool empty() const noexcept { return draws_used == 0; }
};

/// Posterior mean of f_ij(x) = sum_s (basis_s(x) - offset_s) beta_{j,i,s}
/// over the draws in which predictor i is selected. Empty when it never is.
FittedCurves fitted_curves(const DesignMatrix& design, std::span<const CoefficientDraw> draws, int predictor,
                           const std::vector<double>& grid);

struct RocCurve {
  std::vector<double> fpr;
  std::vector<double> tpr;
  std::vector<double> thresholds;  // threshold for each point; +inf for (0,0)
  double auc = 0.0;
};

/// Step ROC over the q(q-1)/2 off-diagonal pairs, thresholding at every
/// observed probability; AUC by the trapezoid rule. Throws InvalidArgument on a
/// non-symmetric truth or when the truth has no positives or no negatives.
RocCurve roc_curve(const Eigen::MatrixXd& edge_prob, const Eigen::MatrixXi& truth);

}  // namespace cggm

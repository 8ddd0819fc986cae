#pragma once

// Hyper-inverse Wishart draws and conditional draws of (Sigma, B).
//
// Degrees follow the clique density convention used throughout the library:
// Sigma_C ~ IW(b, D_C) has density proportional to
//   |Sigma_C|^{-(b + 2|C|)/2} etr(-Sigma_C^{-1} D_C / 2),
// i.e. a conventional inverse Wishart with b + |C| - 1 degrees of freedom and
// mean D_C / (b - 2). The conversion happens only in sample_inverse_wishart's
// callers; nothing else in the code sees conventional degrees.

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "cggm/graph.hpp"
#include "cggm/likelihood.hpp"

namespace cggm {

struct HiwParams {
  double b = 3.0;
  Eigen::MatrixXd scale;  // D, symmetric positive definite
  DecomposableGraph graph;
};

struct CovarianceDraw {
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd precision;  // exact zeros on non-edges
};

/// Rows follow U_gamma's column order: for each selected predictor (ascending)
/// its group_size basis coefficients.
struct CoefficientDraw {
  Eigen::MatrixXd coefficients;  // p_gamma (k+1) x q
  std::vector<int> predictors;
  int group_size = 1;
};

/// Conventional IW(dof, scale): Sigma^{-1} ~ Wishart(dof, scale^{-1}).
Eigen::MatrixXd sample_inverse_wishart(double dof, const Eigen::MatrixXd& scale, std::mt19937_64& rng);

/// Sequential clique-by-clique draw along the junction tree; entries outside
/// the cliques are completed so the precision vanishes off the graph.
CovarianceDraw sample_hiw(const HiwParams& params, std::mt19937_64& rng);

/// Sigma | Y, gamma, G ~ HIW_G(b + n, d I + S(gamma)).
CovarianceDraw sample_posterior_sigma(const Eigen::MatrixXd& s, int n, const DecomposableGraph& g,
                                      const Hyperparameters& hyper, std::mt19937_64& rng);
CovarianceDraw sample_posterior_sigma(const ModelData& data, const InclusionVector& gamma,
                                      const DecomposableGraph& g, const Hyperparameters& hyper,
                                      std::mt19937_64& rng);

/// B | Y, gamma, Sigma ~ MN(c (U'U)^{-1} U'Y, c (U'U)^{-1}, Sigma), c = g/(g+1).
CoefficientDraw sample_posterior_B(const ModelData& data, const QuadForm& qf, const InclusionVector& gamma,
                                   const CovarianceDraw& sigma, const Hyperparameters& hyper,
                                   std::mt19937_64& rng);
CoefficientDraw sample_posterior_B(const ModelData& data, const InclusionVector& gamma,
                                   const CovarianceDraw& sigma, const Hyperparameters& hyper,
                                   std::mt19937_64& rng);

/// Posterior mean of B, c (U'U)^{-1} U'Y.
Eigen::MatrixXd posterior_mean_B(const ModelData& data, const QuadForm& qf, const Hyperparameters& hyper);

/// sum_C (Sbar_C)^{-1}|_0 - sum_S (Sbar_S)^{-1}|_0, the G-constrained MLE of
/// the precision. Also used to assemble the precision of a HIW draw.
Eigen::MatrixXd mle_precision(const Eigen::MatrixXd& sbar, const DecomposableGraph& g);
Eigen::MatrixXd mle_precision(const Eigen::MatrixXd& sbar, const JunctionTree& tree);

}  // namespace cggm

#pragma once

// Collapsed marginal likelihood f(Y | gamma, G) with B and Sigma integrated
// out, factorised over the cliques and separators of a decomposable graph.
// Everything is evaluated in log space; determinants come from Cholesky.

#include <cstddef>
#include <list>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "cggm/graph.hpp"
#include "cggm/inclusion.hpp"
#include "cggm/kernels.hpp"
#include "cggm/spline.hpp"

namespace cggm {

struct Hyperparameters {
  double g = 1.0;            // g-prior scale
  double b = 3.0;            // HIW degrees
  double d = 1.0;            // HIW scale d * I
  double delta = 0.5;        // gamma add probability
  double eta = 0.5;          // edge add probability
  double alpha_graph = 0.5;  // Bernoulli edge prior
  bool ridge_jitter = false; // add 1e-8 * trace/dim to U_g^T U_g

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
  /// g = n, b = 3, d = 1, delta = eta = 1/2, alpha = min(2/(q-1), 1/2).
  static Hyperparameters defaults(int n, int q);
};

/// Response matrix, spline design and the cross products every gamma needs.
class ModelData {
 public:
  ModelData(Eigen::MatrixXd y, DesignMatrix u,
            kernels::Backend backend = kernels::Backend::openmp);

  int n() const noexcept { return static_cast<int>(y_.rows()); }
  int q() const noexcept { return static_cast<int>(y_.cols()); }
  int p() const noexcept { return u_.predictor_count(); }
  int group_size() const noexcept { return u_.group_size(); }

  const Eigen::MatrixXd& y() const noexcept { return y_; }
  const DesignMatrix& design() const noexcept { return u_; }
  const Eigen::MatrixXd& yty() const noexcept { return yty_; }
  const Eigen::MatrixXd& utu() const noexcept { return utu_; }
  const Eigen::MatrixXd& uty() const noexcept { return uty_; }

 private:
  Eigen::MatrixXd y_;
  DesignMatrix u_;
  Eigen::MatrixXd yty_, utu_, uty_;
};

/// S(gamma) = Y^T (I - g/(g+1) P_gamma) Y together with the Cholesky factor
/// of U_gamma^T U_gamma it was built from.
struct QuadForm {
  Eigen::MatrixXd s;
  Eigen::MatrixXd gram_chol;  // lower triangular, rank x rank
  std::vector<int> columns;   // design columns in U_gamma order
  int rank() const noexcept { return static_cast<int>(columns.size()); }
};

/// Throws RankError when U_gamma^T U_gamma is numerically singular.
QuadForm quad_form(const ModelData& data, const InclusionVector& gamma, const Hyperparameters& hyper);

/// Bounded LRU cache of QuadForms keyed by gamma, for one fixed (data, g).
class QuadFormCache {
 public:
  explicit QuadFormCache(std::size_t capacity = 2048) : capacity_(capacity) {}
  std::shared_ptr<const QuadForm> get(const ModelData& data, const InclusionVector& gamma,
                                      const Hyperparameters& hyper);
  std::size_t hits() const noexcept { return hits_; }
  std::size_t misses() const noexcept { return misses_; }
  void clear();

 private:
  using Entry = std::pair<std::string, std::shared_ptr<const QuadForm>>;
  std::size_t capacity_;
  std::list<Entry> lru_;
  std::unordered_map<std::string, std::list<Entry>::iterator> index_;
  std::size_t hits_ = 0, misses_ = 0;
};

/// log Gamma_p(a) = p(p-1)/4 log(pi) + sum_j log Gamma(a + (1 - j)/2).
double log_multivariate_gamma(int dim, double a);

/// Cholesky log-determinant. One retry after symmetric averaging, then NumericError.
double log_det_spd(const Eigen::MatrixXd& m);

/// log of the per-component factor of M_{n,G} for a component of `size` nodes.
double component_log_normalizer(int size, int n, const Hyperparameters& hyper);
/// -((b + n + |A| - 1)/2) log|d I_A + S_A|.
double component_log_det(const NodeSet& nodes, const Eigen::MatrixXd& s, int n,
                         const Hyperparameters& hyper);

/// log M_{n,G}.
double log_normalizer(int n, int q, const JunctionTree& tree, const Hyperparameters& hyper);
double log_normalizer(int n, const DecomposableGraph& g, const Hyperparameters& hyper);

/// sum_C component_log_det - sum_S component_log_det.
double log_det_sum(const Eigen::MatrixXd& s, const JunctionTree& tree, int n,
                   const Hyperparameters& hyper);

/// -(rank q / 2) log(g + 1): the g-prior dimension penalty.
double dimension_penalty(int rank, int q, const Hyperparameters& hyper);

double log_marginal(const QuadForm& qf, int n, const JunctionTree& tree, const Hyperparameters& hyper);
double log_marginal(const ModelData& data, const InclusionVector& gamma, const DecomposableGraph& g,
                    const Hyperparameters& hyper);

/// log f(Y|gamma*,G) - log f(Y|gamma,G) without evaluating M_{n,G}.
double log_marginal_ratio_gamma(const QuadForm& current, const QuadForm& proposed, int n,
                                const JunctionTree& tree, const Hyperparameters& hyper);
double log_marginal_ratio_gamma(const ModelData& data, const InclusionVector& gamma,
                                const InclusionVector& proposed, const DecomposableGraph& g,
                                const Hyperparameters& hyper);

/// log f(Y|gamma,G*) - log f(Y|gamma,G) from the components that differ.
double log_marginal_ratio_graph(const QuadForm& qf, int n, const ComponentDiff& diff,
                                const Hyperparameters& hyper);
double log_marginal_ratio_graph(const ModelData& data, const InclusionVector& gamma,
                                const DecomposableGraph& g, const DecomposableGraph& proposed,
                                const Hyperparameters& hyper);

}  // namespace cggm

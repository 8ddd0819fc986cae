#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cggm/inclusion.hpp"
#include "cggm/kernels.hpp"

namespace cggm {

/// Truncated power basis of degree one: {x, (x - w_1)_+, ..., (x - w_k)_+}.
struct SplineBasis {
  std::vector<double> knots;  // strictly increasing; may be empty (pure linear)

  int group_size() const noexcept { return static_cast<int>(knots.size()) + 1; }
  /// Basis values at a single point, in group order.
  Eigen::VectorXd evaluate(double x) const;
};

/// k knots splitting (lo, hi) into k + 1 equal intervals.
std::vector<double> even_knots(int k, double lo, double hi);

/// U laid out block-by-basis: column s*p + i is basis function s of predictor i.
class DesignMatrix {
 public:
  DesignMatrix() = default;
  DesignMatrix(Eigen::MatrixXd values, int predictor_count, SplineBasis basis);

  const Eigen::MatrixXd& values() const noexcept { return values_; }
  int rows() const noexcept { return static_cast<int>(values_.rows()); }
  int predictor_count() const noexcept { return p_; }
  int group_size() const noexcept { return basis_.group_size(); }
  const SplineBasis& basis() const noexcept { return basis_; }

  /// Column indices of predictor i's group, basis order.
  std::vector<int> column_group(int predictor) const;
  /// Concatenated groups of the selected predictors, ascending predictor order.
  std::vector<int> selected_columns(const InclusionVector& gamma) const;

  /// Offsets subtracted from each column by center_columns (zeros otherwise).
  const Eigen::VectorXd& column_offsets() const noexcept { return offsets_; }
  /// Subtracts column means so the mean model carries no intercept.
  void center_columns();

 private:
  Eigen::MatrixXd values_;
  int p_ = 0;
  SplineBasis basis_;
  Eigen::VectorXd offsets_;
};

/// Throws InvalidArgument on non-finite entries or unsorted knots.
DesignMatrix build_basis(const Eigen::MatrixXd& x, const std::vector<double>& knots,
                         kernels::Backend backend = kernels::Backend::openmp);

/// n x p_gamma(k+1); n x 0 when nothing is selected.
Eigen::MatrixXd select_columns(const DesignMatrix& u, const InclusionVector& gamma);

/// Subtracts each column's mean in place and returns the means.
Eigen::VectorXd center(Eigen::MatrixXd& m);
/// Centers and scales each column to unit sample variance; returns (mean, sd).
std::pair<Eigen::VectorXd, Eigen::VectorXd> zscore(Eigen::MatrixXd& m);

}  // namespace cggm

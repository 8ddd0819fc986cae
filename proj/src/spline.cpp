#include "cggm/spline.hpp"

#include <cmath>

#include "cggm/errors.hpp"

namespace cggm {

Eigen::VectorXd SplineBasis::evaluate(double x) const {
  Eigen::VectorXd out(group_size());
  out(0) = x;
  for (std::size_t s = 0; s < knots.size(); ++s) out(s + 1) = std::max(x - knots[s], 0.0);
  return out;
}

std::vector<double> even_knots(int k, double lo, double hi) {
  if (k < 0) throw InvalidArgument("even_knots: negative knot count");
  if (!(hi > lo)) throw InvalidArgument("even_knots: empty range");
  std::vector<double> w(k);
  for (int s = 1; s <= k; ++s) w[s - 1] = lo + (hi - lo) * s / (k + 1);
  return w;
}

DesignMatrix::DesignMatrix(Eigen::MatrixXd values, int predictor_count, SplineBasis basis)
    : values_(std::move(values)), p_(predictor_count), basis_(std::move(basis)) {
  if (values_.cols() != static_cast<Eigen::Index>(p_) * basis_.group_size()) {
    throw InvalidArgument("DesignMatrix: column count does not match p(k+1)");
  }
  offsets_ = Eigen::VectorXd::Zero(values_.cols());
}

std::vector<int> DesignMatrix::column_group(int predictor) const {
  if (predictor < 0 || predictor >= p_) throw InvalidArgument("column_group: predictor out of range");
  std::vector<int> cols(group_size());
  for (int s = 0; s < group_size(); ++s) cols[s] = s * p_ + predictor;
  return cols;
}

std::vector<int> DesignMatrix::selected_columns(const InclusionVector& gamma) const {
  if (gamma.size() != p_) throw InvalidArgument("inclusion vector length differs from predictor count");
  std::vector<int> cols;
  cols.reserve(static_cast<std::size_t>(gamma.count()) * group_size());
  for (int i = 0; i < p_; ++i) {
    if (!gamma[i]) continue;
    for (int s = 0; s < group_size(); ++s) cols.push_back(s * p_ + i);
  }
  return cols;
}

void DesignMatrix::center_columns() { offsets_ += center(values_); }

DesignMatrix build_basis(const Eigen::MatrixXd& x, const std::vector<double>& knots,
                         kernels::Backend backend) {
  if (!x.allFinite()) throw InvalidArgument("build_basis: predictor matrix has non-finite entries");
  for (std::size_t s = 0; s < knots.size(); ++s) {
    if (!std::isfinite(knots[s])) throw InvalidArgument("build_basis: non-finite knot");
    if (s > 0 && !(knots[s] > knots[s - 1])) {
      throw InvalidArgument("build_basis: knots must be strictly increasing");
    }
  }
  Eigen::MatrixXd u;
  kernels::truncated_power_basis(x, knots, u, backend);
  return DesignMatrix(std::move(u), static_cast<int>(x.cols()), SplineBasis{knots});
}

Eigen::MatrixXd select_columns(const DesignMatrix& u, const InclusionVector& gamma) {
  const auto cols = u.selected_columns(gamma);
  Eigen::MatrixXd out(u.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(c) = u.values().col(cols[c]);
  return out;
}

Eigen::VectorXd center(Eigen::MatrixXd& m) {
  Eigen::VectorXd means = Eigen::VectorXd::Zero(m.cols());
  if (m.rows() == 0) return means;
  means = m.colwise().mean().transpose();
  m.rowwise() -= means.transpose();
  return means;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> zscore(Eigen::MatrixXd& m) {
  Eigen::VectorXd means = center(m);
  Eigen::VectorXd sd = Eigen::VectorXd::Ones(m.cols());
  if (m.rows() > 1) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double s = std::sqrt(m.col(c).squaredNorm() / static_cast<double>(m.rows() - 1));
      if (s > 0.0) {
        sd(c) = s;
        m.col(c) /= s;
      }
    }
  }
  return {means, sd};
}

}  // namespace cggm

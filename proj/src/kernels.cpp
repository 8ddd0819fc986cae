#include "cggm/kernels.hpp"

#include <omp.h>

#include <algorithm>

#include "cggm/errors.hpp"

namespace cggm::kernels {

namespace {

int g_thread_limit = 0;

int threads_for(long work) {
  int t = g_thread_limit > 0 ? g_thread_limit : omp_get_max_threads();
  return static_cast<int>(std::max<long>(1, std::min<long>(t, work)));
}

inline double dot_column(const Eigen::MatrixXd& a, Eigen::Index i, const Eigen::MatrixXd& b,
                         Eigen::Index j) {
  const double* x = a.col(i).data();
  const double* y = b.col(j).data();
  double s = 0.0;
  for (Eigen::Index r = 0; r < a.rows(); ++r) s += x[r] * y[r];
  return s;
}

inline void basis_row(const Eigen::MatrixXd& x, std::span<const double> knots, Eigen::MatrixXd& u,
                      Eigen::Index row) {
  const Eigen::Index p = x.cols();
  for (Eigen::Index i = 0; i < p; ++i) {
    const double v = x(row, i);
    u(row, i) = v;
    for (std::size_t s = 0; s < knots.size(); ++s) {
      const double h = v - knots[s];
      u(row, static_cast<Eigen::Index>(s + 1) * p + i) = h > 0.0 ? h : 0.0;
    }
  }
}

}  // namespace

void set_thread_limit(int threads) { g_thread_limit = threads; }
int thread_limit() { return g_thread_limit > 0 ? g_thread_limit : omp_get_max_threads(); }

Eigen::MatrixXd cross_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Backend backend) {
  if (a.rows() != b.rows()) throw InvalidArgument("cross_product: row counts differ");
  const Eigen::Index m = a.cols();
  const Eigen::Index n = b.cols();
  Eigen::MatrixXd c(m, n);
  if (backend == Backend::serial) {
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < m; ++i) c(i, j) = dot_column(a, i, b, j);
    return c;
  }
  const long cells = static_cast<long>(m) * n;
#pragma omp parallel for schedule(static) num_threads(threads_for(n))
  for (long cell = 0; cell < cells; ++cell) {
    const Eigen::Index j = cell / m;
    const Eigen::Index i = cell % m;
    c(i, j) = dot_column(a, i, b, j);
  }
  return c;
}

void truncated_power_basis(const Eigen::MatrixXd& x, std::span<const double> knots,
                           Eigen::MatrixXd& u, Backend backend) {
  const Eigen::Index n = x.rows();
  u.resize(n, x.cols() * static_cast<Eigen::Index>(knots.size() + 1));
  if (backend == Backend::serial) {
    for (Eigen::Index r = 0; r < n; ++r) basis_row(x, knots, u, r);
    return;
  }
#pragma omp parallel for schedule(static) num_threads(threads_for(n))
  for (Eigen::Index r = 0; r < n; ++r) basis_row(x, knots, u, r);
}

Eigen::MatrixXi count_edges(int node_count, const std::vector<std::vector<Edge>>& edge_lists,
                            Backend backend) {
  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(node_count, node_count);
  const long records = static_cast<long>(edge_lists.size());
  if (backend == Backend::serial) {
    for (const auto& edges : edge_lists)
      for (auto [i, j] : edges) ++counts(i, j);
  } else {
#pragma omp parallel num_threads(threads_for(records))
    {
      Eigen::MatrixXi local = Eigen::MatrixXi::Zero(node_count, node_count);
#pragma omp for schedule(static) nowait
      for (long r = 0; r < records; ++r)
        for (auto [i, j] : edge_lists[r]) ++local(i, j);
#pragma omp critical
      counts += local;
    }
  }
  for (int i = 0; i < node_count; ++i)
    for (int j = i + 1; j < node_count; ++j) {
      counts(i, j) += counts(j, i);
      counts(j, i) = counts(i, j);
    }
  return counts;
}

std::vector<long> count_bits(const std::vector<std::vector<std::uint8_t>>& rows, int cols,
                             Backend backend) {
  std::vector<long> sums(cols, 0);
  const long n = static_cast<long>(rows.size());
  if (backend == Backend::serial) {
    for (const auto& row : rows)
      for (int c = 0; c < cols; ++c) sums[c] += row[c] ? 1 : 0;
    return sums;
  }
#pragma omp parallel for schedule(static) num_threads(threads_for(cols))
  for (int c = 0; c < cols; ++c) {
    long s = 0;
    for (long r = 0; r < n; ++r) s += rows[r][c] ? 1 : 0;
    sums[c] = s;
  }
  return sums;
}

}  // namespace cggm::kernels

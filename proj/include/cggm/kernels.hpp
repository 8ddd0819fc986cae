#pragma once

// Data-parallel inner loops. Every kernel has a serial reference and an
// OpenMP version; the two produce bitwise-identical output because each
// output element is accumulated by one thread in a fixed order.

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cggm/graph.hpp"

namespace cggm::kernels {

enum class Backend { serial, openmp };

/// Thread cap for the OpenMP backend; <= 0 means the runtime default.
void set_thread_limit(int threads);
int thread_limit();

/// A^T B.
Eigen::MatrixXd cross_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                              Backend backend = Backend::openmp);

/// Fills U (n x p(k+1)) block-by-basis: column s*p + i holds x_i for s = 0
/// and (x_i - w_s)_+ for s >= 1.
void truncated_power_basis(const Eigen::MatrixXd& x, std::span<const double> knots,
                           Eigen::MatrixXd& u, Backend backend = Backend::openmp);

/// Per-pair counts of edge occurrence over a sequence of edge lists.
Eigen::MatrixXi count_edges(int node_count, const std::vector<std::vector<Edge>>& edge_lists,
                            Backend backend = Backend::openmp);

/// Column sums of a 0/1 matrix stored row-major as bytes (rows x cols).
std::vector<long> count_bits(const std::vector<std::vector<std::uint8_t>>& rows, int cols,
                             Backend backend = Backend::openmp);

}  // namespace cggm::kernels

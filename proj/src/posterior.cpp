#include "cggm/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cggm/errors.hpp"
#include "cggm/kernels.hpp"

namespace cggm {

Eigen::MatrixXd edge_probabilities(std::span<const ChainTrace> traces) {
  if (traces.empty()) throw InvalidArgument("edge_probabilities: no traces");
  const int q = traces.front().q;
  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(q, q);
  long records = 0;
  for (const auto& t : traces) {
    if (t.q != q) throw InvalidArgument("edge_probabilities: traces disagree on q");
    std::vector<std::vector<Edge>> lists;
    lists.reserve(t.records.size());
    for (const auto& r : t.records) lists.push_back(r.edges);
    counts += kernels::count_edges(q, lists);
    records += static_cast<long>(t.records.size());
  }
  if (records == 0) throw InvalidArgument("edge_probabilities: empty trace");
  Eigen::MatrixXd prob = counts.cast<double>() / static_cast<double>(records);
  prob.diagonal().setZero();
  return prob;
}

Eigen::MatrixXd edge_probabilities(const ChainTrace& trace) {
  return edge_probabilities(std::span<const ChainTrace>(&trace, 1));
}

Eigen::VectorXd inclusion_probabilities(std::span<const ChainTrace> traces) {
  if (traces.empty()) throw InvalidArgument("inclusion_probabilities: no traces");
  const int p = traces.front().p;
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(p);
  long records = 0;
  for (const auto& t : traces) {
    if (t.p != p) throw InvalidArgument("inclusion_probabilities: traces disagree on p");
    std::vector<std::vector<std::uint8_t>> rows;
    rows.reserve(t.records.size());
    for (const auto& r : t.records) rows.push_back(r.gamma);
    const auto counts = kernels::count_bits(rows, p);
    for (int i = 0; i < p; ++i) sums(i) += static_cast<double>(counts[i]);
    records += static_cast<long>(t.records.size());
  }
  if (records == 0) throw InvalidArgument("inclusion_probabilities: empty trace");
  return sums / static_cast<double>(records);
}

Eigen::VectorXd inclusion_probabilities(const ChainTrace& trace) {
  return inclusion_probabilities(std::span<const ChainTrace>(&trace, 1));
}

Graph select_graph(const Eigen::MatrixXd& edge_prob, double cutoff) {
  if (edge_prob.rows() != edge_prob.cols()) throw InvalidArgument("select_graph: matrix is not square");
  if (!(cutoff > 0.0 && cutoff < 1.0)) throw InvalidArgument("select_graph: cutoff must lie in (0,1)");
  const int q = static_cast<int>(edge_prob.rows());
  Graph g(q);
  for (int i = 0; i < q; ++i)
    for (int j = i + 1; j < q; ++j)
      if (edge_prob(i, j) > cutoff) g.set_edge(i, j, true);
  return g;
}

Eigen::MatrixXd partial_correlation(const Eigen::MatrixXd& precision) {
  const Eigen::Index q = precision.rows();
  Eigen::MatrixXd rho = Eigen::MatrixXd::Identity(q, q);
  for (Eigen::Index i = 0; i < q; ++i)
    for (Eigen::Index j = 0; j < q; ++j)
      if (i != j) rho(i, j) = -precision(i, j) / std::sqrt(precision(i, i) * precision(j, j));
  return rho;
}

Eigen::MatrixXd partial_correlations(std::span<const CovarianceDraw> draws) {
  if (draws.empty()) throw InvalidArgument("partial_correlations: no draws");
  const Eigen::Index q = draws.front().precision.rows();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(q, q);
  for (const auto& d : draws) sum += partial_correlation(d.precision);
  return sum / static_cast<double>(draws.size());
}

std::vector<std::pair<int, int>> hub_nodes(const Graph& g) {
  std::vector<std::pair<int, int>> out;
  for (int v = 0; v < g.node_count(); ++v) out.emplace_back(v, g.degree(v));
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

FittedCurves fitted_curves(const DesignMatrix& design, std::span<const CoefficientDraw> draws, int predictor,
                           const std::vector<double>& grid) {
  if (predictor < 0 || predictor >= design.predictor_count()) {
    throw InvalidArgument("fitted_curves: predictor out of range");
  }
  FittedCurves out;
  out.grid = grid;
  const auto group = design.column_group(predictor);
  const int k1 = design.group_size();

  Eigen::MatrixXd basis(static_cast<Eigen::Index>(grid.size()), k1);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const Eigen::VectorXd row = design.basis().evaluate(grid[g]);
    for (int s = 0; s < k1; ++s) basis(g, s) = row(s) - design.column_offsets()(group[s]);
  }

  Eigen::MatrixXd sum;
  for (const auto& d : draws) {
    const auto it = std::find(d.predictors.begin(), d.predictors.end(), predictor);
    if (it == d.predictors.end()) continue;
    if (d.group_size != k1) throw InvalidArgument("fitted_curves: draw basis size differs from design");
    const auto block = static_cast<Eigen::Index>(it - d.predictors.begin()) * k1;
    const Eigen::MatrixXd curve = basis * d.coefficients.middleRows(block, k1);
    if (sum.size() == 0) sum = Eigen::MatrixXd::Zero(curve.rows(), curve.cols());
    sum += curve;
    ++out.draws_used;
  }
  if (out.draws_used > 0) out.values = sum / static_cast<double>(out.draws_used);
  return out;
}

RocCurve roc_curve(const Eigen::MatrixXd& edge_prob, const Eigen::MatrixXi& truth) {
  const Eigen::Index q = truth.rows();
  if (truth.cols() != q || edge_prob.rows() != q || edge_prob.cols() != q) {
    throw InvalidArgument("roc_curve: dimension mismatch");
  }
  std::vector<std::pair<double, bool>> pairs;
  long positives = 0;
  for (Eigen::Index i = 0; i < q; ++i) {
    for (Eigen::Index j = i + 1; j < q; ++j) {
      if ((truth(i, j) != 0) != (truth(j, i) != 0)) throw InvalidArgument("roc_curve: truth is not symmetric");
      const bool edge = truth(i, j) != 0;
      pairs.emplace_back(edge_prob(i, j), edge);
      positives += edge ? 1 : 0;
    }
  }
  const long negatives = static_cast<long>(pairs.size()) - positives;
  if (positives == 0 || negatives == 0) {
    throw InvalidArgument("roc_curve: truth needs at least one edge and one non-edge");
  }
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  RocCurve roc;
  roc.fpr.push_back(0.0);
  roc.tpr.push_back(0.0);
  roc.thresholds.push_back(std::numeric_limits<double>::infinity());
  long tp = 0, fp = 0;
  for (std::size_t k = 0; k < pairs.size();) {
    const double threshold = pairs[k].first;
    for (; k < pairs.size() && pairs[k].first == threshold; ++k) (pairs[k].second ? tp : fp) += 1;
    const double x = static_cast<double>(fp) / negatives;
    const double y = static_cast<double>(tp) / positives;
    roc.auc += 0.5 * (x - roc.fpr.back()) * (y + roc.tpr.back());
    roc.fpr.push_back(x);
    roc.tpr.push_back(y);
    roc.thresholds.push_back(threshold);
  }
  return roc;
}

}  // namespace cggm

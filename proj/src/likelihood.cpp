#include "cggm/likelihood.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "cggm/errors.hpp"

namespace cggm {

void Hyperparameters::validate() const {
  auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!(g > 0.0) || !std::isfinite(g)) throw InvalidArgument("hyperparameter g must be positive");
  // b = 3 is the customary default; the HIW mean needs b > 2.
  if (!(b > 2.0) || !std::isfinite(b)) throw InvalidArgument("hyperparameter b must exceed 2");
  if (!(d > 0.0) || !std::isfinite(d)) throw InvalidArgument("hyperparameter d must be positive");
  if (!open_unit(delta)) throw InvalidArgument("hyperparameter delta must lie in (0,1)");
  if (!open_unit(eta)) throw InvalidArgument("hyperparameter eta must lie in (0,1)");
  if (!open_unit(alpha_graph)) throw InvalidArgument("hyperparameter alpha_graph must lie in (0,1)");
}

Hyperparameters Hyperparameters::defaults(int n, int q) {
  Hyperparameters h;
  h.g = std::max(n, 1);
  h.alpha_graph = q > 1 ? std::min(2.0 / (q - 1), 0.5) : 0.5;
  return h;
}

ModelData::ModelData(Eigen::MatrixXd y, DesignMatrix u, kernels::Backend backend)
    : y_(std::move(y)), u_(std::move(u)) {
  if (y_.rows() == 0 || y_.cols() == 0) throw InvalidArgument("ModelData: empty response matrix");
  if (u_.rows() != y_.rows()) throw InvalidArgument("ModelData: Y and U row counts differ");
  if (!y_.allFinite()) throw InvalidArgument("ModelData: response matrix has non-finite entries");
  yty_ = kernels::cross_product(y_, y_, backend);
  utu_ = kernels::cross_product(u_.values(), u_.values(), backend);
  uty_ = kernels::cross_product(u_.values(), y_, backend);
}

QuadForm quad_form(const ModelData& data, const InclusionVector& gamma, const Hyperparameters& hyper) {
  QuadForm out;
  out.columns = data.design().selected_columns(gamma);
  const Eigen::Index r = out.rank();
  if (r == 0) {
    out.s = data.yty();
    return out;
  }
  Eigen::MatrixXd gram(r, r);
  Eigen::MatrixXd cross(r, data.q());
  for (Eigen::Index a = 0; a < r; ++a) {
    cross.row(a) = data.uty().row(out.columns[a]);
    for (Eigen::Index b = 0; b < r; ++b) gram(a, b) = data.utu()(out.columns[a], out.columns[b]);
  }
  if (hyper.ridge_jitter) gram.diagonal().array() += 1e-8 * gram.trace() / static_cast<double>(r);

  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  bool singular = llt.info() != Eigen::Success || r > data.n();
  if (!singular) {
    const Eigen::MatrixXd& l = llt.matrixLLT();
    // Squared pivot over diagonal is 1 - R^2 of that column on the earlier ones.
    for (Eigen::Index a = 0; a < r && !singular; ++a) {
      singular = !(l(a, a) * l(a, a) > 1e-10 * gram(a, a));
    }
  }
  if (singular) {
    throw RankError("U_gamma^T U_gamma is rank deficient for gamma=" + gamma.key(), gamma.bits());
  }
  out.gram_chol = llt.matrixL();
  const Eigen::MatrixXd w = llt.matrixL().solve(cross);
  const double shrink = hyper.g / (hyper.g + 1.0);
  out.s = data.yty() - shrink * (w.transpose() * w);
  out.s = 0.5 * (out.s + out.s.transpose()).eval();
  return out;
}

std::shared_ptr<const QuadForm> QuadFormCache::get(const ModelData& data, const InclusionVector& gamma,
                                                   const Hyperparameters& hyper) {
  auto key = gamma.key();
  if (auto it = index_.find(key); it != index_.end()) {
    ++hits_;
    lru_.splice(lru_.begin(), lru_, it->second);
    return it->second->second;
  }
  ++misses_;
  auto qf = std::make_shared<const QuadForm>(quad_form(data, gamma, hyper));
  lru_.emplace_front(key, qf);
  index_[std::move(key)] = lru_.begin();
  if (lru_.size() > capacity_) {
    index_.erase(lru_.back().first);
    lru_.pop_back();
  }
  return qf;
}

void QuadFormCache::clear() {
  lru_.clear();
  index_.clear();
}

double log_multivariate_gamma(int dim, double a) {
  if (dim < 0 || !(a > 0.5 * (dim - 1))) throw InvalidArgument("log_multivariate_gamma: need a > (dim - 1)/2");
  double out = 0.25 * dim * (dim - 1) * std::log(std::numbers::pi);
  for (int j = 1; j <= dim; ++j) out += boost::math::lgamma(a + 0.5 * (1 - j));
  return out;
}

double log_det_spd(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    llt.compute(0.5 * (m + m.transpose()));
    if (llt.info() != Eigen::Success) throw NumericError("log_det_spd: matrix is not positive definite");
  }
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double component_log_normalizer(int size, int n, const Hyperparameters& hyper) {
  if (size == 0) return 0.0;
  const double m = size;
  const double prior_shape = 0.5 * (hyper.b + m - 1.0);
  const double post_shape = 0.5 * (hyper.b + n + m - 1.0);
  return prior_shape * m * std::log(hyper.d) + 0.5 * n * m * std::numbers::ln2 -
         log_multivariate_gamma(size, prior_shape) + log_multivariate_gamma(size, post_shape);
}

double component_log_det(const NodeSet& nodes, const Eigen::MatrixXd& s, int n,
                         const Hyperparameters& hyper) {
  const auto m = static_cast<Eigen::Index>(nodes.size());
  if (m == 0) return 0.0;
  Eigen::MatrixXd block(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) block(a, b) = s(nodes[a], nodes[b]);
  block.diagonal().array() += hyper.d;
  return -0.5 * (hyper.b + n + m - 1.0) * log_det_spd(block);
}

double log_normalizer(int n, int q, const JunctionTree& tree, const Hyperparameters& hyper) {
  double out = -0.5 * n * q * std::log(2.0 * std::numbers::pi);
  for (const auto& c : tree.cliques) out += component_log_normalizer(static_cast<int>(c.size()), n, hyper);
  for (const auto& s : tree.separators) out -= component_log_normalizer(static_cast<int>(s.size()), n, hyper);
  return out;
}

double log_normalizer(int n, const DecomposableGraph& g, const Hyperparameters& hyper) {
  return log_normalizer(n, g.node_count(), junction_tree(g), hyper);
}

double log_det_sum(const Eigen::MatrixXd& s, const JunctionTree& tree, int n,
                   const Hyperparameters& hyper) {
  double out = 0.0;
  for (const auto& c : tree.cliques) out += component_log_det(c, s, n, hyper);
  for (const auto& sep : tree.separators) out -= component_log_det(sep, s, n, hyper);
  return out;
}

double dimension_penalty(int rank, int q, const Hyperparameters& hyper) {
  return -0.5 * rank * q * std::log1p(hyper.g);
}

double log_marginal(const QuadForm& qf, int n, const JunctionTree& tree, const Hyperparameters& hyper) {
  const int q = static_cast<int>(qf.s.rows());
  return log_normalizer(n, q, tree, hyper) + dimension_penalty(qf.rank(), q, hyper) +
         log_det_sum(qf.s, tree, n, hyper);
}

double log_marginal(const ModelData& data, const InclusionVector& gamma, const DecomposableGraph& g,
                    const Hyperparameters& hyper) {
  if (g.node_count() != data.q()) throw InvalidArgument("log_marginal: graph size differs from q");
  return log_marginal(quad_form(data, gamma, hyper), data.n(), junction_tree(g), hyper);
}

double log_marginal_ratio_gamma(const QuadForm& current, const QuadForm& proposed, int n,
                                const JunctionTree& tree, const Hyperparameters& hyper) {
  const int q = static_cast<int>(current.s.rows());
  return dimension_penalty(proposed.rank(), q, hyper) - dimension_penalty(current.rank(), q, hyper) +
         log_det_sum(proposed.s, tree, n, hyper) - log_det_sum(current.s, tree, n, hyper);
}

double log_marginal_ratio_gamma(const ModelData& data, const InclusionVector& gamma,
                                const InclusionVector& proposed, const DecomposableGraph& g,
                                const Hyperparameters& hyper) {
  if (gamma == proposed) return 0.0;
  return log_marginal_ratio_gamma(quad_form(data, gamma, hyper), quad_form(data, proposed, hyper),
                                  data.n(), junction_tree(g), hyper);
}

double log_marginal_ratio_graph(const QuadForm& qf, int n, const ComponentDiff& diff,
                                const Hyperparameters& hyper) {
  auto term = [&](const NodeSet& a) {
    return component_log_normalizer(static_cast<int>(a.size()), n, hyper) +
           component_log_det(a, qf.s, n, hyper);
  };
  double out = 0.0;
  for (const auto& c : diff.added_cliques) out += term(c);
  for (const auto& s : diff.added_separators) out -= term(s);
  for (const auto& c : diff.removed_cliques) out -= term(c);
  for (const auto& s : diff.removed_separators) out += term(s);
  return out;
}

double log_marginal_ratio_graph(const ModelData& data, const InclusionVector& gamma,
                                const DecomposableGraph& g, const DecomposableGraph& proposed,
                                const Hyperparameters& hyper) {
  if (g == proposed) return 0.0;
  Edge toggled{-1, -1};
  for (int i = 0; i < g.node_count() && toggled.first < 0; ++i)
    for (int j = i + 1; j < g.node_count(); ++j)
      if (g.has_edge(i, j) != proposed.has_edge(i, j)) {
        toggled = {i, j};
        break;
      }
  const auto diff = affected_components(g, proposed, toggled);
  return log_marginal_ratio_graph(quad_form(data, gamma, hyper), data.n(), diff, hyper);
}

}  // namespace cggm

#include "cggm/hiw.hpp"

#include <algorithm>
#include <cmath>

#include "cggm/errors.hpp"

namespace cggm {

namespace {

Eigen::MatrixXd principal(const Eigen::MatrixXd& m, const NodeSet& rows, const NodeSet& cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b) out(a, b) = m(rows[a], cols[b]);
  return out;
}

Eigen::LLT<Eigen::MatrixXd> checked_llt(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    llt.compute(0.5 * (m + m.transpose()));
    if (llt.info() != Eigen::Success) throw NumericError(std::string(what) + ": matrix is not positive definite");
  }
  return llt;
}

Eigen::MatrixXd standard_normal(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = z(rng);
  return out;
}

Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& m, const char* what) {
  return checked_llt(m, what).solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
}

}  // namespace

Eigen::MatrixXd sample_inverse_wishart(double dof, const Eigen::MatrixXd& scale, std::mt19937_64& rng) {
  const Eigen::Index p = scale.rows();
  if (scale.cols() != p) throw InvalidArgument("sample_inverse_wishart: scale is not square");
  if (!(dof > p - 1)) throw InvalidArgument("sample_inverse_wishart: degrees of freedom too small");
  // Bartlett: Sigma^{-1} = (L A)(L A)^T with L L^T = scale^{-1}.
  const Eigen::MatrixXd l = checked_llt(spd_inverse(scale, "inverse Wishart scale"), "inverse Wishart scale").matrixL();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
  std::normal_distribution<double> z(0.0, 1.0);
  for (Eigen::Index i = 0; i < p; ++i) {
    std::chi_squared_distribution<double> chi(dof - static_cast<double>(i));
    a(i, i) = std::sqrt(chi(rng));
    for (Eigen::Index j = 0; j < i; ++j) a(i, j) = z(rng);
  }
  const Eigen::MatrixXd la = l * a;
  const Eigen::MatrixXd inv = la.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(p, p));
  Eigen::MatrixXd sigma = inv.transpose() * inv;
  return 0.5 * (sigma + sigma.transpose());
}

CovarianceDraw sample_hiw(const HiwParams& params, std::mt19937_64& rng) {
  const int q = params.graph.node_count();
  if (params.scale.rows() != q || params.scale.cols() != q) {
    throw InvalidArgument("sample_hiw: scale dimension differs from graph size");
  }
  if (!(params.b > 0.0)) throw InvalidArgument("sample_hiw: b must be positive");
  const JunctionTree tree = junction_tree(params.graph);
  const Eigen::MatrixXd& d = params.scale;

  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(q, q);
  std::vector<int> done;
  for (std::size_t j = 0; j < tree.cliques.size(); ++j) {
    const NodeSet& clique = tree.cliques[j];
    const NodeSet& sep = tree.separators[j];
    NodeSet rest;
    std::set_difference(clique.begin(), clique.end(), sep.begin(), sep.end(), std::back_inserter(rest));
    const double dof = params.b + static_cast<double>(clique.size()) - 1.0;

    if (sep.empty()) {
      const Eigen::MatrixXd block = sample_inverse_wishart(dof, principal(d, rest, rest), rng);
      for (std::size_t a = 0; a < rest.size(); ++a)
        for (std::size_t b = 0; b < rest.size(); ++b) sigma(rest[a], rest[b]) = block(a, b);
    } else {
      const Eigen::MatrixXd d_ss = principal(d, sep, sep);
      const Eigen::MatrixXd d_sr = principal(d, sep, rest);
      const Eigen::MatrixXd d_rr = principal(d, rest, rest);
      const auto d_ss_llt = checked_llt(d_ss, "HIW separator scale");
      const Eigen::MatrixXd regress = d_ss_llt.solve(d_sr);  // D_SS^{-1} D_SR
      const Eigen::MatrixXd cond_scale = d_rr - d_sr.transpose() * regress;
      const Eigen::MatrixXd cond = sample_inverse_wishart(dof, cond_scale, rng);

      // T = Sigma_SS^{-1} Sigma_SR ~ MN(D_SS^{-1} D_SR, D_SS^{-1}, Sigma_RR.S)
      const Eigen::MatrixXd row_factor =
          checked_llt(spd_inverse(d_ss, "HIW separator scale"), "HIW separator scale").matrixL();
      const Eigen::MatrixXd col_factor = checked_llt(cond, "HIW conditional block").matrixL();
      const Eigen::MatrixXd t =
          regress + row_factor * standard_normal(sep.size(), rest.size(), rng) * col_factor.transpose();

      const Eigen::MatrixXd s_ss = principal(sigma, sep, sep);
      const Eigen::MatrixXd s_sr = s_ss * t;
      Eigen::MatrixXd s_rr = cond + t.transpose() * s_ss * t;
      s_rr = 0.5 * (s_rr + s_rr.transpose()).eval();
      for (std::size_t a = 0; a < rest.size(); ++a) {
        for (std::size_t b = 0; b < rest.size(); ++b) sigma(rest[a], rest[b]) = s_rr(a, b);
        for (std::size_t b = 0; b < sep.size(); ++b) {
          sigma(rest[a], sep[b]) = sigma(sep[b], rest[a]) = s_sr(b, a);
        }
      }
      // Completion: Sigma_{uR} = Sigma_{uS} T for earlier nodes outside S.
      NodeSet others;
      std::sort(done.begin(), done.end());
      std::set_difference(done.begin(), done.end(), sep.begin(), sep.end(), std::back_inserter(others));
      if (!others.empty()) {
        const Eigen::MatrixXd fill = principal(sigma, others, sep) * t;
        for (std::size_t a = 0; a < others.size(); ++a)
          for (std::size_t b = 0; b < rest.size(); ++b)
            sigma(others[a], rest[b]) = sigma(rest[b], others[a]) = fill(a, b);
      }
    }
    done.insert(done.end(), rest.begin(), rest.end());
  }
  return CovarianceDraw{sigma, mle_precision(sigma, tree)};
}

CovarianceDraw sample_posterior_sigma(const Eigen::MatrixXd& s, int n, const DecomposableGraph& g,
                                      const Hyperparameters& hyper, std::mt19937_64& rng) {
  if (n < 0) throw InvalidArgument("sample_posterior_sigma: negative sample size");
  HiwParams params{hyper.b + n, s, g};
  params.scale.diagonal().array() += hyper.d;
  return sample_hiw(params, rng);
}

CovarianceDraw sample_posterior_sigma(const ModelData& data, const InclusionVector& gamma,
                                      const DecomposableGraph& g, const Hyperparameters& hyper,
                                      std::mt19937_64& rng) {
  return sample_posterior_sigma(quad_form(data, gamma, hyper).s, data.n(), g, hyper, rng);
}

Eigen::MatrixXd posterior_mean_B(const ModelData& data, const QuadForm& qf, const Hyperparameters& hyper) {
  const Eigen::Index r = qf.rank();
  Eigen::MatrixXd cross(r, data.q());
  for (Eigen::Index a = 0; a < r; ++a) cross.row(a) = data.uty().row(qf.columns[a]);
  if (r == 0) return cross;
  const auto l = qf.gram_chol.triangularView<Eigen::Lower>();
  const Eigen::MatrixXd half = l.solve(cross);
  return (hyper.g / (hyper.g + 1.0)) * l.transpose().solve(half);
}

CoefficientDraw sample_posterior_B(const ModelData& data, const QuadForm& qf, const InclusionVector& gamma,
                                   const CovarianceDraw& sigma, const Hyperparameters& hyper,
                                   std::mt19937_64& rng) {
  CoefficientDraw out;
  out.predictors = gamma.selected();
  out.group_size = data.group_size();
  out.coefficients = posterior_mean_B(data, qf, hyper);
  const Eigen::Index r = qf.rank();
  if (r == 0) return out;
  // Row covariance c (L L^T)^{-1} = (sqrt(c) L^{-T})(sqrt(c) L^{-T})^T.
  const double c = hyper.g / (hyper.g + 1.0);
  const Eigen::MatrixXd col_factor = checked_llt(sigma.sigma, "posterior B column covariance").matrixL();
  const Eigen::MatrixXd z = standard_normal(r, data.q(), rng) * col_factor.transpose();
  out.coefficients += std::sqrt(c) * qf.gram_chol.triangularView<Eigen::Lower>().transpose().solve(z);
  return out;
}

CoefficientDraw sample_posterior_B(const ModelData& data, const InclusionVector& gamma,
                                   const CovarianceDraw& sigma, const Hyperparameters& hyper,
                                   std::mt19937_64& rng) {
  return sample_posterior_B(data, quad_form(data, gamma, hyper), gamma, sigma, hyper, rng);
}

Eigen::MatrixXd mle_precision(const Eigen::MatrixXd& sbar, const JunctionTree& tree) {
  const Eigen::Index q = sbar.rows();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(q, q);
  auto accumulate = [&](const NodeSet& nodes, double sign) {
    if (nodes.empty()) return;
    const Eigen::MatrixXd inv = spd_inverse(principal(sbar, nodes, nodes), "mle_precision block");
    for (std::size_t a = 0; a < nodes.size(); ++a)
      for (std::size_t b = 0; b < nodes.size(); ++b) k(nodes[a], nodes[b]) += sign * inv(a, b);
  };
  for (const auto& c : tree.cliques) accumulate(c, 1.0);
  for (const auto& s : tree.separators) accumulate(s, -1.0);
  return 0.5 * (k + k.transpose());
}

Eigen::MatrixXd mle_precision(const Eigen::MatrixXd& sbar, const DecomposableGraph& g) {
  if (sbar.rows() != g.node_count() || sbar.cols() != g.node_count()) {
    throw InvalidArgument("mle_precision: dimension differs from graph size");
  }
  return mle_precision(sbar, junction_tree(g));
}

}  // namespace cggm

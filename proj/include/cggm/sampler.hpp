#pragma once

// Collapsed Metropolis-Hastings search over (gamma, G). B and Sigma are
// integrated out of the moves; they are only drawn at save points.

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "cggm/errors.hpp"
#include "cggm/graph.hpp"
#include "cggm/hiw.hpp"
#include "cggm/inclusion.hpp"
#include "cggm/likelihood.hpp"

namespace cggm {

/// log(p_gamma!) + log((p - p_gamma)!): the beta-binomial prior with the
/// inclusion rate integrated against a uniform prior, up to a constant.
double log_prior_gamma(const InclusionVector& gamma);

struct ChainState {
  InclusionVector gamma;
  DecomposableGraph graph;
  JunctionTree tree;
  std::shared_ptr<const QuadForm> quad;
  double log_normalizer = 0.0;  // log M_{n,G}
  double log_det = 0.0;         // clique/separator determinant terms
  double log_prior_gamma = 0.0;
  double log_prior_graph = 0.0;

  double log_marginal(const Hyperparameters& hyper) const;
  double log_posterior(const Hyperparameters& hyper) const;
};

struct Schedule {
  long iterations = 100000;  // recorded phase, after burn-in
  long burn_in = 10000;
  long thin = 1;
  std::uint64_t seed = 1;
  bool save_sigma = false;
  long sigma_thin = 100;  // draw (Sigma, B) every sigma_thin-th record
  bool record_burn_in = false;
  bool update_gamma = true;
  bool update_graph = true;
  long audit_every = 1000;  // 0 disables cache audits

  void validate() const;
};

struct AcceptanceCounters {
  long gamma_proposals = 0, gamma_moves = 0, gamma_stays = 0, gamma_rank_rejections = 0;
  long graph_proposals = 0, graph_moves = 0, graph_stays = 0, graph_nondecomposable = 0;

  double gamma_acceptance() const;
  double graph_acceptance() const;
};

struct TraceRecord {
  long iteration = 0;  // 1-based, counting burn-in
  std::vector<std::uint8_t> gamma;
  std::vector<Edge> edges;
  double log_posterior = 0.0;
  double log_marginal = 0.0;
  int gamma_moves = 0;  // accepted changes during this iteration's sweep
  bool graph_moved = false;
};

struct SavedDraw {
  long iteration = 0;
  CovarianceDraw sigma;
  CoefficientDraw coefficients;
  std::vector<std::uint8_t> gamma;
};

struct ChainTrace {
  int p = 0, q = 0;
  std::vector<TraceRecord> records;
  std::vector<SavedDraw> draws;
  AcceptanceCounters counters;
  TraceRecord initial;
  long audits = 0;
  double max_audit_error = 0.0;  // relative, before resync
};

/// Numeric failure inside a chain; carries everything recorded before it.
class ChainFailure : public NumericError {
 public:
  ChainFailure(const std::string& what, ChainTrace partial, long iteration)
      : NumericError(what), partial_(std::move(partial)), iteration_(iteration) {}
  const ChainTrace& partial() const noexcept { return partial_; }
  long iteration() const noexcept { return iteration_; }

 private:
  ChainTrace partial_;
  long iteration_;
};

/// Evaluates every cached quantity from scratch for (gamma, G).
ChainState make_state(const ModelData& data, const Hyperparameters& hyper, QuadFormCache& cache,
                      InclusionVector gamma, DecomposableGraph graph);

/// One single-entry gamma proposal. Returns true when the chain ends in the
/// proposed state (a stay proposal counts as accepted). Rank-deficient
/// proposals are rejected and counted.
bool step_gamma(ChainState& state, const ModelData& data, const Hyperparameters& hyper,
                QuadFormCache& cache, std::mt19937_64& rng, AcceptanceCounters& counters);

/// One add-delete edge proposal; non-decomposable proposals leave the state.
bool step_graph(ChainState& state, const ModelData& data, const Hyperparameters& hyper,
                std::mt19937_64& rng, AcceptanceCounters& counters);

/// Full log MH ratio for moving G to a neighbouring graph, including
/// prior and Hastings terms. Exposed for detailed-balance checks.
double graph_move_log_ratio(const ChainState& state, const DecomposableGraph& proposed,
                            const ModelData& data, const Hyperparameters& hyper);

using ProgressFn = std::function<void(long iteration, long total, const ChainState&)>;

/// Per iteration: a random-scan sweep of p gamma proposals, then one edge
/// proposal. Deterministic given schedule.seed. A NumericError during the run
/// is rethrown as ChainFailure holding the partial trace.
ChainTrace run_chain(const ModelData& data, const Hyperparameters& hyper, const Schedule& schedule,
                     const ProgressFn& progress = {});
ChainTrace run_chain(const ModelData& data, const Hyperparameters& hyper, const Schedule& schedule,
                     InclusionVector initial_gamma, DecomposableGraph initial_graph,
                     const ProgressFn& progress = {});

}  // namespace cggm

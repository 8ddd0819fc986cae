#include "cggm/sampler.hpp"

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "cggm/errors.hpp"

namespace cggm {

double log_prior_gamma(const InclusionVector& gamma) {
  const double p = gamma.size();
  const double k = gamma.count();
  return boost::math::lgamma(k + 1.0) + boost::math::lgamma(p - k + 1.0);
}

double ChainState::log_marginal(const Hyperparameters& hyper) const {
  return log_normalizer + dimension_penalty(quad->rank(), graph.node_count(), hyper) + log_det;
}

double ChainState::log_posterior(const Hyperparameters& hyper) const {
  return log_marginal(hyper) + log_prior_gamma + log_prior_graph;
}

void Schedule::validate() const {
  if (iterations < 0 || burn_in < 0) throw InvalidArgument("schedule: negative iteration count");
  if (thin < 1) throw InvalidArgument("schedule: thin must be at least 1");
  if (sigma_thin < 1) throw InvalidArgument("schedule: sigma_thin must be at least 1");
  if (audit_every < 0) throw InvalidArgument("schedule: audit_every must be non-negative");
}

double AcceptanceCounters::gamma_acceptance() const {
  const long real = gamma_proposals - gamma_stays;
  return real > 0 ? static_cast<double>(gamma_moves) / real : 0.0;
}

double AcceptanceCounters::graph_acceptance() const {
  const long real = graph_proposals - graph_stays;
  return real > 0 ? static_cast<double>(graph_moves) / real : 0.0;
}

ChainState make_state(const ModelData& data, const Hyperparameters& hyper, QuadFormCache& cache,
                      InclusionVector gamma, DecomposableGraph graph) {
  if (gamma.size() != data.p()) throw InvalidArgument("initial gamma length differs from p");
  if (graph.node_count() != data.q()) throw InvalidArgument("initial graph size differs from q");
  ChainState s;
  s.gamma = std::move(gamma);
  s.graph = std::move(graph);
  s.tree = junction_tree(s.graph);
  s.quad = cache.get(data, s.gamma, hyper);
  s.log_normalizer = log_normalizer(data.n(), data.q(), s.tree, hyper);
  s.log_det = log_det_sum(s.quad->s, s.tree, data.n(), hyper);
  s.log_prior_gamma = log_prior_gamma(s.gamma);
  s.log_prior_graph = log_prior_graph(s.graph, hyper.alpha_graph);
  return s;
}

namespace {

bool accept(double log_ratio, std::mt19937_64& rng) {
  if (log_ratio >= 0.0) return true;
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return std::log(u) < log_ratio;
}

struct GraphDelta {
  double normalizer = 0.0;
  double det = 0.0;
};

GraphDelta graph_delta(const QuadForm& qf, int n, const ComponentDiff& diff, const Hyperparameters& hyper) {
  GraphDelta out;
  auto add = [&](const NodeSet& a, double sign) {
    out.normalizer += sign * component_log_normalizer(static_cast<int>(a.size()), n, hyper);
    out.det += sign * component_log_det(a, qf.s, n, hyper);
  };
  for (const auto& c : diff.added_cliques) add(c, 1.0);
  for (const auto& s : diff.added_separators) add(s, -1.0);
  for (const auto& c : diff.removed_cliques) add(c, -1.0);
  for (const auto& s : diff.removed_separators) add(s, 1.0);
  return out;
}

Edge differing_edge(const DecomposableGraph& a, const DecomposableGraph& b) {
  for (int i = 0; i < a.node_count(); ++i)
    for (int j = i + 1; j < a.node_count(); ++j)
      if (a.has_edge(i, j) != b.has_edge(i, j)) return {i, j};
  return {-1, -1};
}

}  // namespace

bool step_gamma(ChainState& state, const ModelData& data, const Hyperparameters& hyper,
                QuadFormCache& cache, std::mt19937_64& rng, AcceptanceCounters& counters) {
  ++counters.gamma_proposals;
  const int p = state.gamma.size();
  if (p == 0) {
    ++counters.gamma_stays;
    return true;
  }
  const int entry = std::uniform_int_distribution<int>(0, p - 1)(rng);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const bool present = state.gamma[entry];
  if ((!present && u >= hyper.delta) || (present && u >= 1.0 - hyper.delta)) {
    ++counters.gamma_stays;
    return true;
  }

  InclusionVector proposed = state.gamma;
  proposed.flip(entry);
  std::shared_ptr<const QuadForm> quad;
  try {
    quad = cache.get(data, proposed, hyper);
  } catch (const RankError&) {
    ++counters.gamma_rank_rejections;
    return false;
  }
  const double log_hastings =
      present ? std::log(hyper.delta / (1.0 - hyper.delta)) : std::log((1.0 - hyper.delta) / hyper.delta);
  const double new_det = log_det_sum(quad->s, state.tree, data.n(), hyper);
  const double new_prior = log_prior_gamma(proposed);
  const int q = data.q();
  const double log_ratio = dimension_penalty(quad->rank(), q, hyper) -
                           dimension_penalty(state.quad->rank(), q, hyper) + new_det - state.log_det +
                           new_prior - state.log_prior_gamma + log_hastings;
  if (!accept(log_ratio, rng)) return false;

  state.gamma = std::move(proposed);
  state.quad = std::move(quad);
  state.log_det = new_det;
  state.log_prior_gamma = new_prior;
  ++counters.gamma_moves;
  return true;
}

double graph_move_log_ratio(const ChainState& state, const DecomposableGraph& proposed,
                            const ModelData& data, const Hyperparameters& hyper) {
  const Edge toggled = differing_edge(state.graph, proposed);
  if (toggled.first < 0) return 0.0;
  const JunctionTree tree = junction_tree(proposed);
  const auto diff = affected_components(state.graph, state.tree, proposed, tree, toggled);
  const GraphDelta delta = graph_delta(*state.quad, data.n(), diff, hyper);
  const bool adding = proposed.has_edge(toggled.first, toggled.second);
  const double log_hastings =
      adding ? std::log((1.0 - hyper.eta) / hyper.eta) : std::log(hyper.eta / (1.0 - hyper.eta));
  return delta.normalizer + delta.det + log_prior_graph(proposed, hyper.alpha_graph) -
         state.log_prior_graph + log_hastings;
}

bool step_graph(ChainState& state, const ModelData& data, const Hyperparameters& hyper,
                std::mt19937_64& rng, AcceptanceCounters& counters) {
  ++counters.graph_proposals;
  EdgeProposal proposal = propose_edge_toggle(state.graph, hyper.eta, rng);
  if (proposal.shape == ToggleShape::stay) {
    ++counters.graph_stays;
    return true;
  }
  if (proposal.shape == ToggleShape::rejected_nondecomposable) {
    ++counters.graph_nondecomposable;
    return false;
  }
  JunctionTree tree = junction_tree(proposal.graph);
  const auto diff = affected_components(state.graph, state.tree, proposal.graph, tree, proposal.pair);
  const GraphDelta delta = graph_delta(*state.quad, data.n(), diff, hyper);
  const double new_prior = log_prior_graph(proposal.graph, hyper.alpha_graph);
  const double log_ratio =
      delta.normalizer + delta.det + new_prior - state.log_prior_graph + proposal.log_hastings;
  if (!accept(log_ratio, rng)) return false;

  state.graph = std::move(proposal.graph);
  state.tree = std::move(tree);
  state.log_normalizer += delta.normalizer;
  state.log_det += delta.det;
  state.log_prior_graph = new_prior;
  ++counters.graph_moves;
  return true;
}

namespace {

TraceRecord snapshot(const ChainState& s, const Hyperparameters& hyper, long iteration) {
  TraceRecord r;
  r.iteration = iteration;
  r.gamma = s.gamma.bits();
  r.edges = s.graph.edges();
  r.log_marginal = s.log_marginal(hyper);
  r.log_posterior = r.log_marginal + s.log_prior_gamma + s.log_prior_graph;
  return r;
}

// Fresh evaluation, bypassing every cache; resynchronises the state.
double audit(ChainState& s, const ModelData& data, const Hyperparameters& hyper) {
  const JunctionTree tree = junction_tree(s.graph);
  const QuadForm qf = quad_form(data, s.gamma, hyper);
  const double fresh_norm = log_normalizer(data.n(), data.q(), tree, hyper);
  const double fresh_det = log_det_sum(qf.s, tree, data.n(), hyper);
  const double fresh = fresh_norm + dimension_penalty(qf.rank(), data.q(), hyper) + fresh_det;
  const double cached = s.log_marginal(hyper);
  const double err = std::abs(fresh - cached) / std::max(1.0, std::abs(fresh));
  if (!(err < 1e-6)) throw NumericError("chain audit: cached log marginal drifted from fresh evaluation");
  s.log_normalizer = fresh_norm;
  s.log_det = fresh_det;
  return err;
}

}  // namespace

ChainTrace run_chain(const ModelData& data, const Hyperparameters& hyper, const Schedule& schedule,
                     InclusionVector initial_gamma, DecomposableGraph initial_graph,
                     const ProgressFn& progress) {
  hyper.validate();
  schedule.validate();
  std::mt19937_64 rng(schedule.seed);
  // Separate stream for (Sigma, B) so saving draws never perturbs the chain.
  std::mt19937_64 draw_rng(schedule.seed ^ 0x9e3779b97f4a7c15ULL);
  QuadFormCache cache;

  ChainTrace trace;
  trace.p = data.p();
  trace.q = data.q();
  ChainState state = make_state(data, hyper, cache, std::move(initial_gamma), std::move(initial_graph));
  trace.initial = snapshot(state, hyper, 0);

  const long total = schedule.burn_in + schedule.iterations;
  long recorded = 0;
  for (long t = 0; t < total; ++t) try {
    int gamma_moves = 0;
    if (schedule.update_gamma) {
      for (int s = 0; s < data.p(); ++s) {
        const long before = trace.counters.gamma_moves;
        step_gamma(state, data, hyper, cache, rng, trace.counters);
        gamma_moves += static_cast<int>(trace.counters.gamma_moves - before);
      }
    }
    bool graph_moved = false;
    if (schedule.update_graph) {
      const long before = trace.counters.graph_moves;
      step_graph(state, data, hyper, rng, trace.counters);
      graph_moved = trace.counters.graph_moves != before;
    }
    if (schedule.audit_every > 0 && (t + 1) % schedule.audit_every == 0) {
      trace.max_audit_error = std::max(trace.max_audit_error, audit(state, data, hyper));
      ++trace.audits;
    }

    const bool post_burn = t >= schedule.burn_in;
    const long index = post_burn ? t - schedule.burn_in : t;
    if ((post_burn || schedule.record_burn_in) && (index + 1) % schedule.thin == 0) {
      TraceRecord r = snapshot(state, hyper, t + 1);
      r.gamma_moves = gamma_moves;
      r.graph_moved = graph_moved;
      trace.records.push_back(std::move(r));
      if (schedule.save_sigma && post_burn && recorded % schedule.sigma_thin == 0) {
        SavedDraw draw;
        draw.iteration = t + 1;
        draw.gamma = state.gamma.bits();
        draw.sigma = sample_posterior_sigma(state.quad->s, data.n(), state.graph, hyper, draw_rng);
        draw.coefficients = sample_posterior_B(data, *state.quad, state.gamma, draw.sigma, hyper, draw_rng);
        trace.draws.push_back(std::move(draw));
      }
      if (post_burn) ++recorded;
    }
    if (progress) progress(t + 1, total, state);
  } catch (const ChainFailure&) {
    throw;
  } catch (const NumericError& e) {
    throw ChainFailure(std::string("iteration ") + std::to_string(t + 1) + ": " + e.what(), std::move(trace), t + 1);
  }
  return trace;
}

ChainTrace run_chain(const ModelData& data, const Hyperparameters& hyper, const Schedule& schedule,
                     const ProgressFn& progress) {
  return run_chain(data, hyper, schedule, InclusionVector(data.p()), DecomposableGraph(data.q()), progress);
}

}  // namespace cggm

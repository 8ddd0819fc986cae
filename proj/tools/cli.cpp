#include "cli.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "cggm/csv.hpp"
#include "cggm/errors.hpp"
#include "cggm/posterior.hpp"
#include "cggm/spline.hpp"
#include "cggm/trace_io.hpp"

#ifndef CGGM_VERSION
#define CGGM_VERSION "dev"
#endif

namespace cggm::cli {

namespace fs = std::filesystem;

int effective_threads(int requested) {
  int n = requested > 0 ? requested : omp_get_max_threads();
  if (const char* env = std::getenv("CGGM_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) n = std::min<long>(n, cap);
  }
  return std::max(n, 1);
}

void RunConfig::validate() const {
  const bool have_paths = !y_path.empty() || !x_path.empty();
  if (have_paths == simulation.has_value()) {
    throw InvalidArgument("give either --y/--x input files or --simulate, not both or neither");
  }
  if (have_paths) {
    if (y_path.empty()) throw InvalidArgument("--y is required with input files");
    if (x_path.empty() && !no_covariates) throw InvalidArgument("--x is required unless --no-covariates is set");
    for (const auto& p : {y_path, x_path}) {
      if (!p.empty() && !fs::is_regular_file(p)) throw InvalidArgument("input file not found: " + p.string());
    }
  }
  if (simulation) simulation->validate();
  if (out.empty()) throw InvalidArgument("--out is required");
  if (iterations < 1 || burn_in < 0 || thin < 1) throw InvalidArgument("need iterations >= 1, burn-in >= 0, thin >= 1");
  if (chains < 1) throw InvalidArgument("--chains must be at least 1");
  if (knots < 0) throw InvalidArgument("--knots must be non-negative");
  if (!(cutoff > 0.0 && cutoff < 1.0)) throw InvalidArgument("--cutoff must lie in (0, 1)");
  if (sigma_thin < 1) throw InvalidArgument("--sigma-thin must be at least 1");
  if (curve_points < 2) throw InvalidArgument("--curve-points must be at least 2");
  if (g && !(*g > 0.0)) throw InvalidArgument("--g must be positive");
}

namespace {

const char* kSep = ";";

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(kSep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::string fmt(double v) { return csv::format(v); }

// ---------------------------------------------------------------- summaries

double split_disagreement(std::span<const ChainTrace> traces) {
  std::vector<Eigen::MatrixXd> halves;
  for (const auto& t : traces) {
    const std::size_t m = t.records.size() / 2;
    if (m == 0) continue;
    for (int h = 0; h < 2; ++h) {
      ChainTrace part;
      part.p = t.p;
      part.q = t.q;
      part.records.assign(t.records.begin() + h * m, h ? t.records.end() : t.records.begin() + m);
      halves.push_back(edge_probabilities(part));
    }
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < halves.size(); ++a)
    for (std::size_t b = a + 1; b < halves.size(); ++b)
      worst = std::max(worst, (halves[a] - halves[b]).cwiseAbs().maxCoeff());
  return worst;
}

void write_edge_prob(const fs::path& path, const Eigen::MatrixXd& ep, const std::vector<std::string>& nodes) {
  csv::write(path, nodes, ep);
}

void write_incl_prob(const fs::path& path, const Eigen::VectorXd& ip) {
  Eigen::MatrixXd m(ip.size(), 2);
  for (Eigen::Index i = 0; i < ip.size(); ++i) {
    m(i, 0) = static_cast<double>(i + 1);
    m(i, 1) = ip(i);
  }
  csv::write(path, {"predictor", "incl_prob"}, m);
}

struct Summary {
  Eigen::MatrixXd edge_prob;
  Eigen::VectorXd incl_prob;
  Graph selected;
  bool decomposable = true;
  double disagreement = 0.0;
};

// Everything derivable from the traces alone. fit and summarize both go
// through here so their outputs agree byte for byte.
Summary write_summary(const fs::path& out, std::span<const ChainTrace> traces, double cutoff,
                      const std::vector<std::string>& nodes) {
  Summary s;
  s.edge_prob = edge_probabilities(traces);
  s.incl_prob = inclusion_probabilities(traces);
  s.selected = select_graph(s.edge_prob, cutoff);
  s.decomposable = is_decomposable(s.selected);
  s.disagreement = split_disagreement(traces);

  write_edge_prob(out / "edge_prob.csv", s.edge_prob, nodes);
  write_incl_prob(out / "incl_prob.csv", s.incl_prob);

  std::vector<CovarianceDraw> draws;
  for (const auto& t : traces)
    for (const auto& d : t.draws) draws.push_back(d.sigma);
  Eigen::MatrixXd pc;
  if (!draws.empty()) {
    pc = partial_correlations(draws);
    csv::write(out / "partial_corr.csv", nodes, pc);
  }

  std::ostringstream sel;
  sel << (draws.empty() ? "i,j,edge_prob\n" : "i,j,edge_prob,partial_corr\n");
  for (auto [i, j] : s.selected.edges()) {
    sel << i + 1 << ',' << j + 1 << ',' << fmt(s.edge_prob(i, j));
    if (!draws.empty()) sel << ',' << fmt(pc(i, j));
    sel << '\n';
  }
  csv::write_text(out / "selected_edges.csv", sel.str());

  std::ostringstream hubs;
  hubs << "node,degree\n";
  for (auto [node, degree] : hub_nodes(s.selected)) hubs << node + 1 << ',' << degree << '\n';
  csv::write_text(out / "hubs.csv", hubs.str());

  long records = 0;
  for (const auto& t : traces) records += static_cast<long>(t.records.size());
  io::write_meta(out / "summary.meta",
                 {{"cutoff", fmt(cutoff)},
                  {"chains", std::to_string(traces.size())},
                  {"records", std::to_string(records)},
                  {"sigma_draws", std::to_string(draws.size())},
                  {"selected_edges", std::to_string(s.selected.edge_count())},
                  {"selected_graph_decomposable", s.decomposable ? "true" : "false"},
                  {"split_chain_max_abs_diff_edge_prob", fmt(s.disagreement)}});
  return s;
}

void write_chain_summary(const fs::path& dir, const ChainTrace& trace, const std::vector<std::string>& nodes) {
  if (trace.records.empty()) return;
  write_edge_prob(dir / "edge_prob.csv", edge_probabilities(trace), nodes);
  write_incl_prob(dir / "incl_prob.csv", inclusion_probabilities(trace));
}

void write_roc(const fs::path& path, const RocCurve& roc) {
  std::ostringstream o;
  o << "fpr,tpr,threshold\n";
  for (std::size_t k = 0; k < roc.fpr.size(); ++k) {
    o << fmt(roc.fpr[k]) << ',' << fmt(roc.tpr[k]) << ',' << fmt(roc.thresholds[k]) << '\n';
  }
  o << "# auc=" << fmt(roc.auc) << '\n';
  csv::write_text(path, o.str());
}

void write_simulation(const fs::path& out, const SimulatedData& sim, const SimulationSpec& spec) {
  ensure_dir(out);
  csv::write(out / "X.csv", io::default_names("x", static_cast<int>(sim.x.cols())), sim.x);
  csv::write(out / "Y.csv", io::default_names("y", static_cast<int>(sim.y.cols())), sim.y);

  std::ostringstream sup;
  std::vector<std::string> eff;
  for (auto e : spec.effects) eff.push_back(effect_name(e));
  sup << "# effects=" << join(eff, ",") << "\npredictor\n";
  for (int s : spec.support) sup << s + 1 << '\n';
  csv::write_text(out / "truth_support.csv", sup.str());

  std::ostringstream edges;
  edges << "i,j\n";
  for (auto [i, j] : sim.truth.graph.edges()) edges << i + 1 << ',' << j + 1 << '\n';
  csv::write_text(out / "truth_edges.csv", edges.str());

  csv::write(out / "truth_sigma.csv", io::default_names("y", static_cast<int>(sim.y.cols())), sim.truth.sigma);
}

// ---------------------------------------------------------------- options

struct SimOptions {
  std::string preset = "none";
  int n = 300, p = 10, q = 8;
  std::vector<int> support;
  std::vector<std::string> effects;
  int graph_edges = -1;
  double hiw_b = 3.0, hiw_scale = 1.0;
  bool random_signs = false;
  std::uint64_t seed = 1;
  CLI::App* app = nullptr;

  void attach(CLI::App* sub, const std::string& seed_flag) {
    app = sub;
    sub->add_option("--preset", preset, "Simulation preset")->check(CLI::IsMember({"none", "full"}));
    sub->add_option("--n", n, "Rows")->check(CLI::PositiveNumber);
    sub->add_option("--p", p, "Predictors")->check(CLI::NonNegativeNumber);
    sub->add_option("--q", q, "Responses")->check(CLI::PositiveNumber);
    sub->add_option("--support", support, "True predictors, 1-based")->delimiter(',');
    sub->add_option("--effects", effects, "Effect kind per true predictor: sin, linear, exp")->delimiter(',');
    sub->add_option("--graph-edges", graph_edges, "Edges in the random decomposable truth (-1: q)");
    sub->add_option("--hiw-b", hiw_b, "HIW degrees of the noise covariance");
    sub->add_option("--hiw-scale", hiw_scale, "HIW scale multiple of the identity");
    sub->add_flag("--random-signs", random_signs, "Randomize coefficient signs");
    sub->add_option(seed_flag, seed, "Simulation seed");
  }

  SimulationSpec spec() const {
    SimulationSpec s = preset == "full" ? SimulationSpec::full_scale() : SimulationSpec{};
    auto given = [&](const char* name) { return app->get_option(name)->count() > 0 || preset != "full"; };
    if (given("--n")) s.n = n;
    if (given("--p")) s.p = p;
    if (given("--q")) s.q = q;
    if (given("--support")) {
      s.support.clear();
      for (int v : support) s.support.push_back(v - 1);
    }
    if (given("--effects")) {
      s.effects.clear();
      for (const auto& e : effects) s.effects.push_back(parse_effect(e));
    }
    s.graph_edges = graph_edges;
    s.hiw_b = hiw_b;
    s.hiw_scale = hiw_scale;
    s.random_signs = random_signs;
    s.seed = seed;
    return s;
  }
};

io::Meta config_meta(const CLI::App* sub, const std::string& command) {
  io::Meta meta{{"version", CGGM_VERSION}, {"command", command}};
  std::istringstream cfg(sub->config_to_str(true, false));
  std::string line;
  while (std::getline(cfg, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos || line.front() == '#' || line.front() == '[') continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(' ');
      const auto e = s.find_last_not_of(' ');
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    meta.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return meta;
}

// Replaces recorded simulation options with the values actually used, so a
// replay reproduces presets and the fallback seed.
void pin_simulation(io::Meta& meta, const SimulationSpec& spec, const std::string& seed_key) {
  std::string support, effects;
  for (std::size_t i = 0; i < spec.support.size(); ++i) {
    support += (i ? "," : "") + std::to_string(spec.support[i] + 1);
    effects += (i ? ",\"" : "\"") + effect_name(spec.effects[i]) + "\"";
  }
  const std::map<std::string, std::string> pinned{{"preset", "\"none\""},
                                                  {"n", std::to_string(spec.n)},
                                                  {"p", std::to_string(spec.p)},
                                                  {"q", std::to_string(spec.q)},
                                                  {"support", "[" + support + "]"},
                                                  {"effects", "[" + effects + "]"},
                                                  {seed_key, std::to_string(spec.seed)}};
  for (auto& [key, value] : meta)
    if (const auto it = pinned.find(key); it != pinned.end()) value = it->second;
  // An empty list cannot be written back; leaving the key out means empty.
  if (spec.support.empty()) {
    std::erase_if(meta, [](const auto& kv) { return kv.first == "support" || kv.first == "effects"; });
  }
}

// ---------------------------------------------------------------- commands

struct Inputs {
  Eigen::MatrixXd x, y;
  std::vector<std::string> predictors, nodes;
  std::optional<SimulatedData> sim;
};

Inputs load_inputs(const RunConfig& cfg) {
  Inputs in;
  if (cfg.simulation) {
    in.sim = generate(*cfg.simulation);
    in.x = in.sim->x;
    in.y = in.sim->y;
    in.predictors = io::default_names("x", static_cast<int>(in.x.cols()));
    in.nodes = io::default_names("y", static_cast<int>(in.y.cols()));
  } else {
    auto y = csv::read(cfg.y_path);
    in.y = std::move(y.values);
    in.nodes = std::move(y.header);
    if (!cfg.x_path.empty()) {
      auto x = csv::read(cfg.x_path);
      if (x.values.rows() != in.y.rows()) {
        throw InvalidArgument("X and Y row counts differ (" + std::to_string(x.values.rows()) + " vs " +
                              std::to_string(in.y.rows()) + ")");
      }
      in.x = std::move(x.values);
      in.predictors = std::move(x.header);
    }
  }
  if (cfg.no_covariates) {
    in.x.resize(in.y.rows(), 0);
    in.predictors.clear();
  }
  if (in.y.rows() < 2 || in.y.cols() < 1) throw InvalidArgument("Y needs at least two rows and one column");
  if (!in.y.allFinite() || !in.x.allFinite()) throw InvalidArgument("non-finite value in X or Y");
  return in;
}

int cmd_fit(const RunConfig& cfg, const CLI::App* sub, std::ostream& out, std::ostream& err) {
  cfg.validate();
  const int threads = effective_threads(cfg.threads);
  kernels::set_thread_limit(threads);

  Inputs in = load_inputs(cfg);
  std::vector<std::string> warnings;

  switch (cfg.standardize) {
    case Standardize::none: break;
    case Standardize::center: center(in.y); break;
    case Standardize::zscore:
      zscore(in.y);
      if (in.x.cols() > 0) zscore(in.x);
      break;
  }
  double lo = -1.0, hi = 1.0;
  if (in.x.cols() > 0) {
    lo = in.x.minCoeff();
    hi = in.x.maxCoeff();
    if (!(hi > lo)) throw InvalidArgument("X is constant; cannot place knots");
  }
  DesignMatrix design = build_basis(in.x, even_knots(cfg.knots, lo, hi));
  if (cfg.standardize != Standardize::none) design.center_columns();

  const int n = static_cast<int>(in.y.rows());
  const int q = static_cast<int>(in.y.cols());
  const int p = static_cast<int>(in.x.cols());
  Hyperparameters hyper = cfg.hyper;
  const Hyperparameters defaults = Hyperparameters::defaults(n, q);
  hyper.g = cfg.g.value_or(cfg.g_max_n_p2 ? std::max<double>(n, double(p) * p) : defaults.g);
  if (cfg.alpha_graph) {
    hyper.alpha_graph = *cfg.alpha_graph;
  } else {
    hyper.alpha_graph = defaults.alpha_graph;
    if (q > 1 && 2.0 / (q - 1) > defaults.alpha_graph) {
      warnings.push_back("edge prior 2/(q-1) exceeds 1/2 for q = " + std::to_string(q) + "; using 1/2");
    }
  }
  hyper.validate();
  if (p * design.group_size() >= n) {
    warnings.push_back("p(k+1) >= n: large models are rank deficient and will be rejected");
  }

  const ModelData data(in.y, design);
  ensure_dir(cfg.out);
  if (in.sim) write_simulation(cfg.out, *in.sim, *cfg.simulation);

  Schedule base;
  base.iterations = cfg.iterations;
  base.burn_in = cfg.burn_in;
  base.thin = cfg.thin;
  base.save_sigma = cfg.save_sigma;
  base.sigma_thin = cfg.sigma_thin;
  base.audit_every = cfg.audit_every;
  base.update_gamma = p > 0;
  base.validate();

  std::vector<ChainTrace> traces(cfg.chains);
  std::vector<std::string> failures(cfg.chains);
  std::vector<long> failed_at(cfg.chains, 0);
  const long total = cfg.burn_in + cfg.iterations;
  const long every = std::max<long>(total / 10, 1);

#pragma omp parallel for schedule(dynamic) num_threads(std::min(threads, cfg.chains))
  for (int c = 0; c < cfg.chains; ++c) {
    Schedule sched = base;
    sched.seed = cfg.seed + static_cast<std::uint64_t>(c);
    ProgressFn progress;
    if (!cfg.quiet) {
      progress = [&, c](long t, long tot, const ChainState& st) {
        if (t % every != 0 && t != tot) return;
#pragma omp critical(cggm_log)
        err << "chain " << c + 1 << ": " << t << "/" << tot << " log_post=" << st.log_posterior(hyper)
            << " p_gamma=" << st.gamma.count() << " edges=" << st.graph.edge_count() << '\n';
      };
    }
    try {
      traces[c] = run_chain(data, hyper, sched, progress);
    } catch (const ChainFailure& e) {
      traces[c] = e.partial();
      failures[c] = e.what();
      failed_at[c] = e.iteration();
    } catch (const std::exception& e) {
      failures[c] = e.what();
    }
  }

  io::Meta meta = config_meta(sub, "fit");
  if (cfg.simulation) pin_simulation(meta, *cfg.simulation, "sim-seed");
  meta.insert(meta.end(), {{"data_n", std::to_string(n)},
                           {"data_p", std::to_string(p)},
                           {"data_q", std::to_string(q)},
                           {"group_size", std::to_string(design.group_size())},
                           {"knot_lo", fmt(lo)},
                           {"knot_hi", fmt(hi)},
                           {"g_used", fmt(hyper.g)},
                           {"alpha_graph_used", fmt(hyper.alpha_graph)}});

  std::ostringstream report;
  report << "cggm " << CGGM_VERSION << " fit report\n"
         << "data: n=" << n << " p=" << p << " q=" << q << " basis functions per predictor=" << design.group_size()
         << "\n"
         << "hyperparameters: g=" << fmt(hyper.g) << " b=" << fmt(hyper.b) << " d=" << fmt(hyper.d)
         << " delta=" << fmt(hyper.delta) << " eta=" << fmt(hyper.eta) << " alpha_graph=" << fmt(hyper.alpha_graph)
         << "\n"
         << "schedule: burn_in=" << cfg.burn_in << " iterations=" << cfg.iterations << " thin=" << cfg.thin
         << " chains=" << cfg.chains << " seed=" << cfg.seed << "\n\n";

  bool any_failed = false;
  for (int c = 0; c < cfg.chains; ++c) {
    const auto dir = cfg.out / ("chain_" + std::to_string(c + 1));
    const auto& t = traces[c];
    const auto& k = t.counters;
    io::Meta cm{{"seed", std::to_string(cfg.seed + c)},
                {"predictor_names", join(in.predictors, kSep)},
                {"node_names", join(in.nodes, kSep)},
                {"gamma_acceptance", fmt(k.gamma_acceptance())},
                {"graph_acceptance", fmt(k.graph_acceptance())},
                {"status", failures[c].empty() ? "ok" : "failed"}};
    io::write_trace(dir, t, cm, in.predictors, in.nodes);
    write_chain_summary(dir, t, in.nodes);
    meta.emplace_back("chain_" + std::to_string(c + 1) + "_seed", std::to_string(cfg.seed + c));

    report << "chain " << c + 1 << " (seed " << cfg.seed + c << "): ";
    if (!failures[c].empty()) {
      any_failed = true;
      report << "FAILED";
      if (failed_at[c] > 0) report << " at iteration " << failed_at[c];
      report << ": " << failures[c] << "; partial trace kept (" << t.records.size() << " records)\n";
      continue;
    }
    report << "gamma acceptance " << fmt(k.gamma_acceptance()) << " (" << k.gamma_moves << "/" << k.gamma_proposals
           << ", stays " << k.gamma_stays << ", rank rejections " << k.gamma_rank_rejections << "), graph acceptance "
           << fmt(k.graph_acceptance()) << " (" << k.graph_moves << "/" << k.graph_proposals << ", stays "
           << k.graph_stays << ", non-decomposable " << k.graph_nondecomposable << "), audits " << t.audits
           << " max rel error " << fmt(t.max_audit_error) << "\n";
    if (k.gamma_rank_rejections > 0) {
      warnings.push_back("chain " + std::to_string(c + 1) + ": " + std::to_string(k.gamma_rank_rejections) +
                         " rank-deficient gamma proposals rejected");
    }
  }
  io::write_meta(cfg.out / "meta", meta);

  if (any_failed) {
    report << "\nno pooled summary: at least one chain failed\n";
    csv::write_text(cfg.out / "report.txt", report.str());
    for (int c = 0; c < cfg.chains; ++c)
      if (!failures[c].empty()) err << "error: chain " << c + 1 << ": " << failures[c] << '\n';
    return ExitCode::numeric;
  }

  const Summary s = write_summary(cfg.out, traces, cfg.cutoff, in.nodes);
  if (!s.decomposable) warnings.push_back("thresholded graph is not decomposable");

  if (cfg.save_sigma && p > 0) {
    std::vector<CoefficientDraw> coef;
    for (const auto& t : traces)
      for (const auto& d : t.draws) coef.push_back(d.coefficients);
    for (int i = 0; i < p; ++i) {
      if (!(s.incl_prob(i) > cfg.cutoff)) continue;
      const double a = in.x.col(i).minCoeff(), b = in.x.col(i).maxCoeff();
      std::vector<double> grid(cfg.curve_points);
      for (int k = 0; k < cfg.curve_points; ++k) grid[k] = a + (b - a) * k / (cfg.curve_points - 1);
      const auto curves = fitted_curves(design, coef, i, grid);
      if (curves.empty()) continue;
      Eigen::MatrixXd m(cfg.curve_points, q + 1);
      m.col(0) = Eigen::Map<const Eigen::VectorXd>(grid.data(), cfg.curve_points);
      m.rightCols(q) = curves.values;
      std::vector<std::string> header{"x"};
      header.insert(header.end(), in.nodes.begin(), in.nodes.end());
      csv::write(cfg.out / ("curves_" + std::to_string(i + 1) + ".csv"), header, m);
    }
  }

  std::optional<double> auc;
  if (in.sim) {
    try {
      const RocCurve roc = roc_curve(s.edge_prob, in.sim->truth.graph.graph().adjacency());
      write_roc(cfg.out / "roc.csv", roc);
      auc = roc.auc;
    } catch (const InvalidArgument& e) {
      warnings.push_back(std::string("ROC skipped: ") + e.what());
    }
  }

  std::vector<int> selected;
  for (int i = 0; i < p; ++i)
    if (s.incl_prob(i) > cfg.cutoff) selected.push_back(i + 1);
  report << "\nselected predictors (incl_prob > " << fmt(cfg.cutoff) << "):";
  for (int i : selected) report << ' ' << i;
  report << "\nselected edges: " << s.selected.edge_count()
         << (s.decomposable ? " (decomposable)" : " (not decomposable)") << "\n"
         << "split-chain max |delta edge_prob|: " << fmt(s.disagreement) << "\n";
  if (auc) report << "edge ROC AUC vs simulated truth: " << fmt(*auc) << "\n";
  report << "\nwarnings:" << (warnings.empty() ? " none\n" : "\n");
  for (const auto& w : warnings) report << "  - " << w << "\n";
  csv::write_text(cfg.out / "report.txt", report.str());

  for (const auto& w : warnings) err << "warning: " << w << '\n';
  out << "selected predictors:";
  for (int i : selected) out << ' ' << i;
  out << "\nselected edges: " << s.selected.edge_count() << '\n';
  if (auc) out << "auc=" << fmt(*auc) << '\n';
  return ExitCode::ok;
}

std::vector<fs::path> chain_dirs(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InvalidArgument("trace directory not found: " + dir.string());
  if (fs::exists(dir / "gamma.csv")) return {dir};
  std::vector<std::pair<long, fs::path>> found;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (!entry.is_directory() || name.rfind("chain_", 0) != 0) continue;
    try {
      found.emplace_back(std::stol(name.substr(6)), entry.path());
    } catch (const std::exception&) {
    }
  }
  if (found.empty()) throw InvalidArgument("no chain traces under " + dir.string());
  std::sort(found.begin(), found.end());
  std::vector<fs::path> out;
  for (auto& f : found) out.push_back(f.second);
  return out;
}

int cmd_summarize(const fs::path& trace_dir, fs::path out_dir, double cutoff, std::ostream& out) {
  if (!(cutoff > 0.0 && cutoff < 1.0)) throw InvalidArgument("--cutoff must lie in (0, 1)");
  const auto dirs = chain_dirs(trace_dir);
  if (out_dir.empty()) out_dir = trace_dir;
  ensure_dir(out_dir);

  std::vector<ChainTrace> traces;
  std::vector<std::string> nodes;
  for (const auto& d : dirs) {
    traces.push_back(io::read_trace(d));
    if (traces.back().records.empty()) throw InvalidArgument("empty trace in " + d.string());
    if (traces.back().p != traces.front().p || traces.back().q != traces.front().q) {
      throw InvalidArgument("chains disagree on p or q");
    }
    if (nodes.empty()) {
      const auto meta = io::read_meta(d / "meta");
      if (auto it = meta.find("node_names"); it != meta.end()) nodes = split_names(it->second);
    }
  }
  if (static_cast<int>(nodes.size()) != traces.front().q) nodes = io::default_names("y", traces.front().q);
  if (dirs.size() > 1 || dirs.front() != trace_dir) {
    for (std::size_t c = 0; c < dirs.size(); ++c) {
      const auto target = out_dir / dirs[c].filename();
      ensure_dir(target);
      write_chain_summary(target, traces[c], nodes);
    }
  }
  const Summary s = write_summary(out_dir, traces, cutoff, nodes);
  out << "chains: " << traces.size() << "\nselected edges: " << s.selected.edge_count()
      << (s.decomposable ? "" : " (not decomposable)") << "\nselected predictors:";
  for (Eigen::Index i = 0; i < s.incl_prob.size(); ++i)
    if (s.incl_prob(i) > cutoff) out << ' ' << i + 1;
  out << '\n';
  return ExitCode::ok;
}

Eigen::MatrixXi read_truth(const fs::path& path, int q) {
  if (!fs::is_regular_file(path)) throw InvalidArgument("truth file not found: " + path.string());
  const auto t = csv::read(path);
  Eigen::MatrixXi adj = Eigen::MatrixXi::Zero(q, q);
  if (t.values.cols() == q && t.values.rows() == q && q != 2) {
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) adj(i, j) = t.values(i, j) != 0.0 ? 1 : 0;
    return adj;
  }
  if (t.values.cols() != 2) throw InvalidArgument("truth must be an i,j edge list or a q x q adjacency");
  for (Eigen::Index r = 0; r < t.values.rows(); ++r) {
    const int i = static_cast<int>(t.values(r, 0)) - 1, j = static_cast<int>(t.values(r, 1)) - 1;
    if (i < 0 || j < 0 || i >= q || j >= q || i == j) throw InvalidArgument("truth edge out of range");
    adj(i, j) = adj(j, i) = 1;
  }
  return adj;
}

int cmd_roc(const fs::path& edge_prob, const fs::path& truth, const fs::path& out_path, std::ostream& out) {
  if (!fs::is_regular_file(edge_prob)) throw InvalidArgument("edge probability file not found: " + edge_prob.string());
  const auto ep = csv::read(edge_prob);
  if (ep.values.rows() != ep.values.cols()) throw InvalidArgument("edge probabilities must be square");
  const auto roc = roc_curve(ep.values, read_truth(truth, static_cast<int>(ep.values.rows())));
  if (!out_path.empty()) {
    if (out_path.has_parent_path()) ensure_dir(out_path.parent_path());
    write_roc(out_path, roc);
  }
  out << "auc=" << fmt(roc.auc) << '\n';
  return ExitCode::ok;
}

int cmd_simulate(const SimulationSpec& spec, const fs::path& out_dir, const CLI::App* sub, std::ostream& out) {
  if (out_dir.empty()) throw InvalidArgument("--out is required");
  const auto sim = generate(spec);
  write_simulation(out_dir, sim, spec);
  auto meta = config_meta(sub, "simulate");
  pin_simulation(meta, spec, "seed");
  meta.emplace_back("truth_edges", std::to_string(sim.truth.graph.edge_count()));
  io::write_meta(out_dir / "meta", meta);
  out << "wrote n=" << sim.y.rows() << " p=" << sim.x.cols() << " q=" << sim.y.cols() << " to " << out_dir.string()
      << '\n';
  return ExitCode::ok;
}

// Reads a flat key=value file as if every key sat under the chosen
// subcommand's section, so config files need no [fit] header.
class SubcommandConfig : public CLI::ConfigTOML {
 public:
  explicit SubcommandConfig(std::string section) : section_(std::move(section)) {}
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::stringstream scoped;
    scoped << '[' << section_ << "]\n" << input.rdbuf();
    return CLI::ConfigTOML::from_config(scoped);
  }

 private:
  std::string section_;
};

// CLI11 only reads --config on the top-level app; move a subcommand's
// --config ahead of the subcommand name.
std::vector<std::string> hoist_config(const std::vector<std::string>& args, std::string& section) {
  std::vector<std::string> out, config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto& a = args[i];
    if (section.empty() && !a.empty() && a.front() != '-') section = a;
    if (a == "--config" && i + 1 < args.size()) {
      config = {a, args[++i]};
    } else if (a.rfind("--config=", 0) == 0) {
      config = {a};
    } else {
      out.push_back(a);
    }
  }
  out.insert(out.begin(), config.begin(), config.end());
  return out;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string section;
  args = hoist_config(args, section);
  std::vector<const char*> hoisted{argv[0]};
  for (const auto& a : args) hoisted.push_back(a.c_str());
  CLI::App app{"Covariate-adjusted Gaussian graphical model selection"};
  app.set_version_flag("--version", CGGM_VERSION);
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "key=value file with option values for the subcommand");
  app.config_formatter(std::make_shared<SubcommandConfig>(section));

  RunConfig cfg;
  std::string standardize = "center";
  bool simulate_flag = false;
  SimOptions fit_sim;

  auto* fit = app.add_subcommand("fit", "Run the sampler and write traces and summaries");
  fit->allow_config_extras(CLI::config_extras_mode::ignore);
  fit->add_option("--y", cfg.y_path, "Response CSV (n x q, header row)");
  fit->add_option("--x", cfg.x_path, "Covariate CSV (n x p, header row)");
  fit->add_flag("--simulate", simulate_flag, "Fit simulated data instead of input files");
  fit->add_flag("--no-covariates", cfg.no_covariates, "Graph-only fit without a mean model");
  fit->add_option("--out", cfg.out, "Output directory")->required();
  fit->add_option("--iterations", cfg.iterations, "Recorded iterations after burn-in");
  fit->add_option("--burn-in", cfg.burn_in, "Burn-in iterations");
  fit->add_option("--thin", cfg.thin, "Record every thin-th iteration");
  fit->add_option("--chains", cfg.chains, "Independent chains (seeds seed, seed+1, ...)");
  fit->add_option("--seed", cfg.seed, "Chain seed");
  fit->add_option("--knots", cfg.knots, "Evenly spaced spline knots");
  fit->add_option("--standardize", standardize, "Column preprocessing")
      ->check(CLI::IsMember({"none", "center", "zscore"}));
  std::string g_rule = "n";
  fit->add_option("--g", cfg.g, "g-prior scale (default from --g-rule)");
  fit->add_option("--g-rule", g_rule, "Default g: n or max(n, p^2)")->check(CLI::IsMember({"n", "max-n-p2"}));
  fit->add_option("--b", cfg.hyper.b, "HIW degrees");
  fit->add_option("--d", cfg.hyper.d, "HIW scale d I");
  fit->add_option("--delta", cfg.hyper.delta, "Predictor add probability");
  fit->add_option("--eta", cfg.hyper.eta, "Edge add probability");
  fit->add_option("--alpha-graph", cfg.alpha_graph, "Edge prior inclusion probability");
  fit->add_flag("--ridge-jitter", cfg.hyper.ridge_jitter, "Regularize near-singular Gram matrices");
  fit->add_flag("--save-sigma", cfg.save_sigma, "Draw Sigma and B at save points");
  fit->add_option("--sigma-thin", cfg.sigma_thin, "Records between Sigma/B draws");
  fit->add_option("--cutoff", cfg.cutoff, "Selection cutoff");
  fit->add_option("--curve-points", cfg.curve_points, "Grid points per fitted curve");
  fit->add_option("--audit-every", cfg.audit_every, "Iterations between cache audits (0: off)");
  fit->add_option("--threads", cfg.threads, "Parallel chains (capped by CGGM_THREADS)");
  fit->add_flag("--quiet", cfg.quiet, "No progress lines");
  fit_sim.attach(fit, "--sim-seed");

  SimOptions sim_opts;
  fs::path sim_out;
  auto* simulate = app.add_subcommand("simulate", "Write a synthetic dataset with its ground truth");
  simulate->allow_config_extras(CLI::config_extras_mode::ignore);
  simulate->add_option("--out", sim_out, "Output directory")->required();
  sim_opts.attach(simulate, "--seed");

  fs::path trace_dir, summary_out;
  double cutoff = 0.5;
  auto* summarize = app.add_subcommand("summarize", "Recompute summaries from chain traces");
  summarize->add_option("--trace-dir", trace_dir, "fit output directory or one chain directory")->required();
  summarize->add_option("--cutoff", cutoff, "Selection cutoff");
  summarize->add_option("--out", summary_out, "Output directory (default: trace dir)");

  fs::path roc_probs, roc_truth, roc_out;
  auto* roc = app.add_subcommand("roc", "ROC curve of edge probabilities against a true graph");
  roc->add_option("--edge-prob", roc_probs, "Dense q x q edge probability CSV")->required();
  roc->add_option("--truth", roc_truth, "True edges: i,j list (1-based) or q x q adjacency")->required();
  roc->add_option("--out", roc_out, "Output CSV");

  try {
    app.parse(static_cast<int>(hoisted.size()), hoisted.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ExitCode::ok : ExitCode::validation;
  }

  try {
    if (*fit) {
      cfg.standardize = standardize == "none" ? Standardize::none
                        : standardize == "zscore" ? Standardize::zscore
                                                  : Standardize::center;
      cfg.g_max_n_p2 = g_rule == "max-n-p2";
      if (simulate_flag) {
        cfg.simulation = fit_sim.spec();
        if (fit->get_option("--sim-seed")->count() == 0) cfg.simulation->seed = cfg.seed;
      }
      return cmd_fit(cfg, fit, out, err);
    }
    if (*simulate) return cmd_simulate(sim_opts.spec(), sim_out, simulate, out);
    if (*summarize) return cmd_summarize(trace_dir, summary_out, cutoff, out);
    if (*roc) return cmd_roc(roc_probs, roc_truth, roc_out, out);
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return ExitCode::io;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return ExitCode::numeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::validation;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return ExitCode::io;
  }
  return ExitCode::validation;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"cggm"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace cggm::cli

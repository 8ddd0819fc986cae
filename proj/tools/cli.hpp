#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cggm/likelihood.hpp"
#include "cggm/sampler.hpp"
#include "cggm/simulate.hpp"

namespace cggm::cli {

enum ExitCode : int { ok = 0, validation = 2, numeric = 3, io = 4 };

enum class Standardize { none, center, zscore };

struct RunConfig {
  std::filesystem::path y_path, x_path;
  std::optional<SimulationSpec> simulation;
  bool no_covariates = false;

  Hyperparameters hyper;
  std::optional<double> g;            // overrides g_rule
  bool g_max_n_p2 = false;            // g = max(n, p^2) instead of n
  std::optional<double> alpha_graph;  // defaults to min(2/(q-1), 1/2)

  long iterations = 100000;
  long burn_in = 10000;
  long thin = 1;
  int chains = 1;
  std::uint64_t seed = 1;
  long audit_every = 1000;

  int knots = 10;
  Standardize standardize = Standardize::center;
  bool save_sigma = false;
  long sigma_thin = 100;
  double cutoff = 0.5;
  int curve_points = 101;
  int threads = 0;  // 0: CGGM_THREADS or the OpenMP default
  bool quiet = false;

  std::filesystem::path out;

  /// Throws InvalidArgument on inconsistent or missing inputs.
  void validate() const;
};

/// Entry point shared by the executable and the tests. Never throws; maps
/// errors to ExitCode and writes messages to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Chain count that may run at once: min(requested, CGGM_THREADS) when set.
int effective_threads(int requested);

}  // namespace cggm::cli

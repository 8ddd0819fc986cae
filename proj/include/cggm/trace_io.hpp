#pragma once

// On-disk chain traces, one directory per chain:
//   gamma.csv      iteration,<predictor names...>   0/1 per record
//   edges.csv      iteration,i,j                    1-based, i < j
//   logpost.csv    iteration,log_posterior,log_marginal,gamma_moves,graph_moved
//   sigma.csv      iteration,row,<node names...>    q rows per saved draw
//   precision.csv  same layout as sigma.csv
//   coef.csv       iteration,predictor,basis,<node names...>
//   meta           key=value lines

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cggm/sampler.hpp"

namespace cggm::io {

using Meta = std::vector<std::pair<std::string, std::string>>;

void write_meta(const std::filesystem::path& path, const Meta& meta);
std::map<std::string, std::string> read_meta(const std::filesystem::path& path);

/// `meta` is appended after p and q. Names default to x1.., y1.. when empty.
void write_trace(const std::filesystem::path& dir, const ChainTrace& trace, const Meta& meta,
                 std::vector<std::string> predictor_names = {}, std::vector<std::string> node_names = {});

/// Reads records and, when present, Sigma/precision draws. Coefficient draws
/// are not reloaded. Throws IoError when required files are missing.
ChainTrace read_trace(const std::filesystem::path& dir);

std::vector<std::string> default_names(const std::string& prefix, int count);

}  // namespace cggm::io

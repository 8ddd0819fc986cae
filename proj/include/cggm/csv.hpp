#pragma once

// Minimal numeric CSV: one header row, comma separated, '.' decimal point,
// no quoting. Parsing and formatting are locale independent.

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cggm::csv {

struct Table {
  std::vector<std::string> header;
  Eigen::MatrixXd values;
};

/// Throws IoError if the file cannot be opened, InvalidArgument on ragged
/// rows or non-numeric cells. Lines starting with '#' are skipped.
Table read(const std::filesystem::path& path);

/// Shortest decimal string that reads back to the same double.
std::string format(double value);

void write(const std::filesystem::path& path, const std::vector<std::string>& header,
           const Eigen::MatrixXd& values);

/// Writes `text` verbatim, throwing IoError on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

std::vector<std::string> split(const std::string& line, char sep = ',');

}  // namespace cggm::csv

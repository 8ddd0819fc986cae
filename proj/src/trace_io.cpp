#include "cggm/trace_io.hpp"

#include <fstream>
#include <sstream>

#include "cggm/csv.hpp"
#include "cggm/errors.hpp"

namespace cggm::io {

namespace fs = std::filesystem;

std::vector<std::string> default_names(const std::string& prefix, int count) {
  std::vector<std::string> out;
  for (int i = 1; i <= count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

void write_meta(const fs::path& path, const Meta& meta) {
  std::ostringstream out;
  for (const auto& [k, v] : meta) out << k << '=' << v << '\n';
  csv::write_text(path, out.str());
}

std::map<std::string, std::string> read_meta(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

namespace {

void write_matrix_draws(const fs::path& path, const std::vector<SavedDraw>& draws, bool precision,
                        const std::vector<std::string>& node_names) {
  std::ostringstream out;
  out << "iteration,row";
  for (const auto& n : node_names) out << ',' << n;
  out << '\n';
  for (const auto& d : draws) {
    const Eigen::MatrixXd& m = precision ? d.sigma.precision : d.sigma.sigma;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      out << d.iteration << ',' << r + 1;
      for (Eigen::Index c = 0; c < m.cols(); ++c) out << ',' << csv::format(m(r, c));
      out << '\n';
    }
  }
  csv::write_text(path, out.str());
}

std::vector<std::pair<long, Eigen::MatrixXd>> read_matrix_draws(const fs::path& path, int q) {
  const auto table = csv::read(path);
  if (table.values.cols() != q + 2) throw InvalidArgument(path.string() + ": expected q + 2 columns");
  if (table.values.rows() % q != 0) throw InvalidArgument(path.string() + ": row count is not a multiple of q");
  std::vector<std::pair<long, Eigen::MatrixXd>> out;
  for (Eigen::Index r = 0; r < table.values.rows(); r += q) {
    out.emplace_back(static_cast<long>(table.values(r, 0)), table.values.block(r, 2, q, q));
  }
  return out;
}

}  // namespace

void write_trace(const fs::path& dir, const ChainTrace& trace, const Meta& meta,
                 std::vector<std::string> predictor_names, std::vector<std::string> node_names) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  if (predictor_names.empty()) predictor_names = default_names("x", trace.p);
  if (node_names.empty()) node_names = default_names("y", trace.q);

  Meta full{{"p", std::to_string(trace.p)}, {"q", std::to_string(trace.q)},
            {"records", std::to_string(trace.records.size())}};
  full.insert(full.end(), meta.begin(), meta.end());
  write_meta(dir / "meta", full);

  std::ostringstream gamma, edges, logpost;
  gamma << "iteration";
  for (const auto& n : predictor_names) gamma << ',' << n;
  gamma << '\n';
  edges << "iteration,i,j\n";
  logpost << "iteration,log_posterior,log_marginal,gamma_moves,graph_moved\n";
  for (const auto& r : trace.records) {
    gamma << r.iteration;
    for (auto b : r.gamma) gamma << ',' << int(b);
    gamma << '\n';
    for (auto [i, j] : r.edges) edges << r.iteration << ',' << i + 1 << ',' << j + 1 << '\n';
    logpost << r.iteration << ',' << csv::format(r.log_posterior) << ',' << csv::format(r.log_marginal) << ','
            << r.gamma_moves << ',' << (r.graph_moved ? 1 : 0) << '\n';
  }
  csv::write_text(dir / "gamma.csv", gamma.str());
  csv::write_text(dir / "edges.csv", edges.str());
  csv::write_text(dir / "logpost.csv", logpost.str());

  if (!trace.draws.empty()) {
    write_matrix_draws(dir / "sigma.csv", trace.draws, false, node_names);
    write_matrix_draws(dir / "precision.csv", trace.draws, true, node_names);
    std::ostringstream coef;
    coef << "iteration,predictor,basis";
    for (const auto& n : node_names) coef << ',' << n;
    coef << '\n';
    for (const auto& d : trace.draws) {
      const auto& c = d.coefficients;
      for (std::size_t a = 0; a < c.predictors.size(); ++a) {
        for (int s = 0; s < c.group_size; ++s) {
          const auto row = static_cast<Eigen::Index>(a) * c.group_size + s;
          coef << d.iteration << ',' << c.predictors[a] + 1 << ',' << s;
          for (Eigen::Index j = 0; j < c.coefficients.cols(); ++j) coef << ',' << csv::format(c.coefficients(row, j));
          coef << '\n';
        }
      }
    }
    csv::write_text(dir / "coef.csv", coef.str());
  }
}

ChainTrace read_trace(const fs::path& dir) {
  for (const char* f : {"meta", "gamma.csv", "edges.csv", "logpost.csv"}) {
    if (!fs::exists(dir / f)) throw IoError("trace directory " + dir.string() + " lacks " + f);
  }
  const auto meta = read_meta(dir / "meta");
  ChainTrace trace;
  try {
    trace.p = std::stoi(meta.at("p"));
    trace.q = std::stoi(meta.at("q"));
  } catch (const std::exception&) {
    throw InvalidArgument(dir.string() + "/meta: missing or malformed p/q");
  }

  const auto gamma = csv::read(dir / "gamma.csv");
  const auto logpost = csv::read(dir / "logpost.csv");
  const auto edges = csv::read(dir / "edges.csv");
  if (gamma.values.cols() != trace.p + 1) throw InvalidArgument("gamma.csv width differs from p + 1");
  if (logpost.values.rows() != gamma.values.rows() || logpost.values.cols() != 5) {
    throw InvalidArgument("logpost.csv does not match gamma.csv");
  }
  std::map<long, std::size_t> by_iteration;
  for (Eigen::Index r = 0; r < gamma.values.rows(); ++r) {
    TraceRecord rec;
    rec.iteration = static_cast<long>(gamma.values(r, 0));
    for (int i = 0; i < trace.p; ++i) rec.gamma.push_back(gamma.values(r, i + 1) != 0.0 ? 1 : 0);
    rec.log_posterior = logpost.values(r, 1);
    rec.log_marginal = logpost.values(r, 2);
    rec.gamma_moves = static_cast<int>(logpost.values(r, 3));
    rec.graph_moved = logpost.values(r, 4) != 0.0;
    by_iteration[rec.iteration] = trace.records.size();
    trace.records.push_back(std::move(rec));
  }
  for (Eigen::Index r = 0; r < edges.values.rows(); ++r) {
    const auto it = by_iteration.find(static_cast<long>(edges.values(r, 0)));
    if (it == by_iteration.end()) throw InvalidArgument("edges.csv refers to an unrecorded iteration");
    const int i = static_cast<int>(edges.values(r, 1)) - 1;
    const int j = static_cast<int>(edges.values(r, 2)) - 1;
    if (i < 0 || j <= i || j >= trace.q) throw InvalidArgument("edges.csv has an invalid pair");
    trace.records[it->second].edges.emplace_back(i, j);
  }

  if (fs::exists(dir / "sigma.csv") && fs::exists(dir / "precision.csv")) {
    const auto sig = read_matrix_draws(dir / "sigma.csv", trace.q);
    const auto prec = read_matrix_draws(dir / "precision.csv", trace.q);
    if (sig.size() != prec.size()) throw InvalidArgument("sigma.csv and precision.csv disagree");
    for (std::size_t k = 0; k < sig.size(); ++k) {
      SavedDraw d;
      d.iteration = sig[k].first;
      d.sigma = CovarianceDraw{sig[k].second, prec[k].second};
      trace.draws.push_back(std::move(d));
    }
  }
  return trace;
}

}  // namespace cggm::io

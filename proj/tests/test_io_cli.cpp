#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "cggm/csv.hpp"
#include "cggm/errors.hpp"
#include "cggm/trace_io.hpp"
#include "cli.hpp"
#include "oracles.hpp"

using namespace cggm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cggm_test_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int invoke(const std::vector<std::string>& args, std::string* out_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (out_text) *out_text = out.str();
  return code;
}

std::vector<std::string> small_fit(const fs::path& out) {
  return {"fit", "--simulate", "--n", "80", "--p", "3", "--q", "4", "--support", "1", "--effects", "linear",
          "--iterations", "400", "--burn-in", "50", "--knots", "2", "--seed", "5", "--quiet", "--save-sigma",
          "--sigma-thin", "40", "--out", out.string()};
}

}  // namespace

TEST_CASE("csv round trip") {
  const auto dir = scratch("csv");
  std::mt19937_64 rng(1);
  Eigen::MatrixXd m = oracle::gaussian(7, 3, rng);
  m(0, 0) = 1e-300;
  m(1, 1) = -0.1;
  m(2, 2) = 12345678.125;
  csv::write(dir / "m.csv", {"a", "b", "c"}, m);
  const auto t = csv::read(dir / "m.csv");
  CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
  CHECK(t.values == m);

  csv::write_text(dir / "ragged.csv", "a,b\n1,2\n3\n");
  CHECK_THROWS_AS(csv::read(dir / "ragged.csv"), InvalidArgument);
  csv::write_text(dir / "text.csv", "a,b\n1,zz\n");
  CHECK_THROWS_AS(csv::read(dir / "text.csv"), InvalidArgument);
  csv::write_text(dir / "comment.csv", "# note\na\n2.5\n");
  CHECK(csv::read(dir / "comment.csv").values(0, 0) == 2.5);
  CHECK_THROWS_AS(csv::read(dir / "absent.csv"), IoError);
  fs::remove_all(dir);
}

TEST_CASE("trace round trip") {
  const auto dir = scratch("trace");
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd x = oracle::gaussian(40, 3, rng);
  Eigen::MatrixXd y = oracle::gaussian(40, 4, rng);
  y.col(0) += x.col(1);
  auto u = build_basis(x, {0.0});
  u.center_columns();
  const ModelData data(y, u);
  Schedule s;
  s.iterations = 200;
  s.burn_in = 10;
  s.thin = 3;
  s.save_sigma = true;
  s.sigma_thin = 10;
  const auto trace = run_chain(data, Hyperparameters::defaults(40, 4), s);

  io::write_trace(dir, trace, {{"seed", "1"}}, {}, {"a", "b", "c", "d"});
  const auto meta = io::read_meta(dir / "meta");
  CHECK(meta.at("p") == "3");
  CHECK(meta.at("q") == "4");
  CHECK(meta.at("seed") == "1");
  CHECK(csv::read(dir / "sigma.csv").header == std::vector<std::string>{"iteration", "row", "a", "b", "c", "d"});

  const auto back = io::read_trace(dir);
  CHECK(back.p == 3);
  CHECK(back.q == 4);
  REQUIRE(back.records.size() == trace.records.size());
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    CHECK(back.records[i].iteration == trace.records[i].iteration);
    CHECK(back.records[i].gamma == trace.records[i].gamma);
    CHECK(back.records[i].edges == trace.records[i].edges);
    CHECK(back.records[i].log_posterior == trace.records[i].log_posterior);
    CHECK(back.records[i].log_marginal == trace.records[i].log_marginal);
    CHECK(back.records[i].gamma_moves == trace.records[i].gamma_moves);
    CHECK(back.records[i].graph_moved == trace.records[i].graph_moved);
  }
  REQUIRE(back.draws.size() == trace.draws.size());
  for (std::size_t i = 0; i < trace.draws.size(); ++i) {
    CHECK(back.draws[i].iteration == trace.draws[i].iteration);
    CHECK(back.draws[i].sigma.sigma == trace.draws[i].sigma.sigma);
    CHECK(back.draws[i].sigma.precision == trace.draws[i].sigma.precision);
  }

  fs::remove(dir / "edges.csv");
  CHECK_THROWS_AS(io::read_trace(dir), IoError);
  CHECK_THROWS_AS(io::read_trace(dir / "nowhere"), IoError);
  CHECK(io::default_names("x", 3) == std::vector<std::string>{"x1", "x2", "x3"});
  fs::remove_all(dir);
}

TEST_CASE("fit, summarize and replay") {
  const auto dir = scratch("fit");
  std::string out;
  REQUIRE(invoke(small_fit(dir / "a"), &out) == cli::ok);
  CHECK(out.find("auc=") != std::string::npos);
  for (const char* f : {"edge_prob.csv", "incl_prob.csv", "partial_corr.csv", "selected_edges.csv", "hubs.csv",
                        "summary.meta", "meta", "report.txt", "roc.csv", "truth_edges.csv", "X.csv", "Y.csv",
                        "chain_1/gamma.csv", "chain_1/edges.csv", "chain_1/sigma.csv"})
    CHECK_MESSAGE(fs::exists(dir / "a" / f), std::string(f));

  const auto probs = csv::read(dir / "a" / "edge_prob.csv").values;
  CHECK(probs.rows() == 4);
  CHECK((probs - probs.transpose()).isZero());

  SUBCASE("same seed, same output") {
    REQUIRE(invoke(small_fit(dir / "b")) == cli::ok);
    CHECK(slurp(dir / "a" / "edge_prob.csv") == slurp(dir / "b" / "edge_prob.csv"));
    CHECK(slurp(dir / "a" / "chain_1" / "gamma.csv") == slurp(dir / "b" / "chain_1" / "gamma.csv"));
  }
  SUBCASE("summaries recomputed from traces") {
    REQUIRE(invoke({"summarize", "--trace-dir", (dir / "a").string(), "--out", (dir / "s").string()}) == cli::ok);
    CHECK(slurp(dir / "a" / "edge_prob.csv") == slurp(dir / "s" / "edge_prob.csv"));
    CHECK(slurp(dir / "a" / "incl_prob.csv") == slurp(dir / "s" / "incl_prob.csv"));
    REQUIRE(invoke({"summarize", "--trace-dir", (dir / "a" / "chain_1").string(), "--out",
                 (dir / "s1").string()}) == cli::ok);
    CHECK(slurp(dir / "a" / "edge_prob.csv") == slurp(dir / "s1" / "edge_prob.csv"));
  }
  SUBCASE("meta replays as a config file") {
    REQUIRE(invoke({"fit", "--config", (dir / "a" / "meta").string(), "--out", (dir / "r").string()}) ==
            cli::ok);
    CHECK(slurp(dir / "a" / "edge_prob.csv") == slurp(dir / "r" / "edge_prob.csv"));
    REQUIRE(invoke({"fit", "--config", (dir / "a" / "meta").string(), "--seed", "6", "--out",
                 (dir / "r6").string()}) == cli::ok);
    CHECK(io::read_meta(dir / "r6" / "meta").at("seed") == "6");

    const std::vector<std::string> preset{"fit", "--simulate", "--preset", "full", "--n", "60", "--q", "4",
                                          "--iterations", "20", "--burn-in", "0", "--knots", "1", "--quiet",
                                          "--out", (dir / "p1").string()};
    REQUIRE(invoke(preset) == cli::ok);
    REQUIRE(invoke({"fit", "--config", (dir / "p1" / "meta").string(), "--out", (dir / "p2").string()}) == cli::ok);
    CHECK(slurp(dir / "p1" / "Y.csv") == slurp(dir / "p2" / "Y.csv"));
    CHECK(csv::read(dir / "p2" / "X.csv").values.cols() == 30);
  }
  SUBCASE("fit from files") {
    REQUIRE(invoke({"fit", "--y", (dir / "a" / "Y.csv").string(), "--x", (dir / "a" / "X.csv").string(),
                 "--iterations", "100", "--burn-in", "10", "--knots", "2", "--quiet", "--out",
                 (dir / "f").string()}) == cli::ok);
    CHECK(csv::read(dir / "f" / "incl_prob.csv").values.rows() == 3);
    REQUIRE(invoke({"fit", "--y", (dir / "a" / "Y.csv").string(), "--no-covariates", "--iterations", "100",
                 "--burn-in", "10", "--quiet", "--out", (dir / "g").string()}) == cli::ok);
  }
  fs::remove_all(dir);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  CHECK(invoke({"fit", "--y", (dir / "missing.csv").string(), "--x", (dir / "missing_x.csv").string(),
             "--out", (dir / "o").string()}) == cli::validation);
  CHECK(invoke({"fit", "--simulate", "--iterations", "-4", "--out", (dir / "o").string()}) == cli::validation);
  CHECK(invoke({"fit", "--simulate", "--b", "1.5", "--out", (dir / "o").string()}) == cli::validation);
  CHECK(invoke({"fit", "--simulate", "--support", "99", "--effects", "sin", "--out", (dir / "o").string()}) ==
        cli::validation);
  CHECK(invoke({"frobnicate"}) == cli::validation);
  fs::create_directories(dir / "empty");
  CHECK(invoke({"summarize", "--trace-dir", (dir / "empty").string()}) == cli::validation);
  csv::write_text(dir / "y.csv", "a,b\n1,2\n3,4\n");
  csv::write_text(dir / "x.csv", "c\n1\n");
  CHECK(invoke({"fit", "--y", (dir / "y.csv").string(), "--x", (dir / "x.csv").string(), "--out",
             (dir / "o").string()}) == cli::validation);
  fs::remove_all(dir);
}

TEST_CASE("roc command") {
  const auto dir = scratch("roc");
  csv::write_text(dir / "truth.csv", "i,j\n1,2\n");
  Eigen::MatrixXd perfect = Eigen::MatrixXd::Zero(3, 3);
  perfect(0, 1) = perfect(1, 0) = 0.8;
  perfect(1, 2) = perfect(2, 1) = 0.1;
  csv::write(dir / "perfect.csv", {"a", "b", "c"}, perfect);
  csv::write(dir / "flat.csv", {"a", "b", "c"}, Eigen::MatrixXd::Constant(3, 3, 0.3));
  std::string out;
  REQUIRE(invoke({"roc", "--edge-prob", (dir / "perfect.csv").string(), "--truth", (dir / "truth.csv").string(),
               "--out", (dir / "roc.csv").string()},
              &out) == cli::ok);
  CHECK(out.find("auc=1") != std::string::npos);
  CHECK(fs::exists(dir / "roc.csv"));
  REQUIRE(invoke({"roc", "--edge-prob", (dir / "flat.csv").string(), "--truth", (dir / "truth.csv").string()},
              &out) == cli::ok);
  CHECK(out.find("auc=0.5") != std::string::npos);

  csv::write_text(dir / "adj.csv", "a,b,c\n1,1,0\n1,1,0\n0,0,1\n");
  REQUIRE(invoke({"roc", "--edge-prob", (dir / "perfect.csv").string(), "--truth", (dir / "adj.csv").string()},
              &out) == cli::ok);
  CHECK(out.find("auc=1") != std::string::npos);
  CHECK(invoke({"roc", "--edge-prob", (dir / "nope.csv").string(), "--truth", (dir / "adj.csv").string()}) !=
        cli::ok);
  fs::remove_all(dir);
}

TEST_CASE("thread cap") {
  CHECK(cli::effective_threads(3) >= 1);
  CHECK(cli::effective_threads(1) == 1);
}

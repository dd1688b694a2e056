// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace eerelay;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "eerelay-cli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("eerelay_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("grid specs") {
  const auto g = cli::parse_grid("pmax=2:8:2");
  CHECK(g.param == "pmax");
  CHECK(g.values == std::vector<double>{2, 4, 6, 8});
  const auto one = cli::parse_grid("5");
  CHECK(one.param.empty());
  CHECK(one.values == std::vector<double>{5});
  CHECK(cli::parse_grid("rt_min = 1:2:0.5").values.size() == 3);
  CHECK_THROWS_AS(cli::parse_grid("1:2"), ConfigError);
  CHECK_THROWS_AS(cli::parse_grid("3:1:1"), ConfigError);
  CHECK_THROWS_AS(cli::parse_grid("1:2:0"), ConfigError);
}

TEST_CASE("solve on the default configuration") {
  const auto dir = scratch("solve");
  const auto r = run_cli({"solve", "--config", "defaults", "--seed", "7", "--out", dir.string()});
  CHECK(r.code == cli::kOk);
  CHECK(r.err.empty());
  CHECK(r.out.find("ee") != std::string::npos);
  CHECK(r.out.find("alpha") != std::string::npos);
  CHECK(fs::exists(dir / "trace.csv"));
  CHECK(slurp(dir / "trace.csv").rfind("iteration,ee,alpha", 0) == 0);
}

TEST_CASE("an impossible rate target exits 2 and names the constraint") {
  const auto dir = scratch("infeasible");
  const auto r = run_cli({"solve", "--set", "rt_min=100", "--out", dir.string()});
  CHECK(r.code == cli::kInfeasible);
  CHECK(lines(r.err) == 1);
  CHECK(r.err.rfind("error: infeasible:", 0) == 0);
  CHECK(r.err.find("rate_tr") != std::string::npos);
}

TEST_CASE("configuration errors exit 1 with one line") {
  const auto dir = scratch("config");
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"solve", "--set", "no_such_key=1", "--out", dir.string()},
           {"solve", "--set", "p1_max=-1", "--out", dir.string()},
           {"solve", "--config", (dir / "missing.cfg").string()},
           {"sweep", "--grid", "pmax=8:2:1", "--out", dir.string()}}) {
    const auto r = run_cli(args);
    CHECK(r.code == cli::kConfigError);
    CHECK(lines(r.err) == 1);
    CHECK(r.err.rfind("error: config:", 0) == 0);
  }
  const auto usage = run_cli({"solve", "--bogus"});
  CHECK(usage.code == cli::kConfigError);
  CHECK(usage.err.rfind("error: usage:", 0) == 0);
  CHECK(run_cli({}).code == cli::kConfigError);
  CHECK(run_cli({"solve", "--mode", "rayleigh"}).code == cli::kConfigError);
}

TEST_CASE("config files and overrides") {
  const auto dir = scratch("file");
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "net.cfg");
    cfg << "# small caps\npmax = 4\nrt_min = 0.5\nsolver.alt_tol = 1e-7\n";
  }
  const auto r = run_cli({"solve", "--config", (dir / "net.cfg").string(), "--set", "rt_min=0.25", "--out",
                          dir.string()});
  CHECK(r.code == cli::kOk);
}

TEST_CASE("sweep writes one aggregate row per grid value and baseline") {
  const auto dir = scratch("sweep");
  const auto r = run_cli({"sweep", "--grid", "pmax=2:8:2", "--realizations", "3", "--out", dir.string(), "--plot"});
  CHECK(r.code == cli::kOk);
  const auto agg = slurp(dir / "aggregate.csv");
  CHECK(lines(agg) == 1 + 4 * 3);
  CHECK(lines(slurp(dir / "records.csv")) == 1 + 4 * 3 * 3);
  CHECK(slurp(dir / "chart.svg").find("</svg>") != std::string::npos);
}

TEST_CASE("feasibility, convergence and multistart plans") {
  const auto dir = scratch("plans");
  auto f = run_cli({"feasibility", "--grid", "rt_min=1:3:1", "--realizations", "3", "--out", (dir / "f").string()});
  CHECK(f.code == cli::kOk);
  CHECK(lines(slurp(dir / "f" / "feasibility.csv")) == 4);

  auto c = run_cli({"convergence", "--starts", "3", "--realizations", "2", "--out", (dir / "c").string()});
  CHECK(c.code == cli::kOk);
  CHECK(slurp(dir / "c" / "traces.csv").rfind("init,iteration", 0) == 0);

  auto m = run_cli({"multistart", "--grid", "snr=10:40:30", "--realizations", "2", "--starts", "3", "--out",
                    (dir / "m").string()});
  CHECK(m.code == cli::kOk);
  CHECK(lines(slurp(dir / "m" / "gaps.csv")) == 3);
}

TEST_CASE("repeated plans give identical files") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  for (const auto& d : {a, b})
    REQUIRE(run_cli({"sweep", "--grid", "pmax=4:8:4", "--realizations", "2", "--seed", "5", "--out", d.string()})
                .code == cli::kOk);
  CHECK(slurp(a / "records.csv") == slurp(b / "records.csv"));
  CHECK(slurp(a / "aggregate.csv") == slurp(b / "aggregate.csv"));
}

TEST_CASE("props-check passes") {
  const auto r = run_cli({"props-check", "--realizations", "100"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("PASS") != std::string::npos);
}

TEST_CASE("unwritable output directory is an I/O error") {
  const auto dir = scratch("io");
  fs::create_directories(dir);
  { std::ofstream(dir / "file") << "x"; }
  const auto r = run_cli({"solve", "--out", (dir / "file" / "sub").string()});
  CHECK(r.code == cli::kIoError);
  CHECK(r.err.rfind("error: io:", 0) == 0);
}

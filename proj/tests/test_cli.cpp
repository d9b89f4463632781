#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "floqflow/config.hpp"
#include "floqflow/csv.hpp"
#include "floqflow/errors.hpp"
#include "floqflow/experiments.hpp"
#include "floqflow/numerics.hpp"

using namespace floqflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("floqflow_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FLOQFLOW_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("defaults exist for every command") {
  for (const auto& c : known_commands()) {
    const auto cfg = ExperimentConfig::defaults(c);
    CHECK(cfg.command() == c);
    CHECK(cfg.integer("threads") == 1);
  }
  CHECK_THROWS_AS(ExperimentConfig::defaults("plot"), ConfigError);
}

TEST_CASE("overrides and merges") {
  auto cfg = ExperimentConfig::defaults("scan-freezing");
  cfg.apply_override("flow.step=0.002");
  CHECK(cfg.number("flow.step") == 0.002);
  cfg.apply_override("model.boundary=open");
  CHECK(cfg.string("model.boundary") == "open");
  CHECK(cfg.chain().boundary == Boundary::open);
  cfg.apply_override("scan.ratios=[0.5,0.6]");
  CHECK(cfg.grid("scan.ratios") == std::vector<double>{0.5, 0.6});
  CHECK_THROWS_AS(cfg.apply_override("flow.stepp=1"), ConfigError);
  CHECK_THROWS_AS(cfg.apply_override("flow.step"), ConfigError);
  CHECK_THROWS_AS(cfg.merge(Json{{"model", {{"spin", 1}}}}), ConfigError);
  cfg.merge(Json{{"model", {{"L", 6}}}});
  CHECK(cfg.chain().L == 6);
  CHECK(cfg.chain().J2 == 0.2);

  cfg.apply_override("model.L=1");
  CHECK_THROWS_AS(cfg.chain(), ConfigError);
  cfg.apply_override("model.boundary=helical");
  CHECK_THROWS_AS(cfg.chain(), ConfigError);
}

TEST_CASE("grids") {
  auto cfg = ExperimentConfig::defaults("oscillator");
  cfg.apply_override(R"(scan.ratios={"start":1,"stop":2,"step":0.25})");
  CHECK(cfg.grid("scan.ratios") == std::vector<double>{1.0, 1.25, 1.5, 1.75, 2.0});
  cfg.apply_override(R"(scan.ratios={"start":1,"stop":100,"count":3,"log":true})");
  const auto g = cfg.grid("scan.ratios");
  REQUIRE(g.size() == 3);
  CHECK(g[1] == doctest::Approx(10.0));
  cfg.apply_override("scan.ratios=[]");
  CHECK_THROWS_AS(cfg.grid("scan.ratios"), ConfigError);
  cfg.apply_override("scan.ratios=[2,1]");
  CHECK_THROWS_AS(cfg.grid("scan.ratios"), ConfigError);
}

TEST_CASE("config file merge") {
  const auto dir = scratch("cfg");
  fs::create_directories(dir);
  std::ofstream(dir / "c.json") << R"({"oscillator": {"omega0": 0.5}})";
  auto cfg = ExperimentConfig::defaults("oscillator");
  cfg.merge_file(dir / "c.json");
  CHECK(cfg.oscillator().omega0 == 0.5);
  std::ofstream(dir / "bad.json") << "{oscillator";
  CHECK_THROWS_AS(cfg.merge_file(dir / "bad.json"), ConfigError);
  CHECK_THROWS_AS(cfg.merge_file(dir / "missing.json"), ConfigError);
}

TEST_CASE("csv round trip at full precision") {
  const auto dir = scratch("csv");
  fs::create_directories(dir);
  const double x = 0.1 + 0.2, y = 1.0 / 3.0;
  {
    CsvWriter w(dir / "t.csv", {"a", "b"});
    w.row({x, y});
    w.row({std::nan(""), -INFINITY});
    w.close();
  }
  const auto t = read_csv(dir / "t.csv");
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][0] == x);
  CHECK(t.rows[0][1] == y);
  CHECK(std::isnan(t.rows[1][0]));
  CHECK(t.rows[1][1] == -INFINITY);
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("numerics helpers") {
  const auto f = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK_THROWS_AS(fit_line({1}, {1}), PreconditionError);
  CHECK_THROWS_AS(fit_line({1, 1}, {1, 2}), PreconditionError);

  const auto g = golden_section([](double x) { return (x - 0.3) * (x - 0.3); }, 0.0, 1.0, 1e-8);
  CHECK(g.x == doctest::Approx(0.3).epsilon(1e-7));

  // one deep dip, one shallow wiggle
  const std::vector<double> v = {5, 4, 1, 4, 5, 4.5, 4.4, 4.6, 3};
  const auto d = find_dips(v, 2.0);
  REQUIRE(d.size() == 1);
  CHECK(d[0] == 2);
  CHECK(find_dips(v, 1.01).size() == 2);
}

TEST_CASE("parallel_map keeps index order and propagates the first error") {
  const auto out = parallel_map<int>(50, 4, [](std::size_t i) { return int(i * i); });
  for (std::size_t i = 0; i < 50; ++i) CHECK(out[i] == int(i * i));
  CHECK(parallel_map<int>(0, 3, [](std::size_t) { return 1; }).empty());
  try {
    parallel_map<int>(10, 3, [](std::size_t i) -> int {
      if (i == 3 || i == 7) throw ConfigError("bad " + std::to_string(i));
      return 0;
    });
    FAIL("expected an exception");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()) == "bad 3");
  }
}

TEST_CASE("oscillator command writes manifests and deterministic data") {
  auto cfg = ExperimentConfig::defaults("oscillator");
  cfg.apply_override("scan.ratios=[2.2,2.3,2.4,2.5,2.6]");
  cfg.apply_override("scan.trajectory_ratios=[2.404826]");
  RunContext a{scratch("osc_a"), 1, nullptr}, b{scratch("osc_b"), 3, nullptr};
  const auto m = run_command(cfg, a);
  run_command(cfg, b);
  CHECK(m.at("command") == "oscillator");
  CHECK(m.at("provenance").contains("version"));
  const auto& minima = m.at("results").at("minima");
  REQUIRE(minima.size() == 1);
  CHECK(std::abs(minima[0].at("ratio").get<double>() - 2.404826) <= 1e-3);
  for (const char* f : {"freezing_scan.csv", "freezing_minima.csv", "trajectory_000.csv"})
    CHECK(slurp(a.out_dir / f) == slurp(b.out_dir / f));
  CHECK(fs::exists(a.out_dir / "config.json"));
  CHECK(fs::exists(a.out_dir / "manifest.json"));
}

TEST_CASE("small scan is thread-count independent") {
  auto cfg = ExperimentConfig::defaults("scan-freezing");
  cfg.merge(Json::parse(R"({"model": {"L": 5}, "flow": {"step": 0.01, "lambda_c": 0.5},
                            "scan": {"ratios": [0.5, 0.6, 0.7], "refine": false}})"));
  RunContext a{scratch("scan_a"), 1, nullptr}, b{scratch("scan_b"), 2, nullptr};
  run_command(cfg, a);
  run_command(cfg, b);
  CHECK(slurp(a.out_dir / "scan.csv") == slurp(b.out_dir / "scan.csv"));
  CHECK(slurp(a.out_dir / "trajectories/flow_002.csv") ==
        slurp(b.out_dir / "trajectories/flow_002.csv"));
  const auto t = read_csv(a.out_dir / "trajectories/flow_000.csv");
  CHECK(t.header == std::vector<std::string>{"lambda", "normH0", "normH1", "P", "Q"});
}

TEST_CASE("dynamics with zero periods writes a header-only series") {
  auto cfg = ExperimentConfig::defaults("dynamics");
  cfg.merge(Json::parse(R"({"model": {"L": 4, "J2": 0.0}, "flow": {"step": 0.005},
                            "dynamics": {"ratios": [0.601], "n_periods": 0, "histogram": false}})"));
  RunContext ctx{scratch("dyn0"), 1, nullptr};
  run_command(cfg, ctx);
  CHECK(slurp(ctx.out_dir / "series_000.csv") == "n,t,s_exact,s_eff\n");
}

TEST_CASE("frequency scaling needs two frequencies") {
  auto cfg = ExperimentConfig::defaults("frequency-scaling");
  cfg.apply_override("scan.omegas=[10]");
  RunContext ctx{scratch("fs1"), 1, nullptr};
  CHECK_THROWS_AS(run_command(cfg, ctx), ConfigError);
}

TEST_CASE("command line exit codes") {
  const auto out = scratch("cli");
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("--version") == 0);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("oscillator --out " + out.string() + " --override scan.ratios=[]") == 2);
  CHECK(run_cli("oscillator --out " + out.string() + " --override nope=1") == 2);
  CHECK(run_cli("oscillator --out " + out.string() + " --config /nonexistent.json") == 2);
  // step * Omega above the stability guard is a numerical failure
  CHECK(run_cli("oscillator --out " + out.string() + " --override oscillator.step_omega=0.5") == 3);
  CHECK(run_cli("oscillator --quiet --out " + out.string() +
                " --override 'scan.ratios=[2.3,2.4,2.5]' --override 'scan.trajectory_ratios=[]'") ==
        0);
  CHECK(fs::exists(out / "manifest.json"));
}

}  // TEST_SUITE

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "vcross/sweep.hpp"

using namespace vcross;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunConfig tiny_config(const fs::path& dir) {
  RunConfig cfg;
  cfg.model = Model::scalar;
  cfg.grid_n = 4;
  cfg.eps_start = 0.0;
  cfg.eps_stop = 0.04;
  cfg.eps_step = 0.02;
  cfg.out_dir = dir.string();
  return cfg;
}

}  // namespace

TEST_CASE("run configuration round-trips through JSON") {
  RunConfig cfg;
  cfg.model = Model::vector;
  cfg.charges = Charges::pm;
  cfg.beta = 2.0 / 3.0;
  cfg.omega = 1.0;
  cfg.delta = 0.1234567890123456;
  cfg.grid_n = 7;
  cfg.eps_start = 0.001;
  cfg.eps_stop = 0.456;
  cfg.eps_step = 0.0123;
  cfg.emit_svg = true;
  cfg.out_dir = "runs/test";
  json j = cfg;
  RunConfig back = j.get<RunConfig>();
  json j2 = back;
  REQUIRE(j == j2);
  REQUIRE(back.delta == cfg.delta);
}

TEST_CASE("sweep artifacts, determinism and resume") {
  const fs::path dir = fs::temp_directory_path() / "vcross_sweep_test";
  fs::remove_all(dir);
  RunConfig cfg = tiny_config(dir);

  SweepResult res = run_sweep(cfg);
  REQUIRE(res.complete);
  REQUIRE(res.steps.size() == 3);  // 0, 0.02, 0.04
  REQUIRE(fs::exists(dir / "branch.csv"));
  REQUIRE(fs::exists(dir / "comparison.csv"));
  REQUIRE(fs::exists(dir / "hh_events.json"));
  REQUIRE(fs::exists(dir / "manifest.json"));
  REQUIRE(fs::exists(dir / "states" / "eps_0.000000.json"));
  REQUIRE(fs::exists(dir / "states" / "eps_0.040000.json"));

  const std::string branch1 = slurp(dir / "branch.csv");
  const std::string comp1 = slurp(dir / "comparison.csv");
  const std::string events1 = slurp(dir / "hh_events.json");

  SECTION("identical rerun is byte-identical") {
    fs::remove_all(dir);
    run_sweep(cfg);
    REQUIRE(slurp(dir / "branch.csv") == branch1);
    REQUIRE(slurp(dir / "comparison.csv") == comp1);
    REQUIRE(slurp(dir / "hh_events.json") == events1);
  }

  SECTION("resume from a truncated run reproduces the same artifacts") {
    // craft an interrupted run: drop the last point from the artifacts
    fs::remove(dir / "states" / "eps_0.040000.json");
    json man = read_json_file(dir / "manifest.json");
    man["completed"] = json::array({0.0, 0.02});
    man["status"] = "running";
    man["last_good_eps"] = 0.02;
    write_json_file(dir / "manifest.json", man);
    fs::remove(dir / "branch.csv");

    SweepResult resumed = run_sweep(cfg, /*resume=*/true);
    REQUIRE(resumed.complete);
    REQUIRE(resumed.steps.size() == 3);
    REQUIRE(slurp(dir / "branch.csv") == branch1);
    REQUIRE(slurp(dir / "comparison.csv") == comp1);
    json man2 = read_json_file(dir / "manifest.json");
    REQUIRE(man2.at("status") == "complete");
  }

  SECTION("resume rejects a different configuration") {
    RunConfig other = cfg;
    other.eps_step = 0.01;
    REQUIRE_THROWS_AS(run_sweep(other, /*resume=*/true), ConfigError);
  }

  SECTION("single-point grid is valid") {
    RunConfig single = cfg;
    single.out_dir = (dir / "single").string();
    single.eps_start = single.eps_stop = 0.02;
    SweepResult r = run_sweep(single);
    REQUIRE(r.complete);
    REQUIRE(r.steps.size() == 1);
    REQUIRE(fs::exists(dir / "single" / "branch.csv"));
  }

  fs::remove_all(dir);
}

TEST_CASE("figures") {
  const fs::path dir = fs::temp_directory_path() / "vcross_fig_test";
  fs::remove_all(dir);
  RunConfig cfg = tiny_config(dir);
  run_sweep(cfg);

  SECTION("scalar run yields figure 1") {
    auto [svg, dat] = emit_figure(dir, 1);
    REQUIRE(fs::exists(svg));
    REQUIRE(fs::exists(dat));
    const std::string body = slurp(svg);
    REQUIRE(body.find("<svg") != std::string::npos);
    REQUIRE(body.find("polyline") != std::string::npos);
    REQUIRE(slurp(dat).find("prediction,im") != std::string::npos);
  }
  SECTION("regime mismatch is a configuration error") {
    REQUIRE_THROWS_AS(emit_figure(dir, 2), ConfigError);
    REQUIRE_THROWS_AS(emit_figure(dir, 4), ConfigError);
  }
  SECTION("missing artifacts are a configuration error") {
    REQUIRE_THROWS_AS(emit_figure(dir / "nowhere", 1), ConfigError);
  }
  fs::remove_all(dir);
}

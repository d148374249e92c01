#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "kdvk/cli.hpp"
#include "kdvk/error.hpp"

using namespace kdvk;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "kdvk");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("kdvk_unit_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("reals with multiples of pi") {
  CHECK(cli::parse_real("3.5") == 3.5);
  CHECK(cli::parse_real("pi") == doctest::Approx(kPi));
  CHECK(cli::parse_real("64pi") == doctest::Approx(64.0 * kPi));
  CHECK(cli::parse_real("64*pi") == doctest::Approx(64.0 * kPi));
  CHECK(cli::parse_real("pi/2") == doctest::Approx(kPi / 2.0));
  CHECK(cli::parse_real("-pi") == doctest::Approx(-kPi));
  CHECK(cli::parse_real("1e-3") == 1e-3);
  CHECK_THROWS_AS(cli::parse_real("pie"), ConfigError);
  CHECK_THROWS_AS(cli::parse_real(""), ConfigError);
  CHECK_THROWS_AS(cli::parse_real("inf"), ConfigError);
}

TEST_CASE("config overrides and rejections") {
  const auto cfg = cli::parse_config("preset = linear-decay\nseed = 7\n[grid]\nn = 2048\n[integrator]\ndealias = yes\n");
  CHECK(cfg.preset == "linear-decay");
  CHECK(cfg.seed == 7);
  CHECK(cfg.grid.n == 2048);
  CHECK(cfg.equation.mu == 0.0);
  CHECK(cfg.integrator.final_time == 5.0);
  CHECK(cli::parse_config("preset = linear-decay\n", std::string("default")).preset == "default");

  CHECK_THROWS_WITH_AS(cli::parse_config("[grid]\nbogus = 1\n"), "config: unknown key 'grid.bogus'", ConfigError);
  CHECK_THROWS_AS(cli::parse_config("[nosuch]\nn = 1\n"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config("preset = nosuch\n"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config("[grid]\nn = 1000\n"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config("[integrator]\nrecord_interval = 0.0007\n"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config("[damping]\ngamma = -1\n"), ConfigError);
  CHECK_THROWS_WITH_AS(cli::parse_config("[equation]\nalpha = 0\n"), doctest::Contains("alpha must be nonzero"),
                       ConfigError);
}

TEST_CASE("preset files resolve to the built-in presets") {
  const fs::path dir = fs::path(KDVK_SOURCE_DIR) / "presets";
  std::size_t seen = 0;
  for (const auto& name : cli::preset_names()) {
    const auto file = dir / (name + ".ini");
    REQUIRE(fs::exists(file));
    CHECK(cli::config_json(cli::load_config(file)) == cli::config_json(cli::preset(name)));
    ++seen;
  }
  CHECK(seen >= 6);
}

TEST_CASE("resolved config JSON materializes every section") {
  const auto j = nlohmann::json::parse(cli::config_json(cli::preset("default")));
  for (const char* key : {"grid", "equation", "damping", "initial", "integrator", "monitors", "picard", "probe"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["grid"]["n"] == 1024);
  CHECK(j["initial"]["amplitude"] == 0.5);
}

TEST_CASE("initial data families") {
  auto cfg = cli::preset("default");
  cfg.grid.n = 256;
  cfg.grid.period = 16.0 * kPi;
  const auto g = cfg.make_grid();
  auto u = cfg.initial_field(g);
  CHECK(u.physical()[128] == doctest::Approx(0.5));  // center at L/2
  cfg.initial.family = "cosine";
  cfg.initial.wavenumber = 0.5;
  u = cfg.initial_field(g);
  CHECK(u.physical()[0] == doctest::Approx(0.5));
  cfg.initial.wavenumber = 0.3;  // not a grid wavenumber
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("exit");
  CHECK(run_cli({"probe", "triangle", "--out", dir.string()}) == cli::kExitOk);
  CHECK(fs::exists(dir / "probe_triangle.json"));
  CHECK(run_cli({"probe", "nosuch", "--out", dir.string()}) == cli::kExitConfig);
  CHECK(run_cli({"simulate", "--preset", "nosuch", "--out", dir.string()}) == cli::kExitConfig);
  CHECK(run_cli({"bogus"}) == cli::kExitConfig);
  CHECK(run_cli({"simulate"}) == cli::kExitConfig);
  const auto bad = dir / "bad.ini";
  std::ofstream(bad) << "[probe]\nweight_a = 0.5\nweight_b = 1\n";
  CHECK(run_cli({"probe", "weight", "--config", bad.string(), "--out", dir.string()}) == cli::kExitConfig);
  std::ofstream(bad) << "[initial]\nfamily = zero\n";
  CHECK(run_cli({"radius", "--config", bad.string(), "--out", dir.string()}) == cli::kExitConfig);
}

TEST_CASE("short simulation writes its artifacts deterministically") {
  const auto dir = scratch("sim");
  const auto ini = dir / "short.ini";
  std::ofstream(ini) << "[grid]\nn = 256\nperiod = 32pi\n[integrator]\ndt = 0.002\nfinal_time = 0.1\nrecord_interval = 0.01\n"
                        "[monitors]\nradius_hi = 4\n";
  const auto a = dir / "a", b = dir / "b";
  REQUIRE(run_cli({"simulate", "--config", ini.string(), "--out", a.string()}) == cli::kExitOk);
  REQUIRE(run_cli({"simulate", "--config", ini.string(), "--out", b.string()}) == cli::kExitOk);
  for (const char* f : {"timeseries.csv", "summary.json"}) CHECK(slurp(a / f) == slurp(b / f));
  const auto csv = slurp(a / "timeseries.csv");
  CHECK(csv.rfind("t,l2,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 12);
  const auto summary = nlohmann::json::parse(slurp(a / "summary.json"));
  CHECK(summary["config"]["grid"]["n"] == 256);
  CHECK(summary.contains("version"));
  for (const auto& entry : fs::directory_iterator(a)) {
    CHECK(entry.path().filename().string().find(".tmp") == std::string::npos);
  }
}

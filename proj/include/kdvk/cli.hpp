#pragma once

// Run configuration, presets and the command implementations behind the
// `kdvk` executable.
//
// Config files are INI: optional top-level `preset` and `seed`, then the
// sections [grid] [equation] [damping] [initial] [integrator] [monitors]
// [picard] [probe]. A preset supplies every value; the file overrides them.
// Unknown sections or keys are rejected.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "kdvk/bourgain.hpp"
#include "kdvk/evolution.hpp"
#include "kdvk/gevrey.hpp"
#include "kdvk/monitors.hpp"
#include "kdvk/probe.hpp"
#include "kdvk/spectral.hpp"

namespace kdvk::cli {

struct GridConfig {
  std::size_t n = 1024;
  double period = 64.0 * std::numbers::pi;
};

struct EquationConfig {
  double alpha = 1.0;
  double beta = 1.0;
  double mu = 1.0;
  double lambda = 1.0;
};

// kind: constant (value), cosine-bump (gamma + amplitude (1 + cos(k x))),
// sinusoid (offset + amplitude sin(k x)). gamma is the declared floor.
struct DampingConfig {
  std::string kind = "constant";
  double value = 1.0;
  double gamma = 1.0;
  double amplitude = 0.5;
  double wavenumber = 1.0;
  double offset = 1.0;
};

// family: sech (A sech((x-c)/w)), gaussian (A exp(-((x-c)/w)^2)), cosine
// (A cos(k x)) or zero. Distances to the center wrap periodically; the center
// defaults to L/2.
struct InitialConfig {
  std::string family = "sech";
  double amplitude = 0.5;
  double width = 1.0;
  std::optional<double> center;
  double wavenumber = 1.0;
};

struct IntegratorSection {
  double dt = 0.0005;
  double final_time = 6.0;
  double record_interval = 0.01;  // must be a whole number of steps
  bool dealias = true;
  double cfl = 0.5;
};

struct MonitorConfig {
  std::vector<double> sigmas;               // empty: {s0, s0/2, s0/4, s0/8}
  std::vector<double> extra_sigmas{0.5};    // always recorded
  double radius_lo = 2.0;
  std::optional<double> radius_hi;          // xi_max / 4 when unset
  std::optional<double> commutator_sigma;
  std::optional<double> sigma0;             // fitted radius of the initial data when unset
  double bookkeeping_delta = 0.5;
  double l2_tolerance = 1e-4;
};

struct PicardConfig {
  BourgainParams params{0.5, 0.55, 0.65, 0.05, 0.25, 256};
  std::size_t iterations = 20;
  double tolerance = 1e-12;
  double oracle_max_dt = 1e-4;
  bool oracle = true;
};

struct ProbeSection {
  ProbeConfig probe;
  double weight_a = 1.0;
  double weight_b = 1.0;
  int weight_sign = 1;
  double weight_range = 100.0;
  std::size_t weight_points = 401;
  double triangle_sigma = 0.5;
  std::size_t triangle_points = 256;
  double triangle_spacing = 0.125;
  std::vector<double> b_sweep{0.51, 0.55, 0.6, 0.65, 0.69};
};

struct RunConfig {
  std::string preset = "default";
  std::uint64_t seed = 42;
  GridConfig grid;
  EquationConfig equation;
  DampingConfig damping;
  InitialConfig initial;
  IntegratorSection integrator;
  MonitorConfig monitors;
  PicardConfig picard;
  ProbeSection probe;

  // Checks every nested invariant; throws ConfigError naming the first violation.
  void validate() const;

  GridSpec make_grid() const;
  EquationParams equation_params() const;
  DampingProfile damping_profile(const GridSpec& grid) const;
  Field initial_field(const GridSpec& grid) const;
  IntegratorConfig integrator_config() const;
  ProbeConfig probe_config() const;  // seed and equation folded in
};

std::vector<std::string> preset_names();
// Throws ConfigError for an unknown name.
RunConfig preset(const std::string& name);

// Parses INI text over a preset. `preset_override` wins over a `preset` key in
// the text. The result is validated.
RunConfig parse_config(const std::string& text,
                       const std::optional<std::string>& preset_override = std::nullopt);
RunConfig load_config(const std::filesystem::path& path,
                      const std::optional<std::string>& preset_override = std::nullopt);

// Resolved config as pretty-printed JSON with every default materialized.
std::string config_json(const RunConfig& cfg);

// Accepts plain reals and multiples of pi: "3.5", "pi", "64pi", "64*pi", "pi/2".
double parse_real(const std::string& text);

struct SimulationResult {
  EvolveOutcome outcome;
  std::vector<double> sigmas;
  std::optional<double> sigma0;
  std::optional<DecayVerdict> verdict;
  std::string verdict_reason;  // why the verdict is absent
  std::optional<AssumptionReport> assumptions;
  std::optional<L2DecayCheck> l2_decay;
  double interpolation_max_ratio = 0.0;
  double radius_min = std::numeric_limits<double>::quiet_NaN();
  double residual_max = std::numeric_limits<double>::quiet_NaN();
};

SimulationResult run_simulation(const RunConfig& cfg);

// Each writes its artifacts into `out` (created if needed) and returns the exit code.
int cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out);
int cmd_radius(const RunConfig& cfg, const std::filesystem::path& out);
int cmd_picard(const RunConfig& cfg, const std::filesystem::path& out);
int cmd_probe(const std::string& kind, const RunConfig& cfg, const std::filesystem::path& out);

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitAbort = 2;

// Full command line entry point. Never throws.
int run(int argc, char** argv);

}  // namespace kdvk::cli

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "kdvk/cli.hpp"
#include "kdvk/error.hpp"

namespace kdvk::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

void write_json(const fs::path& path, const json& j) { write_atomic(path, j.dump(2) + "\n"); }

std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string label(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json header(const RunConfig& cfg, const std::string& command) {
  json j;
  j["version"] = KDVK_VERSION;
  j["command"] = command;
  j["config"] = json::parse(config_json(cfg));
  return j;
}

WavenumberWindow radius_window(const RunConfig& cfg, const GridSpec& g) {
  return {cfg.monitors.radius_lo, cfg.monitors.radius_hi.value_or(default_radius_window(g).hi)};
}

json abort_json(const EvolveOutcome& o) {
  if (!o.abort) return nullptr;
  return {{"message", *o.abort}, {"last_valid_time", o.last_valid_time}};
}

json verdict_json(const DecayVerdict& v) {
  json j;
  j["sigma0"] = v.sigma0;
  j["cap"] = v.cap;
  json entries = json::array();
  for (const auto& e : v.entries) {
    entries.push_back({{"sigma", e.sigma}, {"constant", e.constant}, {"pass", e.pass}});
  }
  j["entries"] = entries;
  j["sigma_star"] = v.sigma_star;
  j["envelope_constant"] = v.envelope_constant;
  j["half_rate_pass"] = v.half_rate_pass;
  j["interpolation_max_ratio"] = v.interpolation_max_ratio;
  j["interpolation_pass"] = v.interpolation_pass;
  j["bookkeeping_delta"] = v.bookkeeping_delta;
  json book = json::array();
  for (const auto& b : v.bookkeeping) {
    book.push_back({{"k", b.k}, {"t", b.t}, {"measured", b.measured},
                    {"increment_sum", b.increment_sum}});
  }
  j["bookkeeping"] = book;
  return j;
}

json assumptions_json(const AssumptionReport& r) {
  return {{"sigma0", r.sigma0},
          {"gamma", r.gamma},
          {"grid_min", r.grid_min},
          {"floor_pass", r.floor_pass},
          {"a_norm", number_or_null(r.a_norm)},
          {"a_norm_certified", r.a_norm_certified},
          {"analytic_class_pass", r.analytic_class_pass}};
}

json fit_json(const RadiusFit& f) {
  return {{"sigma_hat", f.sigma_hat},
          {"intercept", f.intercept},
          {"residual", f.residual},
          {"window", {f.window.lo, f.window.hi}},
          {"modes_used", f.modes_used},
          {"rate_growth", f.rate_growth},
          {"entire_beyond_window", f.entire_beyond_window}};
}

json stats_json(const RatioStats& s) {
  return {{"samples", s.samples}, {"excluded", s.excluded}, {"max", s.max}, {"p99", s.p99},
          {"median", s.median}};
}

json report_json(const ProbeReport& r) {
  json j;
  j["kind"] = r.kind;
  json levels = json::array();
  for (const auto& l : r.levels) {
    json lj;
    lj["label"] = l.label;
    lj["parameter"] = l.parameter;
    lj["n"] = l.n;
    lj["time_samples"] = l.time_samples;
    lj["stats"] = stats_json(l.stats);
    levels.push_back(lj);
  }
  j["levels"] = levels;
  j["growth"] = r.growth;
  j["max_growth"] = r.max_growth;
  j["pass"] = r.pass;
  return j;
}

void ensure_dir(const fs::path& out) { fs::create_directories(out); }

}  // namespace

SimulationResult run_simulation(const RunConfig& cfg) {
  cfg.validate();
  const GridSpec g = cfg.make_grid();
  const EquationParams p = cfg.equation_params();
  const DampingProfile a = cfg.damping_profile(g);
  const Field u0 = cfg.initial_field(g);
  const WavenumberWindow window = radius_window(cfg, g);

  SimulationResult r;
  std::string sigma0_failure;
  if (cfg.monitors.sigma0) {
    r.sigma0 = *cfg.monitors.sigma0;
  } else {
    try {
      r.sigma0 = estimate_radius(u0, window).sigma_hat;
    } catch (const EstimatorError& e) {
      sigma0_failure = e.what();
    }
  }

  std::vector<double> sigmas = cfg.monitors.sigmas;
  if (sigmas.empty() && r.sigma0) sigmas = default_sigma_list(*r.sigma0);
  sigmas.insert(sigmas.end(), cfg.monitors.extra_sigmas.begin(), cfg.monitors.extra_sigmas.end());
  std::sort(sigmas.begin(), sigmas.end(), std::greater<>());
  sigmas.erase(std::unique(sigmas.begin(), sigmas.end()), sigmas.end());
  for (double s : sigmas) check_overflow_guard(g, GevreyWeight(s));
  r.sigmas = sigmas;

  MonitorSet monitors;
  monitors.sigmas = sigmas;
  monitors.radius = true;
  monitors.window = window;
  monitors.commutator_sigma = cfg.monitors.commutator_sigma;

  r.outcome = evolve_checked(State(u0, 0.0), cfg.integrator.final_time, p, a,
                             cfg.integrator_config(), monitors);
  const Trajectory& traj = r.outcome.trajectory;

  for (const auto& rec : traj.records) {
    if (rec.radius) {
      r.radius_min = std::isnan(r.radius_min) ? rec.radius->sigma_hat
                                              : std::min(r.radius_min, rec.radius->sigma_hat);
    }
    if (std::isfinite(rec.l2_identity_residual)) {
      const double v = std::abs(rec.l2_identity_residual);
      r.residual_max = std::isnan(r.residual_max) ? v : std::max(r.residual_max, v);
    }
  }
  for (const auto& s : traj.states) {
    for (double sigma : sigmas) {
      if (sigma <= 0.0) continue;
      r.interpolation_max_ratio =
          std::max(r.interpolation_max_ratio, interpolation_ratio(s.field, GevreyWeight(sigma)));
    }
  }

  const double gamma = cfg.damping.gamma;
  if (gamma > 0.0 && !traj.states.empty()) {
    r.l2_decay = l2_decay_check(traj, gamma, cfg.monitors.l2_tolerance);
  }
  if (r.sigma0) r.assumptions = check_assumptions(a, GevreyWeight(*r.sigma0));

  if (r.outcome.abort) {
    r.verdict_reason = "run aborted: " + *r.outcome.abort;
  } else if (!r.sigma0) {
    r.verdict_reason = "no reference sigma: " + sigma0_failure;
  } else if (!(gamma > 0.0)) {
    r.verdict_reason = "damping floor gamma must be positive for a decay verdict";
  } else {
    try {
      r.verdict = gevrey_decay_verdict(traj, sigmas, gamma, *r.sigma0,
                                       cfg.monitors.bookkeeping_delta);
    } catch (const ConfigError& e) {
      r.verdict_reason = e.what();
    }
  }
  return r;
}

int cmd_simulate(const RunConfig& cfg, const fs::path& out) {
  const SimulationResult r = run_simulation(cfg);
  ensure_dir(out);
  const Trajectory& traj = r.outcome.trajectory;

  std::string csv = "t,l2";
  for (double s : r.sigmas) csv += ",gevrey_sigma_" + label(s);
  csv += ",radius_sigma_hat,radius_residual,l2_identity_residual";
  const bool commutators = cfg.monitors.commutator_sigma.has_value();
  if (commutators) csv += ",commutator_delta,commutator_theta,commutator_gamma";
  csv += "\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& rec : traj.records) {
    csv += sci(rec.t) + "," + sci(rec.l2);
    for (double s : r.sigmas) {
      double v = nan;
      for (const auto& [sigma, norm] : rec.gevrey_norms) {
        if (sigma == s) v = norm;
      }
      csv += "," + sci(v);
    }
    csv += "," + sci(rec.radius ? rec.radius->sigma_hat : nan);
    csv += "," + sci(rec.radius ? rec.radius->residual : nan);
    csv += "," + sci(rec.l2_identity_residual);
    if (commutators) {
      for (int k = 0; k < 3; ++k) {
        csv += "," + sci(rec.commutator_norms ? (*rec.commutator_norms)[k] : nan);
      }
    }
    csv += "\n";
  }
  write_atomic(out / "timeseries.csv", csv);

  json j = header(cfg, "simulate");
  j["records"] = traj.records.size();
  j["final_time"] = traj.states.empty() ? 0.0 : traj.states.back().time;
  j["abort"] = abort_json(r.outcome);
  j["sigmas"] = r.sigmas;
  j["sigma0"] = r.sigma0 ? json(*r.sigma0) : json(nullptr);
  j["verdict"] = r.verdict ? verdict_json(*r.verdict) : json(nullptr);
  j["verdict_reason"] = r.verdict ? json(nullptr) : json(r.verdict_reason);
  j["assumptions"] = r.assumptions ? assumptions_json(*r.assumptions) : json(nullptr);
  if (r.l2_decay) {
    j["l2_decay"] = {{"pass", r.l2_decay->pass},
                     {"tol", r.l2_decay->tol},
                     {"min_slack", r.l2_decay->min_slack},
                     {"max_slack", r.l2_decay->max_slack},
                     {"max_abs_relative_deviation", r.l2_decay->max_abs_relative_deviation}};
  } else {
    j["l2_decay"] = nullptr;
  }
  j["interpolation"] = {{"max_ratio", r.interpolation_max_ratio},
                        {"pass", r.interpolation_max_ratio <= 1.0 + 1e-10}};
  j["radius"] = {{"min_sigma_hat", number_or_null(r.radius_min)}};
  j["l2_identity_residual"] = {{"max_abs", number_or_null(r.residual_max)}};
  write_json(out / "summary.json", j);

  if (r.outcome.abort) {
    std::cerr << "numerical abort: " << *r.outcome.abort << "\n";
    return kExitAbort;
  }
  return kExitOk;
}

int cmd_radius(const RunConfig& cfg, const fs::path& out) {
  cfg.validate();
  const GridSpec g = cfg.make_grid();
  const EquationParams p = cfg.equation_params();
  const DampingProfile a = cfg.damping_profile(g);
  const Field u0 = cfg.initial_field(g);
  const WavenumberWindow window = radius_window(cfg, g);
  (void)estimate_radius(u0, window);  // surfaces an unusable initial state before any compute

  MonitorSet monitors;
  monitors.radius = false;
  const EvolveOutcome o = evolve_checked(State(u0, 0.0), cfg.integrator.final_time, p, a,
                                         cfg.integrator_config(), monitors);
  const RadiusSeries series = radius_over_time(o.trajectory, window);
  ensure_dir(out);

  std::string csv = "t,sigma_hat,intercept,residual,modes_used,rate_growth,entire_beyond_window\n";
  bool all_entire = !series.fits.empty();
  for (std::size_t i = 0; i < series.fits.size(); ++i) {
    const RadiusFit& f = series.fits[i];
    csv += sci(series.times[i]) + "," + sci(f.sigma_hat) + "," + sci(f.intercept) + "," +
           sci(f.residual) + "," + std::to_string(f.modes_used) + "," + sci(f.rate_growth) + "," +
           (f.entire_beyond_window ? "1" : "0") + "\n";
    all_entire = all_entire && f.entire_beyond_window;
  }
  write_atomic(out / "radius.csv", csv);

  json j = header(cfg, "radius");
  j["records"] = series.fits.size();
  j["abort"] = abort_json(o);
  j["min_sigma_hat"] = series.min_sigma_hat;
  j["first"] = series.fits.empty() ? json(nullptr) : fit_json(series.fits.front());
  j["last"] = series.fits.empty() ? json(nullptr) : fit_json(series.fits.back());
  j["entire_beyond_window_throughout"] = all_entire;
  write_json(out / "radius_summary.json", j);

  if (o.abort) {
    std::cerr << "numerical abort: " << *o.abort << "\n";
    return kExitAbort;
  }
  return kExitOk;
}

int cmd_picard(const RunConfig& cfg, const fs::path& out) {
  cfg.validate();
  const GridSpec g = cfg.make_grid();
  const EquationParams p = cfg.equation_params();
  const DampingProfile a = cfg.damping_profile(g);
  const Field u0 = cfg.initial_field(g);
  PicardOptions options;
  options.tolerance = cfg.picard.tolerance;
  options.oracle_max_dt = cfg.picard.oracle_max_dt;
  options.run_oracle = cfg.picard.oracle;
  const PicardReport r = picard_iterate(u0, p, a, cfg.picard.params, cfg.picard.iterations, options);
  ensure_dir(out);

  json j = header(cfg, "picard");
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["diverged"] = r.diverged;
  j["iterate_distances"] = r.iterate_distances;
  j["xsb_distances"] = r.xsb_distances;
  j["contraction_ratios"] = r.contraction_ratios;
  j["max_ratio"] = r.max_ratio;
  j["all_ratios_below_one"] =
      std::all_of(r.contraction_ratios.begin(), r.contraction_ratios.end(),
                  [](double x) { return x < 1.0; });
  j["final_vs_oracle"] = options.run_oracle ? json(r.final_vs_oracle) : json(nullptr);
  j["final_norm"] = r.final_norm;
  j["final_xsb_norm"] = r.final_xsb_norm;
  j["m_diagnostic"] = r.m_diagnostic;
  j["metric_window_end"] = r.metric_window_end;
  j["oracle_window_end"] = r.oracle_window_end;
  j["oracle_dt"] = r.oracle_dt;
  write_json(out / "picard.json", j);
  return kExitOk;
}

int cmd_probe(const std::string& kind, const RunConfig& cfg, const fs::path& out) {
  cfg.validate();
  const ProbeConfig pc = cfg.probe_config();
  json j = header(cfg, "probe");
  j["kind"] = kind;
  if (kind == "bilinear") {
    j["report"] = report_json(probe_bilinear(pc));
  } else if (kind == "trilinear") {
    j["report"] = report_json(probe_trilinear(pc));
  } else if (kind == "damping") {
    const DampingProbeReport r = probe_damping_product(pc);
    j["report"] = {{"gevrey", report_json(r.gevrey)}, {"xsb", report_json(r.xsb)}, {"pass", r.pass}};
  } else if (kind == "weight") {
    const WeightReport r = probe_weight_inequality(cfg.probe.weight_a, cfg.probe.weight_b,
                                                   cfg.probe.weight_sign, cfg.probe.weight_range,
                                                   cfg.probe.weight_points);
    j["report"] = {{"a_exp", r.a_exp},
                   {"b_exp", r.b_exp},
                   {"sign", r.sign},
                   {"range", r.range},
                   {"points", r.points},
                   {"max_ratio", number_or_null(r.max_ratio)},
                   {"doubled_range_max_ratio", number_or_null(r.doubled_range_max_ratio)},
                   {"finite", r.finite},
                   {"range_checked", r.range_checked},
                   {"range_stable", r.range_stable}};
  } else if (kind == "triangle") {
    const TriangleReport r = probe_exponential_triangle(
        cfg.probe.triangle_sigma, cfg.probe.triangle_points, cfg.probe.triangle_spacing);
    j["report"] = {{"sigma", r.sigma},
                   {"points", r.points},
                   {"violations", r.violations},
                   {"max_ratio", r.max_ratio},
                   {"pass", r.pass}};
  } else if (kind == "lipschitz") {
    const GridSpec g(pc.lipschitz_n, pc.period);
    j["report"] = report_json(probe_lipschitz_data_map(pc, cfg.equation_params(),
                                                       cfg.damping_profile(g)));
  } else if (kind == "bilinear-sweep") {
    json reports = json::array();
    const auto rs = probe_bilinear_sweep(pc, cfg.probe.b_sweep);
    for (std::size_t i = 0; i < rs.size(); ++i) {
      json r = report_json(rs[i]);
      r["b"] = cfg.probe.b_sweep[i];
      reports.push_back(r);
    }
    j["report"] = reports;
  } else {
    throw ConfigError("unknown probe kind '" + kind +
                      "' (bilinear, trilinear, damping, weight, triangle, lipschitz, bilinear-sweep)");
  }
  ensure_dir(out);
  write_json(out / ("probe_" + kind + ".json"), j);
  return kExitOk;
}

int run(int argc, char** argv) {
  CLI::App app{"Damped KdV-Kawahara simulator and estimate probes"};
  app.set_version_flag("--version", KDVK_VERSION);
  app.require_subcommand(1);

  std::string config_path;
  std::string preset_name;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string probe_kind;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "INI config file");
    sub->add_option("--preset", preset_name, "base preset");
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_option("--seed", seed, "random seed override");
  };
  auto* sim = app.add_subcommand("simulate", "evolve and write timeseries.csv, summary.json");
  auto* rad = app.add_subcommand("radius", "radius of analyticity over time");
  auto* pic = app.add_subcommand("picard", "Picard iteration of the Duhamel map");
  auto* prb = app.add_subcommand("probe", "randomized estimate probes");
  for (auto* s : {sim, rad, pic, prb}) add_common(s);
  prb->add_option("kind", probe_kind,
                  "bilinear | trilinear | damping | weight | triangle | lipschitz | bilinear-sweep")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    std::optional<std::string> preset_override;
    if (!preset_name.empty()) preset_override = preset_name;
    RunConfig cfg = config_path.empty() ? preset(preset_override.value_or("default"))
                                        : load_config(config_path, preset_override);
    if (seed) cfg.seed = *seed;
    cfg.validate();
    const fs::path out(out_dir);
    if (sim->parsed()) return cmd_simulate(cfg, out);
    if (rad->parsed()) return cmd_radius(cfg, out);
    if (pic->parsed()) return cmd_picard(cfg, out);
    return cmd_probe(probe_kind, cfg, out);
  } catch (const NumericalAbort& e) {
    std::cerr << "numerical abort at t = " << e.last_valid_time() << ": " << e.what() << "\n";
    return kExitAbort;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
  } catch (const EstimatorError& e) {
    std::cerr << "estimator error: " << e.what() << "\n";
  } catch (const OverflowGuardError& e) {
    std::cerr << "overflow guard: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kExitConfig;
}

}  // namespace kdvk::cli

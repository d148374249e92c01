#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include "json.hpp"

#include "kdvk/cli.hpp"
#include "kdvk/error.hpp"

namespace kdvk::cli {

namespace {

using Setter = std::function<void(RunConfig&, const std::string&)>;

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double plain_real(const std::string& s, const std::string& whole) {
  if (s.empty()) throw ConfigError("not a number: '" + whole + "'");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw ConfigError("not a number: '" + whole + "'");
  return v;
}

std::uint64_t parse_unsigned(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
    throw ConfigError("not a nonnegative integer: '" + text + "'");
  }
  errno = 0;
  const auto v = std::strtoull(s.c_str(), nullptr, 10);
  if (errno == ERANGE) throw ConfigError("integer out of range: '" + text + "'");
  return v;
}

int parse_int(const std::string& text) {
  const std::string s = trim(text);
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    const auto v = static_cast<int>(parse_unsigned(s.substr(1)));
    return s[0] == '-' ? -v : v;
  }
  return static_cast<int>(parse_unsigned(s));
}

bool parse_bool(const std::string& text) {
  const std::string s = lower(trim(text));
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw ConfigError("not a boolean: '" + text + "'");
}

bool is_auto(const std::string& text) {
  const std::string s = lower(trim(text));
  return s == "auto" || s == "none" || s.empty();
}

std::optional<double> parse_optional_real(const std::string& text) {
  if (is_auto(text)) return std::nullopt;
  return parse_real(text);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_real_list(const std::string& text) {
  if (is_auto(text)) return {};
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_real(item));
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(text)) out.push_back(parse_unsigned(item));
  return out;
}

template <class T>
Setter real_key(T RunConfig::*section, double T::*field) {
  return [=](RunConfig& c, const std::string& v) { (c.*section).*field = parse_real(v); };
}

Setter picard_real(double BourgainParams::*field) {
  return [=](RunConfig& c, const std::string& v) { c.picard.params.*field = parse_real(v); };
}

Setter probe_bourgain_real(double BourgainParams::*field) {
  return [=](RunConfig& c, const std::string& v) { c.probe.probe.bourgain.*field = parse_real(v); };
}

Setter probe_real(double ProbeConfig::*field) {
  return [=](RunConfig& c, const std::string& v) { c.probe.probe.*field = parse_real(v); };
}

Setter probe_size(std::size_t ProbeConfig::*field) {
  return [=](RunConfig& c, const std::string& v) { c.probe.probe.*field = parse_unsigned(v); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    t["grid.n"] = [](RunConfig& c, const std::string& v) { c.grid.n = parse_unsigned(v); };
    t["grid.period"] = real_key(&RunConfig::grid, &GridConfig::period);

    t["equation.alpha"] = real_key(&RunConfig::equation, &EquationConfig::alpha);
    t["equation.beta"] = real_key(&RunConfig::equation, &EquationConfig::beta);
    t["equation.mu"] = real_key(&RunConfig::equation, &EquationConfig::mu);
    t["equation.lambda"] = real_key(&RunConfig::equation, &EquationConfig::lambda);

    t["damping.kind"] = [](RunConfig& c, const std::string& v) { c.damping.kind = lower(trim(v)); };
    t["damping.value"] = real_key(&RunConfig::damping, &DampingConfig::value);
    t["damping.gamma"] = real_key(&RunConfig::damping, &DampingConfig::gamma);
    t["damping.amplitude"] = real_key(&RunConfig::damping, &DampingConfig::amplitude);
    t["damping.wavenumber"] = real_key(&RunConfig::damping, &DampingConfig::wavenumber);
    t["damping.offset"] = real_key(&RunConfig::damping, &DampingConfig::offset);

    t["initial.family"] = [](RunConfig& c, const std::string& v) { c.initial.family = lower(trim(v)); };
    t["initial.amplitude"] = real_key(&RunConfig::initial, &InitialConfig::amplitude);
    t["initial.width"] = real_key(&RunConfig::initial, &InitialConfig::width);
    t["initial.center"] = [](RunConfig& c, const std::string& v) { c.initial.center = parse_optional_real(v); };
    t["initial.wavenumber"] = real_key(&RunConfig::initial, &InitialConfig::wavenumber);

    t["integrator.dt"] = real_key(&RunConfig::integrator, &IntegratorSection::dt);
    t["integrator.final_time"] = real_key(&RunConfig::integrator, &IntegratorSection::final_time);
    t["integrator.record_interval"] =
        real_key(&RunConfig::integrator, &IntegratorSection::record_interval);
    t["integrator.dealias"] = [](RunConfig& c, const std::string& v) { c.integrator.dealias = parse_bool(v); };
    t["integrator.cfl"] = real_key(&RunConfig::integrator, &IntegratorSection::cfl);

    t["monitors.sigmas"] = [](RunConfig& c, const std::string& v) { c.monitors.sigmas = parse_real_list(v); };
    t["monitors.extra_sigmas"] = [](RunConfig& c, const std::string& v) {
      c.monitors.extra_sigmas = parse_real_list(v);
    };
    t["monitors.radius_lo"] = real_key(&RunConfig::monitors, &MonitorConfig::radius_lo);
    t["monitors.radius_hi"] = [](RunConfig& c, const std::string& v) { c.monitors.radius_hi = parse_optional_real(v); };
    t["monitors.commutator_sigma"] = [](RunConfig& c, const std::string& v) {
      c.monitors.commutator_sigma = parse_optional_real(v);
    };
    t["monitors.sigma0"] = [](RunConfig& c, const std::string& v) { c.monitors.sigma0 = parse_optional_real(v); };
    t["monitors.bookkeeping_delta"] = real_key(&RunConfig::monitors, &MonitorConfig::bookkeeping_delta);
    t["monitors.l2_tolerance"] = real_key(&RunConfig::monitors, &MonitorConfig::l2_tolerance);

    t["picard.sigma"] = picard_real(&BourgainParams::sigma);
    t["picard.b"] = picard_real(&BourgainParams::b);
    t["picard.b_prime"] = picard_real(&BourgainParams::b_prime);
    t["picard.delta"] = picard_real(&BourgainParams::delta);
    t["picard.cutoff_margin"] = picard_real(&BourgainParams::cutoff_margin);
    t["picard.time_samples"] = [](RunConfig& c, const std::string& v) {
      c.picard.params.time_samples = parse_unsigned(v);
    };
    t["picard.iterations"] = [](RunConfig& c, const std::string& v) { c.picard.iterations = parse_unsigned(v); };
    t["picard.tolerance"] = real_key(&RunConfig::picard, &PicardConfig::tolerance);
    t["picard.oracle_max_dt"] = real_key(&RunConfig::picard, &PicardConfig::oracle_max_dt);
    t["picard.oracle"] = [](RunConfig& c, const std::string& v) { c.picard.oracle = parse_bool(v); };

    t["probe.n_samples"] = probe_size(&ProbeConfig::n_samples);
    t["probe.period"] = probe_real(&ProbeConfig::period);
    t["probe.grid_sizes"] = [](RunConfig& c, const std::string& v) {
      c.probe.probe.grid_sizes = parse_size_list(v);
    };
    t["probe.sigma"] = probe_bourgain_real(&BourgainParams::sigma);
    t["probe.b"] = probe_bourgain_real(&BourgainParams::b);
    t["probe.b_prime"] = probe_bourgain_real(&BourgainParams::b_prime);
    t["probe.delta"] = probe_bourgain_real(&BourgainParams::delta);
    t["probe.cutoff_margin"] = probe_bourgain_real(&BourgainParams::cutoff_margin);
    t["probe.time_samples"] = [](RunConfig& c, const std::string& v) {
      c.probe.probe.bourgain.time_samples = parse_unsigned(v);
    };
    t["probe.rho_max"] = probe_real(&ProbeConfig::rho_max);
    t["probe.band_fraction"] = probe_real(&ProbeConfig::band_fraction);
    t["probe.band_limit"] = [](RunConfig& c, const std::string& v) { c.probe.probe.band_limit = parse_optional_real(v); };
    t["probe.max_growth"] = probe_real(&ProbeConfig::max_growth);
    t["probe.mean_zero"] = [](RunConfig& c, const std::string& v) { c.probe.probe.mean_zero = parse_bool(v); };
    t["probe.damping_gamma"] = probe_real(&ProbeConfig::damping_gamma);
    t["probe.damping_amplitude"] = probe_real(&ProbeConfig::damping_amplitude);
    t["probe.damping_wavenumber"] = probe_real(&ProbeConfig::damping_wavenumber);
    t["probe.lipschitz_samples"] = probe_size(&ProbeConfig::lipschitz_samples);
    t["probe.lipschitz_n"] = probe_size(&ProbeConfig::lipschitz_n);
    t["probe.perturbations"] = [](RunConfig& c, const std::string& v) {
      c.probe.probe.perturbations = parse_real_list(v);
    };
    t["probe.lipschitz_amplitude"] = probe_real(&ProbeConfig::lipschitz_amplitude);
    t["probe.lipschitz_dt"] = probe_real(&ProbeConfig::lipschitz_dt);
    t["probe.lipschitz_time"] = probe_real(&ProbeConfig::lipschitz_time);
    t["probe.weight_a"] = real_key(&RunConfig::probe, &ProbeSection::weight_a);
    t["probe.weight_b"] = real_key(&RunConfig::probe, &ProbeSection::weight_b);
    t["probe.weight_sign"] = [](RunConfig& c, const std::string& v) { c.probe.weight_sign = parse_int(v); };
    t["probe.weight_range"] = real_key(&RunConfig::probe, &ProbeSection::weight_range);
    t["probe.weight_points"] = [](RunConfig& c, const std::string& v) {
      c.probe.weight_points = parse_unsigned(v);
    };
    t["probe.triangle_sigma"] = real_key(&RunConfig::probe, &ProbeSection::triangle_sigma);
    t["probe.triangle_points"] = [](RunConfig& c, const std::string& v) {
      c.probe.triangle_points = parse_unsigned(v);
    };
    t["probe.triangle_spacing"] = real_key(&RunConfig::probe, &ProbeSection::triangle_spacing);
    t["probe.b_sweep"] = [](RunConfig& c, const std::string& v) { c.probe.b_sweep = parse_real_list(v); };
    return t;
  }();
  return table;
}

// Whole number of steps: |x - round(x)| tiny relative to x.
bool whole_multiple(double x) {
  return x >= 1.0 - 1e-9 && std::abs(x - std::round(x)) <= 1e-9 * std::max(1.0, x);
}

void check_periodic_wavenumber(double k, double period, const std::string& what) {
  const double m = k * period / (2.0 * std::numbers::pi);
  if (!std::isfinite(m) || std::abs(m - std::round(m)) > 1e-9 * std::max(1.0, std::abs(m))) {
    throw ConfigError(what + " must be a multiple of 2 pi / period");
  }
}

void check_positive(double v, const std::string& what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(what + " must be positive and finite");
}

void check_finite(double v, const std::string& what) {
  if (!std::isfinite(v)) throw ConfigError(what + " must be finite");
}

double wrapped_distance(double x, double c, double period) {
  double d = std::fmod(x - c, period);
  if (d < -0.5 * period) d += period;
  if (d >= 0.5 * period) d -= period;
  return d;
}

}  // namespace

double parse_real(const std::string& text) {
  std::string s = lower(trim(text));
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  const auto p = s.find("pi");
  double v = 0.0;
  if (p == std::string::npos) {
    v = plain_real(s, text);
  } else {
    std::string head = s.substr(0, p);
    std::string tail = s.substr(p + 2);
    if (!head.empty() && head.back() == '*') head.pop_back();
    double scale = 1.0;
    if (head == "-") {
      scale = -1.0;
    } else if (!head.empty()) {
      scale = plain_real(head, text);
    }
    double divisor = 1.0;
    if (!tail.empty()) {
      if (tail[0] != '/') throw ConfigError("not a number: '" + text + "'");
      divisor = plain_real(tail.substr(1), text);
    }
    v = scale * std::numbers::pi / divisor;
  }
  if (!std::isfinite(v)) throw ConfigError("not a finite number: '" + text + "'");
  return v;
}

GridSpec RunConfig::make_grid() const { return GridSpec(grid.n, grid.period); }

EquationParams RunConfig::equation_params() const {
  return EquationParams(equation.alpha, equation.beta, equation.mu, equation.lambda);
}

DampingProfile RunConfig::damping_profile(const GridSpec& g) const {
  if (damping.kind == "constant") return DampingProfile::constant(g, damping.value, damping.gamma);
  if (damping.kind == "cosine-bump") {
    return DampingProfile::cosine_bump(g, damping.gamma, damping.amplitude, damping.wavenumber);
  }
  if (damping.kind == "sinusoid") {
    return DampingProfile::sinusoid(g, damping.offset, damping.amplitude, damping.wavenumber,
                                    damping.gamma);
  }
  throw ConfigError("damping.kind must be constant, cosine-bump or sinusoid");
}

Field RunConfig::initial_field(const GridSpec& g) const {
  const double L = g.period();
  const double c = initial.center.value_or(0.5 * L);
  const double A = initial.amplitude;
  const double w = initial.width;
  if (initial.family == "sech") {
    return Field::from_function(g, [=](double x) {
      return A / std::cosh(wrapped_distance(x, c, L) / w);
    });
  }
  if (initial.family == "gaussian") {
    return Field::from_function(g, [=](double x) {
      const double s = wrapped_distance(x, c, L) / w;
      return A * std::exp(-s * s);
    });
  }
  if (initial.family == "cosine") {
    const double k = initial.wavenumber;
    return Field::from_function(g, [=](double x) { return A * std::cos(k * x); });
  }
  if (initial.family == "zero") return Field::zeros(g);
  throw ConfigError("initial.family must be sech, gaussian, cosine or zero");
}

IntegratorConfig RunConfig::integrator_config() const {
  IntegratorConfig c;
  c.dt = integrator.dt;
  c.dealias = integrator.dealias;
  c.cfl = integrator.cfl;
  c.record_every = static_cast<std::size_t>(std::llround(integrator.record_interval / integrator.dt));
  return c;
}

ProbeConfig RunConfig::probe_config() const {
  ProbeConfig c = probe.probe;
  c.seed = seed;
  c.equation = EquationParams(equation.alpha, equation.beta, equation.mu, equation.lambda);
  return c;
}

void RunConfig::validate() const {
  const GridSpec g = make_grid();
  (void)equation_params();

  if (damping.kind != "constant" && damping.kind != "cosine-bump" && damping.kind != "sinusoid") {
    throw ConfigError("damping.kind must be constant, cosine-bump or sinusoid");
  }
  if (!(damping.gamma >= 0.0) || !std::isfinite(damping.gamma)) {
    throw ConfigError("damping.gamma must be finite and >= 0");
  }
  check_finite(damping.value, "damping.value");
  check_finite(damping.amplitude, "damping.amplitude");
  check_finite(damping.offset, "damping.offset");
  if (damping.kind != "constant") {
    check_periodic_wavenumber(damping.wavenumber, g.period(), "damping.wavenumber");
  }

  if (initial.family != "sech" && initial.family != "gaussian" && initial.family != "cosine" &&
      initial.family != "zero") {
    throw ConfigError("initial.family must be sech, gaussian, cosine or zero");
  }
  check_finite(initial.amplitude, "initial.amplitude");
  check_positive(initial.width, "initial.width");
  if (initial.center) check_finite(*initial.center, "initial.center");
  if (initial.family == "cosine") {
    check_periodic_wavenumber(initial.wavenumber, g.period(), "initial.wavenumber");
  }

  check_positive(integrator.dt, "integrator.dt");
  check_positive(integrator.final_time, "integrator.final_time");
  check_positive(integrator.record_interval, "integrator.record_interval");
  check_positive(integrator.cfl, "integrator.cfl");
  if (!whole_multiple(integrator.record_interval / integrator.dt)) {
    throw ConfigError("integrator.record_interval must be a whole number of steps dt");
  }
  if (!whole_multiple(integrator.final_time / integrator.dt)) {
    throw ConfigError("integrator.final_time must be a whole number of steps dt");
  }
  integrator_config().validate();

  for (double s : monitors.sigmas) check_overflow_guard(g, GevreyWeight(s));
  for (double s : monitors.extra_sigmas) check_overflow_guard(g, GevreyWeight(s));
  if (monitors.sigma0) check_overflow_guard(g, GevreyWeight(*monitors.sigma0));
  if (monitors.commutator_sigma) check_overflow_guard(g, GevreyWeight(*monitors.commutator_sigma));
  check_finite(monitors.radius_lo, "monitors.radius_lo");
  const double hi = monitors.radius_hi.value_or(default_radius_window(g).hi);
  if (!(monitors.radius_lo >= 0.0 && hi > monitors.radius_lo && hi <= g.xi_max())) {
    throw ConfigError("monitors: need 0 <= radius_lo < radius_hi <= xi_max");
  }
  check_positive(monitors.bookkeeping_delta, "monitors.bookkeeping_delta");
  check_positive(monitors.l2_tolerance, "monitors.l2_tolerance");

  picard.params.validate();
  if (picard.iterations < 2) throw ConfigError("picard.iterations must be >= 2");
  check_positive(picard.tolerance, "picard.tolerance");
  check_positive(picard.oracle_max_dt, "picard.oracle_max_dt");

  probe_config().validate();
  if (probe.weight_sign != 1 && probe.weight_sign != -1) {
    throw ConfigError("probe.weight_sign must be 1 or -1");
  }
  check_positive(probe.weight_range, "probe.weight_range");
  if (probe.weight_points < 2) throw ConfigError("probe.weight_points must be >= 2");
  check_finite(probe.weight_a, "probe.weight_a");
  check_finite(probe.weight_b, "probe.weight_b");
  (void)GevreyWeight(probe.triangle_sigma);
  if (probe.triangle_points < 2) throw ConfigError("probe.triangle_points must be >= 2");
  check_positive(probe.triangle_spacing, "probe.triangle_spacing");
  if (probe.b_sweep.empty()) throw ConfigError("probe.b_sweep must not be empty");
  for (double b : probe.b_sweep) {
    if (!(b > 0.5 && b < 0.9)) throw ConfigError("probe.b_sweep values must lie in (1/2, 0.9)");
  }
}

std::vector<std::string> preset_names() {
  return {"default",      "linear-decay",    "no-damping",   "variable-damping",
          "radius-sech",  "radius-gaussian", "picard-small", "picard-linear"};
}

RunConfig preset(const std::string& name) {
  RunConfig c;
  c.preset = name;
  if (name == "default") return c;
  if (name == "linear-decay") {
    c.equation.mu = 0.0;
    c.equation.lambda = 0.0;
    c.integrator.final_time = 5.0;
    return c;
  }
  if (name == "no-damping") {
    c.damping = DampingConfig{"constant", 0.0, 0.0, 0.5, 1.0, 1.0};
    c.integrator.final_time = 1.0;
    return c;
  }
  if (name == "variable-damping") {
    c.damping = DampingConfig{"cosine-bump", 1.0, 0.5, 0.5, 1.0, 1.0};
    // The damped mass oscillates quickly as dispersed waves cross the profile.
    c.integrator.record_interval = 0.0005;
    return c;
  }
  if (name == "radius-sech" || name == "radius-gaussian") {
    c.grid.n = 4096;
    c.initial.family = name == "radius-sech" ? "sech" : "gaussian";
    c.integrator.dt = 0.001;
    c.integrator.final_time = 0.5;
    c.integrator.record_interval = 0.05;
    c.monitors.radius_hi = 16.0;
    if (name == "radius-gaussian") {
      // Products of Gaussians spread the spectrum into a slower tail inside the
      // window; the linear flow keeps |u_hat| fixed.
      c.equation.mu = 0.0;
      c.equation.lambda = 0.0;
    }
    return c;
  }
  if (name == "picard-small" || name == "picard-linear") {
    c.grid.n = 512;
    c.grid.period = 32.0 * std::numbers::pi;
    c.initial.amplitude = 0.1;
    if (name == "picard-linear") {
      c.equation.mu = 0.0;
      c.equation.lambda = 0.0;
      c.damping = DampingConfig{"constant", 0.0, 0.0, 0.5, 1.0, 1.0};
      c.initial.amplitude = 1.0;
    }
    return c;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

RunConfig parse_config(const std::string& text, const std::optional<std::string>& preset_override) {
  // Accept '#' comments as well as ';'.
  std::stringstream cleaned;
  {
    std::stringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      const auto first = line.find_first_not_of(" \t");
      if (first != std::string::npos && line[first] == '#') line[first] = ';';
      cleaned << line << '\n';
    }
  }
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(cleaned, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  std::optional<std::string> preset_name = preset_override;
  std::optional<std::string> seed_text;
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& [key, node] : tree) {
    if (node.empty()) {
      // Top-level key.
      if (key == "preset") {
        if (!preset_name) preset_name = trim(node.data());
      } else if (key == "seed") {
        seed_text = node.data();
      } else {
        throw ConfigError("config: unknown top-level key '" + key + "'");
      }
      continue;
    }
    for (const auto& [name, leaf] : node) {
      if (!leaf.empty()) throw ConfigError("config: nested key '" + key + "." + name + "'");
      entries.emplace_back(key + "." + name, leaf.data());
    }
  }

  RunConfig cfg = preset(preset_name.value_or("default"));
  if (seed_text) cfg.seed = parse_unsigned(*seed_text);
  const auto& table = setters();
  for (const auto& [key, value] : entries) {
    auto it = table.find(key);
    if (it == table.end()) throw ConfigError("config: unknown key '" + key + "'");
    try {
      it->second(cfg, value);
    } catch (const ConfigError& e) {
      throw ConfigError(key + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path,
                      const std::optional<std::string>& preset_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), preset_override);
}

namespace {

nlohmann::ordered_json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json bourgain_json(const BourgainParams& b) {
  nlohmann::ordered_json j;
  j["sigma"] = b.sigma;
  j["b"] = b.b;
  j["b_prime"] = b.b_prime;
  j["delta"] = b.delta;
  j["cutoff_margin"] = b.cutoff_margin;
  j["time_samples"] = b.time_samples;
  return j;
}

}  // namespace

std::string config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["preset"] = c.preset;
  j["seed"] = c.seed;
  j["grid"] = {{"n", c.grid.n}, {"period", c.grid.period}};
  j["equation"] = {{"alpha", c.equation.alpha},
                   {"beta", c.equation.beta},
                   {"mu", c.equation.mu},
                   {"lambda", c.equation.lambda}};
  j["damping"] = {{"kind", c.damping.kind},          {"value", c.damping.value},
                  {"gamma", c.damping.gamma},        {"amplitude", c.damping.amplitude},
                  {"wavenumber", c.damping.wavenumber}, {"offset", c.damping.offset}};
  j["initial"] = {{"family", c.initial.family},
                  {"amplitude", c.initial.amplitude},
                  {"width", c.initial.width},
                  {"center", c.initial.center.value_or(0.5 * c.grid.period)},
                  {"wavenumber", c.initial.wavenumber}};
  j["integrator"] = {{"dt", c.integrator.dt},
                     {"final_time", c.integrator.final_time},
                     {"record_interval", c.integrator.record_interval},
                     {"dealias", c.integrator.dealias},
                     {"cfl", c.integrator.cfl}};
  nlohmann::ordered_json m;
  m["sigmas"] = c.monitors.sigmas.empty() ? nlohmann::ordered_json("auto")
                                          : nlohmann::ordered_json(c.monitors.sigmas);
  m["extra_sigmas"] = c.monitors.extra_sigmas;
  m["radius_lo"] = c.monitors.radius_lo;
  m["radius_hi"] = c.monitors.radius_hi.value_or(c.grid.n * std::numbers::pi / c.grid.period / 4.0);
  m["commutator_sigma"] = optional_json(c.monitors.commutator_sigma);
  m["sigma0"] = c.monitors.sigma0 ? nlohmann::ordered_json(*c.monitors.sigma0)
                                  : nlohmann::ordered_json("auto");
  m["bookkeeping_delta"] = c.monitors.bookkeeping_delta;
  m["l2_tolerance"] = c.monitors.l2_tolerance;
  j["monitors"] = m;
  nlohmann::ordered_json p = bourgain_json(c.picard.params);
  p["iterations"] = c.picard.iterations;
  p["tolerance"] = c.picard.tolerance;
  p["oracle_max_dt"] = c.picard.oracle_max_dt;
  p["oracle"] = c.picard.oracle;
  j["picard"] = p;
  const ProbeConfig& q = c.probe.probe;
  nlohmann::ordered_json pr;
  pr["n_samples"] = q.n_samples;
  pr["period"] = q.period;
  pr["grid_sizes"] = q.grid_sizes;
  const nlohmann::ordered_json qb = bourgain_json(q.bourgain);
  for (const auto& [k, v] : qb.items()) pr[k] = v;
  pr["rho_max"] = q.rho_max;
  pr["band_fraction"] = q.band_fraction;
  pr["band_limit"] = optional_json(q.band_limit);
  pr["max_growth"] = q.max_growth;
  pr["mean_zero"] = q.mean_zero;
  pr["damping_gamma"] = q.damping_gamma;
  pr["damping_amplitude"] = q.damping_amplitude;
  pr["damping_wavenumber"] = q.damping_wavenumber;
  pr["lipschitz_samples"] = q.lipschitz_samples;
  pr["lipschitz_n"] = q.lipschitz_n;
  pr["perturbations"] = q.perturbations;
  pr["lipschitz_amplitude"] = q.lipschitz_amplitude;
  pr["lipschitz_dt"] = q.lipschitz_dt;
  pr["lipschitz_time"] = q.lipschitz_time;
  pr["weight_a"] = c.probe.weight_a;
  pr["weight_b"] = c.probe.weight_b;
  pr["weight_sign"] = c.probe.weight_sign;
  pr["weight_range"] = c.probe.weight_range;
  pr["weight_points"] = c.probe.weight_points;
  pr["triangle_sigma"] = c.probe.triangle_sigma;
  pr["triangle_points"] = c.probe.triangle_points;
  pr["triangle_spacing"] = c.probe.triangle_spacing;
  pr["b_sweep"] = c.probe.b_sweep;
  j["probe"] = pr;
  return j.dump(2);
}

}  // namespace kdvk::cli

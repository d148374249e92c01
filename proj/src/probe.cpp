#include "kdvk/probe.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <string>

#include "fft.hpp"
#include "kdvk/error.hpp"
#include "kdvk/evolution.hpp"
#include "kdvk/parallel.hpp"

namespace kdvk {

namespace {

constexpr double kDenominatorGuard = 1e-14;

cplx unit_phase(double angle) { return {std::cos(angle), std::sin(angle)}; }

std::mt19937_64 draw_engine(std::uint64_t seed, std::uint64_t draw, unsigned stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(draw), static_cast<std::uint32_t>(draw >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

struct DrawCoefficients {
  double rate = 0.0;
  std::vector<cplx> c;        // by integer wave index m >= 0
  std::vector<double> rho;    // modulation frequency per m
};

// Always generates modes 0..max_index so the stream consumption is grid-independent.
DrawCoefficients generate(const ProbeConfig& cfg, std::uint64_t draw, unsigned stream,
                          std::size_t max_index) {
  auto eng = draw_engine(cfg.seed, draw, stream);
  std::uniform_real_distribution<double> rate(cfg.bourgain.sigma, 3.0 * cfg.bourgain.sigma);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  std::uniform_real_distribution<double> mod(-cfg.rho_max, cfg.rho_max);
  DrawCoefficients d;
  d.rate = rate(eng);
  d.c.resize(max_index + 1);
  d.rho.resize(max_index + 1);
  const double dxi = 2.0 * std::numbers::pi / cfg.period;
  for (std::size_t m = 0; m <= max_index; ++m) {
    const double re = normal(eng);
    const double im = normal(eng);
    const double rho = mod(eng);
    const double xi = dxi * static_cast<double>(m);
    const double env = std::exp(-d.rate * xi) / (1.0 + xi);
    d.c[m] = m == 0 ? cplx(cfg.mean_zero ? 0.0 : re * env, 0.0) : cplx(re, im) * env;
    d.rho[m] = m == 0 ? 0.0 : rho;
  }
  return d;
}

std::size_t generation_size(const GridSpec& grid, const ProbeConfig& cfg) {
  std::size_t n = grid.size();
  for (auto g : cfg.grid_sizes) n = std::max(n, g);
  n = std::max(n, cfg.lipschitz_n);
  return n / 2;
}

double max_symbol(double band, const EquationParams& p, double dxi) {
  double mx = 0.0;
  for (double xi = 0.0; xi <= band + 1e-12; xi += dxi) mx = std::max(mx, std::abs(dispersion_symbol(xi, p)));
  return mx;
}

ProbeReport finish(std::string kind, std::vector<RefinementLevel> levels, double allowed) {
  ProbeReport r;
  r.kind = std::move(kind);
  r.levels = std::move(levels);
  r.pass = true;
  for (std::size_t i = 1; i < r.levels.size(); ++i) {
    const double prev = r.levels[i - 1].stats.max;
    const double cur = r.levels[i].stats.max;
    const double g = prev > 0.0 ? cur / prev - 1.0 : (cur > 0.0 ? INFINITY : 0.0);
    r.growth.push_back(g);
  }
  r.max_growth = r.growth.empty() ? 0.0 : *std::max_element(r.growth.begin(), r.growth.end());
  for (const auto& lvl : r.levels) r.pass = r.pass && std::isfinite(lvl.stats.max) && lvl.stats.samples > 0;
  r.pass = r.pass && r.max_growth < allowed;
  return r;
}

RefinementLevel level_for(std::size_t n, std::size_t nt, std::vector<double> ratios) {
  std::vector<double> valid;
  std::size_t excluded = 0;
  for (double r : ratios) {
    if (r < 0.0) {
      ++excluded;
    } else {
      valid.push_back(r);
    }
  }
  RefinementLevel lvl;
  lvl.label = "n=" + std::to_string(n);
  lvl.parameter = static_cast<double>(n);
  lvl.n = n;
  lvl.time_samples = nt;
  lvl.stats = summarize(std::move(valid), excluded);
  return lvl;
}

// Half spectra (k = 0..n/2) of a real spacetime field, slice-major. A constant
// slab repeats one row at every time. The probe drivers work on these directly;
// the SpaceTimeField functions below are the reference path.
struct Slab {
  GridSpec grid;
  double t0 = 0.0;
  double dt = 0.0;
  std::size_t nt = 0;
  std::size_t width = 0;
  bool constant = false;
  std::vector<cplx> c;

  Slab(const GridSpec& g, double t0_, double dt_, std::size_t nt_, bool constant_ = false)
      : grid(g), t0(t0_), dt(dt_), nt(nt_), width(g.size() / 2 + 1), constant(constant_),
        c((constant_ ? 1 : nt_) * width) {}
  cplx* row(std::size_t j) { return c.data() + (constant ? 0 : j * width); }
  const cplx* row(std::size_t j) const { return c.data() + (constant ? 0 : j * width); }
  double time(std::size_t j) const { return t0 + static_cast<double>(j) * dt; }
};

double effective_symbol(const GridSpec& grid, std::size_t k, const EquationParams& p) {
  if (k == grid.nyquist_index()) return 0.0;
  return dispersion_symbol(grid.wavenumber(k), p);
}

Slab draw_slab(const GridSpec& grid, const ProbeConfig& cfg, std::uint64_t draw, unsigned stream,
               double band, std::size_t nt) {
  const auto d = generate(cfg, draw, stream, generation_size(grid, cfg));
  const auto window = make_window(grid, cfg.bourgain.delta, 2);
  const double dt = 2.0 * cfg.bourgain.delta / static_cast<double>(nt);
  Slab u(grid, window.t0, dt, nt);
  std::vector<double> psi(nt);
  for (std::size_t j = 0; j < nt; ++j) {
    psi[j] = cutoff_weight(u.time(j), cfg.bourgain.delta, cfg.bourgain.cutoff_margin);
  }
  for (std::size_t m = 0; m < grid.size() / 2; ++m) {
    const double xi = grid.wavenumber(m);
    if (xi > band + 1e-12) continue;
    const double omega = d.rho[m] - dispersion_symbol(xi, cfg.equation);
    for (std::size_t j = 0; j < nt; ++j) {
      if (psi[j] == 0.0) continue;
      const cplx v = psi[j] * d.c[m] * unit_phase(omega * u.time(j));
      u.row(j)[m] = m == 0 ? cplx(v.real(), 0.0) : v;
    }
  }
  return u;
}

Slab constant_slab(const Field& f, const Slab& like) {
  Slab out(like.grid, like.t0, like.dt, like.nt, true);
  auto c = f.spectral();
  std::copy(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(out.width), out.c.begin());
  return out;
}

// Slice-wise dealiased product of real slabs; same arithmetic as dealias_product.
Slab slab_product(std::span<const Slab* const> factors) {
  const Slab& first = *factors[0];
  const auto& grid = first.grid;
  const std::size_t n = grid.size();
  const std::size_t m = padded_size(n, factors.size() == 2 ? 2 : 3);
  Slab out(grid, first.t0, first.dt, first.nt);
  PaddedGrid padded(grid, m);
  std::vector<cplx> full(n);
  std::vector<double> acc(m);
  std::vector<double> values(m);
  for (std::size_t j = 0; j < first.nt; ++j) {
    std::fill(acc.begin(), acc.end(), 1.0);
    for (const Slab* f : factors) {
      std::copy(f->row(j), f->row(j) + f->width, full.begin());
      padded.to_physical(full, values);
      for (std::size_t i = 0; i < m; ++i) acc[i] *= values[i];
    }
    padded.to_spectrum(acc, full);
    std::copy(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(out.width), out.row(j));
  }
  return out;
}

// xsb_norm of d_x^order u for a real slab.
double slab_xsb(const Slab& u, double sigma, double b, const EquationParams& p, int order = 0) {
  check_overflow_guard(u.grid, GevreyWeight(sigma));
  const std::size_t nt = u.nt;
  const std::size_t n = u.grid.size();
  const double period = u.dt * static_cast<double>(nt);
  std::vector<double> modulation(nt);
  for (std::size_t l = 0; l < nt; ++l) {
    const double m = l <= nt / 2 ? static_cast<double>(l) : static_cast<double>(l) - nt;
    modulation[l] = std::pow(1.0 + std::abs(2.0 * std::numbers::pi * m / period), 2.0 * b);
  }
  std::vector<cplx> col(nt);
  std::vector<cplx> res(nt);
  double total = 0.0;
  for (std::size_t k = 0; k < u.width; ++k) {
    if (order % 2 == 1 && k == n / 2) continue;
    bool any = false;
    for (std::size_t j = 0; j < nt && !any; ++j) any = u.row(j)[k] != cplx{};
    if (!any) continue;
    const double phi = effective_symbol(u.grid, k, p);
    for (std::size_t j = 0; j < nt; ++j) col[j] = unit_phase(phi * u.time(j)) * u.row(j)[k];
    detail::fft_forward(col, res);
    const double xi = u.grid.wavenumber(k);
    const double space = std::exp(2.0 * sigma * std::abs(xi)) * std::pow(xi * xi, order);
    double sum = 0.0;
    for (std::size_t l = 0; l < nt; ++l) sum += modulation[l] * std::norm(res[l]);
    total += (k == 0 || k == n / 2 ? 1.0 : 2.0) * space * sum * u.dt * u.dt;
  }
  if (!std::isfinite(total)) throw OverflowGuardError("xsb_norm: weighted sum overflowed");
  return std::sqrt(total / (u.grid.period() * period));
}

double slab_bilinear(const GridSpec& grid, const ProbeConfig& cfg, std::uint64_t draw, double band,
                     std::size_t nt) {
  const auto& bp = cfg.bourgain;
  const Slab u = draw_slab(grid, cfg, draw, 0, band, nt);
  const Slab v = draw_slab(grid, cfg, draw, 1, band, nt);
  const double den = slab_xsb(u, bp.sigma, bp.b_prime, cfg.equation) *
                     slab_xsb(v, bp.sigma, bp.b_prime, cfg.equation);
  if (den < kDenominatorGuard) return -1.0;
  const Slab* factors[] = {&u, &v};
  return slab_xsb(slab_product(factors), bp.sigma, bp.b - 1.0, cfg.equation, 1) / den;
}

double slab_trilinear(const GridSpec& grid, const ProbeConfig& cfg, std::uint64_t draw,
                      double band, std::size_t nt) {
  const auto& bp = cfg.bourgain;
  const Slab u1 = draw_slab(grid, cfg, draw, 0, band, nt);
  const Slab u2 = draw_slab(grid, cfg, draw, 1, band, nt);
  const Slab u3 = draw_slab(grid, cfg, draw, 2, band, nt);
  const double den = slab_xsb(u1, bp.sigma, bp.b_prime, cfg.equation) *
                     slab_xsb(u2, bp.sigma, bp.b_prime, cfg.equation) *
                     slab_xsb(u3, bp.sigma, bp.b_prime, cfg.equation);
  if (den < kDenominatorGuard) return -1.0;
  const Slab* factors[] = {&u1, &u2, &u3};
  return slab_xsb(slab_product(factors), bp.sigma, bp.b - 1.0, cfg.equation, 1) / den;
}

double slab_damping(const DampingProfile& a, const GridSpec& grid, const ProbeConfig& cfg,
                    std::uint64_t draw, double band, std::size_t nt) {
  const auto& bp = cfg.bourgain;
  Slab u = draw_slab(grid, cfg, draw, 4, band, nt);
  const double den = a_sigma_norm(a, GevreyWeight(bp.sigma)) * slab_xsb(u, bp.sigma, bp.b, cfg.equation);
  if (den < kDenominatorGuard) return -1.0;
  if (a.is_constant()) {
    const double value = a.field().physical()[0];
    for (auto& c : u.c) c *= value;
    return slab_xsb(u, bp.sigma, bp.b_prime - 1.0, cfg.equation) / den;
  }
  const Slab profile = constant_slab(a.field(), u);
  const Slab* factors[] = {&profile, &u};
  return slab_xsb(slab_product(factors), bp.sigma, bp.b_prime - 1.0, cfg.equation) / den;
}

}  // namespace

void ProbeConfig::validate() const {
  if (n_samples == 0) throw ConfigError("probe: n_samples must be positive");
  if (!(period > 0.0)) throw ConfigError("probe: period must be positive");
  if (grid_sizes.empty()) throw ConfigError("probe: grid_sizes must not be empty");
  for (auto n : grid_sizes) (void)GridSpec(n, period);
  bourgain.validate();
  if (!(rho_max >= 0.0)) throw ConfigError("probe: rho_max must be >= 0");
  if (!(band_fraction > 0.0 && band_fraction <= 1.0)) {
    throw ConfigError("probe: band_fraction must lie in (0, 1]");
  }
  if (band_limit && !(*band_limit > 0.0)) throw ConfigError("probe: band_limit must be positive");
  if (!(max_growth > 0.0)) throw ConfigError("probe: max_growth must be positive");
  if (lipschitz_samples == 0) throw ConfigError("probe: lipschitz_samples must be positive");
  (void)GridSpec(lipschitz_n, period);
  if (perturbations.empty()) throw ConfigError("probe: perturbations must not be empty");
  for (double e : perturbations) {
    if (!(e > 0.0)) throw ConfigError("probe: perturbations must be positive");
  }
  if (!(lipschitz_amplitude > 0.0)) throw ConfigError("probe: lipschitz_amplitude must be positive");
  if (!(lipschitz_dt > 0.0) || !(lipschitz_time >= 0.0)) {
    throw ConfigError("probe: lipschitz_dt must be positive and lipschitz_time nonnegative");
  }
}

RatioStats summarize(std::vector<double> ratios, std::size_t excluded) {
  RatioStats s;
  s.excluded = excluded;
  s.samples = ratios.size();
  if (ratios.empty()) return s;
  std::sort(ratios.begin(), ratios.end());
  auto rank = [&](double q) {
    const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(ratios.size())));
    return ratios[std::clamp<std::size_t>(idx, 1, ratios.size()) - 1];
  };
  s.max = ratios.back();
  s.p99 = rank(0.99);
  s.median = rank(0.5);
  return s;
}

double probe_band(const GridSpec& grid, const ProbeConfig& cfg, int degree) {
  const double band = cfg.band_fraction * grid.xi_max() / static_cast<double>(degree);
  return cfg.band_limit ? std::min(band, *cfg.band_limit) : band;
}

std::size_t probe_time_samples(const GridSpec& grid, const ProbeConfig& cfg, int degree) {
  const double band = probe_band(grid, cfg, degree);
  const auto& p = cfg.equation;
  const auto& bp = cfg.bourgain;
  const double out_band = std::min(grid.xi_max(), degree * band);
  const double omega = max_symbol(out_band, p, grid.dxi()) + degree * max_symbol(band, p, grid.dxi()) +
                       degree * cfg.rho_max + degree * 64.0 / (bp.delta * bp.cutoff_margin);
  const double needed = 1.2 * 2.0 * bp.delta * omega / std::numbers::pi;
  std::size_t nt = std::max<std::size_t>(128, bp.time_samples);
  nt = std::max(nt, std::bit_ceil(static_cast<std::size_t>(std::ceil(needed))));
  return nt;
}

SpaceTimeField random_spacetime_field(const GridSpec& grid, const ProbeConfig& cfg,
                                      std::uint64_t draw, unsigned stream, double band,
                                      std::size_t time_samples) {
  const auto d = generate(cfg, draw, stream, generation_size(grid, cfg));
  auto u = make_window(grid, cfg.bourgain.delta, time_samples);
  const auto psi = make_cutoff(cfg.bourgain.delta, cfg.bourgain.cutoff_margin, u.times());
  const std::size_t n = grid.size();
  std::vector<std::size_t> modes;
  for (std::size_t m = 0; m < n / 2; ++m) {
    if (grid.wavenumber(m) <= band + 1e-12) modes.push_back(m);
  }
  parallel_for(time_samples, [&](std::size_t j) {
    if (psi[j] == 0.0) return;
    const double t = u.time(j);
    std::vector<cplx> spec(n);
    for (std::size_t m : modes) {
      const double xi = grid.wavenumber(m);
      const cplx v = psi[j] * d.c[m] * unit_phase((d.rho[m] - dispersion_symbol(xi, cfg.equation)) * t);
      spec[m] = m == 0 ? cplx(v.real(), 0.0) : v;
      if (m > 0) spec[n - m] = std::conj(spec[m]);
    }
    u.slices[j] = Field::from_spectral(grid, std::move(spec));
  });
  return u;
}

Field random_field(const GridSpec& grid, const ProbeConfig& cfg, std::uint64_t draw,
                   unsigned stream, double band) {
  const auto d = generate(cfg, draw, stream, generation_size(grid, cfg));
  const std::size_t n = grid.size();
  std::vector<cplx> spec(n);
  for (std::size_t m = 0; m < n / 2; ++m) {
    if (grid.wavenumber(m) > band + 1e-12) continue;
    spec[m] = d.c[m];
    if (m > 0) spec[n - m] = std::conj(d.c[m]);
  }
  return Field::from_spectral(grid, std::move(spec));
}

SpaceTimeField spacetime_product(const SpaceTimeField& u, const SpaceTimeField& v) {
  if (u.time_samples() != v.time_samples() || !(u.grid == v.grid)) {
    throw ConfigError("spacetime_product: shape mismatch");
  }
  SpaceTimeField out{u.grid, u.t0, u.dt, {}};
  out.slices.resize(u.time_samples(), Field::zeros(u.grid));
  parallel_for(u.time_samples(), [&](std::size_t j) {
    out.slices[j] = dealias_product(u.slices[j], v.slices[j], 2);
  });
  return out;
}

SpaceTimeField spacetime_derivative(const SpaceTimeField& u) {
  SpaceTimeField out{u.grid, u.t0, u.dt, {}};
  out.slices.resize(u.time_samples(), Field::zeros(u.grid));
  parallel_for(u.time_samples(), [&](std::size_t j) { out.slices[j] = spatial_derivative(u.slices[j], 1); });
  return out;
}

double bilinear_ratio(const SpaceTimeField& u, const SpaceTimeField& v, const BourgainParams& bp,
                      const EquationParams& p) {
  const double den = xsb_norm(u, bp.sigma, bp.b_prime, p) * xsb_norm(v, bp.sigma, bp.b_prime, p);
  if (den < kDenominatorGuard) return -1.0;
  const auto num = spacetime_derivative(spacetime_product(u, v));
  return xsb_norm(num, bp.sigma, bp.b - 1.0, p) / den;
}

double trilinear_ratio(const SpaceTimeField& u1, const SpaceTimeField& u2,
                       const SpaceTimeField& u3, const BourgainParams& bp,
                       const EquationParams& p) {
  const double den = xsb_norm(u1, bp.sigma, bp.b_prime, p) * xsb_norm(u2, bp.sigma, bp.b_prime, p) *
                     xsb_norm(u3, bp.sigma, bp.b_prime, p);
  if (den < kDenominatorGuard) return -1.0;
  SpaceTimeField prod{u1.grid, u1.t0, u1.dt, {}};
  prod.slices.resize(u1.time_samples(), Field::zeros(u1.grid));
  parallel_for(u1.time_samples(), [&](std::size_t j) {
    prod.slices[j] = dealias_product3(u1.slices[j], u2.slices[j], u3.slices[j]);
  });
  return xsb_norm(spacetime_derivative(prod), bp.sigma, bp.b - 1.0, p) / den;
}

double damping_ratio_gevrey(const DampingProfile& a, const Field& u, GevreyWeight sigma) {
  const double den = a_sigma_norm(a, sigma) * gevrey_norm(u, sigma);
  if (den < kDenominatorGuard) return -1.0;
  const Field au = a.is_constant() ? a.field().physical()[0] * u : dealias_product(a.field(), u, 2);
  return gevrey_norm(au, sigma) / den;
}

double damping_ratio_xsb(const DampingProfile& a, const SpaceTimeField& u,
                         const BourgainParams& bp, const EquationParams& p) {
  const double den = a_sigma_norm(a, GevreyWeight(bp.sigma)) * xsb_norm(u, bp.sigma, bp.b, p);
  if (den < kDenominatorGuard) return -1.0;
  SpaceTimeField au{u.grid, u.t0, u.dt, {}};
  au.slices.resize(u.time_samples(), Field::zeros(u.grid));
  parallel_for(u.time_samples(), [&](std::size_t j) {
    au.slices[j] = a.is_constant() ? a.field().physical()[0] * u.slices[j]
                                   : dealias_product(a.field(), u.slices[j], 2);
  });
  return xsb_norm(au, bp.sigma, bp.b_prime - 1.0, p) / den;
}

ProbeReport probe_bilinear(const ProbeConfig& cfg) {
  cfg.validate();
  std::vector<RefinementLevel> levels;
  for (auto n : cfg.grid_sizes) {
    const GridSpec grid(n, cfg.period);
    const double band = probe_band(grid, cfg, 2);
    const std::size_t nt = probe_time_samples(grid, cfg, 2);
    std::vector<double> ratios(cfg.n_samples);
    for (std::size_t i = 0; i < cfg.n_samples; ++i) {
      ratios[i] = slab_bilinear(grid, cfg, i, band, nt);
    }
    levels.push_back(level_for(n, nt, std::move(ratios)));
  }
  return finish("bilinear", std::move(levels), cfg.max_growth);
}

ProbeReport probe_trilinear(const ProbeConfig& cfg) {
  cfg.validate();
  if (!(cfg.bourgain.b < 0.7)) throw ConfigError("probe trilinear: need b < 7/10");
  std::vector<RefinementLevel> levels;
  for (auto n : cfg.grid_sizes) {
    const GridSpec grid(n, cfg.period);
    const double band = probe_band(grid, cfg, 3);
    const std::size_t nt = probe_time_samples(grid, cfg, 3);
    std::vector<double> ratios(cfg.n_samples);
    for (std::size_t i = 0; i < cfg.n_samples; ++i) {
      ratios[i] = slab_trilinear(grid, cfg, i, band, nt);
    }
    levels.push_back(level_for(n, nt, std::move(ratios)));
  }
  return finish("trilinear", std::move(levels), cfg.max_growth);
}

DampingProbeReport probe_damping_product(const ProbeConfig& cfg) {
  cfg.validate();
  const GevreyWeight sigma(cfg.bourgain.sigma);
  std::vector<RefinementLevel> g_levels;
  std::vector<RefinementLevel> x_levels;
  for (auto n : cfg.grid_sizes) {
    const GridSpec grid(n, cfg.period);
    const auto a = DampingProfile::cosine_bump(grid, cfg.damping_gamma, cfg.damping_amplitude,
                                               cfg.damping_wavenumber);
    const auto report = check_assumptions(a, sigma);
    if (!report.analytic_class_pass) {
      throw EstimatorError("probe damping: profile fails the analytic-class check");
    }
    // Leave room for the profile's own band so the product stays on the grid.
    const double band = std::min(probe_band(grid, cfg, 2), grid.xi_max() - cfg.damping_wavenumber);
    const std::size_t nt = probe_time_samples(grid, cfg, 2);
    std::vector<double> g(cfg.n_samples);
    std::vector<double> x(cfg.n_samples);
    for (std::size_t i = 0; i < cfg.n_samples; ++i) {
      g[i] = damping_ratio_gevrey(a, random_field(grid, cfg, i, 3, band), sigma);
      x[i] = slab_damping(a, grid, cfg, i, band, nt);
    }
    g_levels.push_back(level_for(n, 1, std::move(g)));
    x_levels.push_back(level_for(n, nt, std::move(x)));
  }
  DampingProbeReport out;
  out.gevrey = finish("damping-gevrey", std::move(g_levels), cfg.max_growth);
  out.xsb = finish("damping-xsb", std::move(x_levels), cfg.max_growth);
  out.pass = out.gevrey.pass && out.xsb.pass;
  return out;
}

WeightReport probe_weight_inequality(double a_exp, double b_exp, int sign, double range,
                                     std::size_t points) {
  if (!(a_exp >= b_exp) || !(a_exp >= 0.0)) {
    throw ConfigError("probe weight: hypotheses a >= b and a >= 0 violated (a = " +
                      std::to_string(a_exp) + ", b = " + std::to_string(b_exp) + ")");
  }
  if (sign != 1 && sign != -1) throw ConfigError("probe weight: sign must be +1 or -1");
  if (!(range > 0.0) || points < 2) throw ConfigError("probe weight: degenerate grid");
  auto sweep = [&](double r) {
    double worst = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
      const double x = -r + 2.0 * r * static_cast<double>(i) / static_cast<double>(points - 1);
      for (std::size_t j = 0; j < points; ++j) {
        const double y = -r + 2.0 * r * static_cast<double>(j) / static_cast<double>(points - 1);
        const double lhs = std::pow(1.0 + std::abs(x + sign * y), b_exp);
        const double rhs = std::pow(1.0 + std::abs(x), a_exp) * std::pow(1.0 + std::abs(y), b_exp);
        worst = std::max(worst, lhs / rhs);
      }
    }
    return worst;
  };
  WeightReport w;
  w.a_exp = a_exp;
  w.b_exp = b_exp;
  w.sign = sign;
  w.range = range;
  w.points = points;
  w.max_ratio = sweep(range);
  w.finite = std::isfinite(w.max_ratio);
  w.range_checked = std::abs(b_exp) <= a_exp;
  if (w.range_checked) {
    w.doubled_range_max_ratio = sweep(2.0 * range);
    w.range_stable = std::abs(w.doubled_range_max_ratio - w.max_ratio) <=
                     1e-9 * std::max(1.0, w.max_ratio);
  }
  return w;
}

TriangleReport probe_exponential_triangle(double sigma, std::size_t points, double spacing) {
  const GevreyWeight s(sigma);
  TriangleReport r;
  r.sigma = s.sigma();
  r.points = points;
  const double half = static_cast<double>(points / 2);
  if (s.sigma() * spacing * 2.0 * half > kOverflowGuard) {
    throw OverflowGuardError("probe triangle: sigma times grid extent exceeds the overflow guard");
  }
  for (std::size_t i = 0; i < points; ++i) {
    const double x = (static_cast<double>(i) - half) * spacing;
    for (std::size_t j = 0; j < points; ++j) {
      const double y = (static_cast<double>(j) - half) * spacing;
      const double lhs = s.sigma() * std::abs(x);
      const double rhs = s.sigma() * (std::abs(x - y) + std::abs(y));
      if (lhs > rhs) ++r.violations;
      r.max_ratio = std::max(r.max_ratio, std::exp(lhs - rhs));
    }
  }
  r.pass = r.violations == 0;
  return r;
}

ProbeReport probe_lipschitz_data_map(const ProbeConfig& cfg, const EquationParams& p,
                                     const DampingProfile& a) {
  cfg.validate();
  const GridSpec& grid = a.field().grid();
  const GevreyWeight sigma(cfg.bourgain.sigma);
  const double band = grid.xi_max() / 2.0;
  IntegratorConfig ic;
  ic.dt = cfg.lipschitz_dt;
  ic.record_every = 1;
  MonitorSet none;
  none.radius = false;

  const std::size_t draws = cfg.lipschitz_samples;
  const std::size_t levels_n = cfg.perturbations.size();
  std::vector<std::vector<double>> ratios(levels_n, std::vector<double>(draws));
  parallel_for(draws, [&](std::size_t i) {
    Field base = random_field(grid, cfg, i, 5, band);
    const double g = gevrey_norm(base, sigma);
    if (g < kDenominatorGuard) {
      for (auto& lvl : ratios) lvl[i] = -1.0;
      return;
    }
    base = (cfg.lipschitz_amplitude / g) * base;
    Field dir = random_field(grid, cfg, i, 6, band);
    const double gd = gevrey_norm(dir, sigma);
    if (gd < kDenominatorGuard) {
      for (auto& lvl : ratios) lvl[i] = -1.0;
      return;
    }
    dir = (1.0 / gd) * dir;
    const auto ref = evolve(State(base, 0.0), cfg.lipschitz_time, p, a, ic, none);
    for (std::size_t l = 0; l < levels_n; ++l) {
      const double eps = cfg.perturbations[l];
      const Field pert = base + eps * dir;
      const double data = gevrey_norm(pert - base, sigma);
      if (data < kDenominatorGuard) {
        ratios[l][i] = -1.0;
        continue;
      }
      const auto other = evolve(State(pert, 0.0), cfg.lipschitz_time, p, a, ic, none);
      double sup = 0.0;
      for (std::size_t k = 0; k < ref.states.size(); ++k) {
        sup = std::max(sup, gevrey_norm(ref.states[k].field - other.states[k].field, sigma));
      }
      ratios[l][i] = sup / data;
    }
  });
  std::vector<RefinementLevel> levels;
  for (std::size_t l = 0; l < levels_n; ++l) {
    auto lvl = level_for(grid.size(), 0, std::move(ratios[l]));
    lvl.label = "eps=" + std::to_string(cfg.perturbations[l]);
    lvl.parameter = cfg.perturbations[l];
    levels.push_back(std::move(lvl));
  }
  return finish("lipschitz", std::move(levels), cfg.max_growth);
}

std::vector<ProbeReport> probe_bilinear_sweep(const ProbeConfig& cfg,
                                              const std::vector<double>& b_values) {
  std::vector<ProbeReport> out;
  for (double b : b_values) {
    ProbeConfig c = cfg;
    c.bourgain.b = b;
    c.bourgain.b_prime = std::max(cfg.bourgain.b_prime, b + 0.1);
    auto r = probe_bilinear(c);
    r.kind = "bilinear b=" + std::to_string(b);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace kdvk

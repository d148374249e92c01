#include "kdvk/bourgain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "kdvk/error.hpp"
#include "kdvk/evolution.hpp"
#include "kdvk/parallel.hpp"

namespace kdvk {

void BourgainParams::validate() const {
  if (!(b > 0.5 && b < b_prime && b_prime < 1.0)) {
    throw ConfigError("bourgain: need 1/2 < b < b' < 1");
  }
  if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("bourgain: need 0 < delta <= 1");
  if (!(cutoff_margin > 0.0 && cutoff_margin < 0.5)) {
    throw ConfigError("bourgain: cutoff margin must lie in (0, 1/2)");
  }
  if (time_samples < 128 || time_samples % 2 != 0) {
    throw ConfigError("bourgain: time_samples must be even and >= 128");
  }
  (void)GevreyWeight(sigma);
}

namespace {

double glue(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

// Dispersion symbol with the Nyquist mode pinned to zero, matching the stepper.
double effective_symbol(const GridSpec& grid, std::size_t k, const EquationParams& p) {
  if (k == grid.nyquist_index()) return 0.0;
  return dispersion_symbol(grid.wavenumber(k), p);
}

cplx unit_phase(double angle) { return {std::cos(angle), std::sin(angle)}; }

// int_0^1 e^{i theta x} (1 - x) dx and int_0^1 e^{i theta x} x dx.
std::pair<cplx, cplx> linear_phase_weights(double theta) {
  if (std::abs(theta) < 0.1) {
    cplx a = 0.0;
    cplx b = 0.0;
    cplx term = 1.0;  // (i theta)^j / j!
    for (int j = 0; j < 14; ++j) {
      if (j > 0) term *= cplx(0.0, theta) / static_cast<double>(j);
      const double x1 = 1.0 / (j + 1.0);
      const double x2 = 1.0 / (j + 2.0);
      b += term * x2;
      a += term * (x1 - x2);
    }
    return {a, b};
  }
  const cplx e = unit_phase(theta);
  const cplx it(0.0, theta);
  const cplx whole = (e - 1.0) / it;
  const cplx b = e / it + (e - 1.0) / (theta * theta);
  return {whole - b, b};
}

Field field_from_half(const GridSpec& grid, std::vector<cplx> full) {
  const std::size_t n = grid.size();
  full[0] = cplx(full[0].real(), 0.0);
  full[n / 2] = cplx(full[n / 2].real(), 0.0);
  for (std::size_t k = 1; k < n / 2; ++k) full[n - k] = std::conj(full[k]);
  return Field::from_spectral(grid, std::move(full));
}

SpaceTimeField like(const SpaceTimeField& u) {
  SpaceTimeField out{u.grid, u.t0, u.dt, {}};
  out.slices.reserve(u.slices.size());
  return out;
}

SpaceTimeField difference(const SpaceTimeField& a, const SpaceTimeField& b) {
  auto out = like(a);
  for (std::size_t j = 0; j < a.slices.size(); ++j) out.slices.push_back(a.slices[j] - b.slices[j]);
  return out;
}

}  // namespace

double cutoff_weight(double t, double delta, double margin) {
  if (!(delta > 0.0)) throw ConfigError("cutoff: delta must be positive");
  if (!(margin > 0.0 && margin < 0.5)) throw ConfigError("cutoff: margin must lie in (0, 1/2)");
  const double s = std::abs(t);
  const double flat = delta * (1.0 - 2.0 * margin);
  const double end = delta * (1.0 - margin);
  if (s <= flat) return 1.0;
  if (s >= end) return 0.0;
  const double x = (s - flat) / (end - flat);
  const double g0 = glue(1.0 - x);
  const double g1 = glue(x);
  return g0 / (g0 + g1);
}

std::vector<double> make_cutoff(double delta, double margin, std::span<const double> times) {
  std::vector<double> w(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) w[j] = cutoff_weight(times[j], delta, margin);
  return w;
}

std::vector<double> SpaceTimeField::times() const {
  std::vector<double> t(slices.size());
  for (std::size_t j = 0; j < t.size(); ++j) t[j] = time(j);
  return t;
}

std::size_t SpaceTimeField::origin_index() const {
  if (dt <= 0.0) throw ConfigError("spacetime: time step must be positive");
  const double pos = -t0 / dt;
  const auto j = static_cast<long long>(std::llround(pos));
  if (j < 0 || static_cast<std::size_t>(j) >= slices.size() || std::abs(pos - j) > 1e-9) {
    throw ConfigError("spacetime: window has no sample at t = 0");
  }
  return static_cast<std::size_t>(j);
}

SpaceTimeField make_window(const GridSpec& grid, double delta, std::size_t nt) {
  if (!(delta > 0.0)) throw ConfigError("spacetime: delta must be positive");
  if (nt < 2 || nt % 2 != 0) throw ConfigError("spacetime: sample count must be even and >= 2");
  SpaceTimeField u{grid, -delta, 2.0 * delta / static_cast<double>(nt), {}};
  u.slices.assign(nt, Field::zeros(grid));
  return u;
}

SpacetimeSpectrum spacetime_transform(const SpaceTimeField& u) {
  const std::size_t nt = u.time_samples();
  const std::size_t n = u.grid.size();
  SpacetimeSpectrum out;
  out.nt = nt;
  out.n = n;
  out.period = u.period();
  out.taus.resize(nt);
  for (std::size_t l = 0; l < nt; ++l) {
    const double m = l <= nt / 2 ? static_cast<double>(l) : static_cast<double>(l) - nt;
    out.taus[l] = 2.0 * std::numbers::pi * m / out.period;
  }
  out.values.assign(nt * n, cplx{});
  parallel_for(n, [&](std::size_t k) {
    std::vector<cplx> col(nt);
    std::vector<cplx> res(nt);
    for (std::size_t j = 0; j < nt; ++j) col[j] = u.slices[j].spectral()[k];
    detail::fft_forward(col, res);
    for (std::size_t l = 0; l < nt; ++l) {
      out.values[l * n + k] = u.dt * unit_phase(-out.taus[l] * u.t0) * res[l];
    }
  });
  return out;
}

double spacetime_l2(const SpaceTimeField& u) {
  double sum = 0.0;
  for (const auto& s : u.slices) sum += std::pow(l2_norm(s), 2);
  return std::sqrt(sum * u.dt);
}

double xsb_norm(const SpaceTimeField& u, double sigma, double b, const EquationParams& p) {
  const GevreyWeight weight(sigma);
  check_overflow_guard(u.grid, weight);
  const std::size_t nt = u.time_samples();
  const std::size_t n = u.grid.size();
  if (nt == 0) return 0.0;
  const double period = u.period();
  std::vector<double> modulation(nt);
  for (std::size_t l = 0; l < nt; ++l) {
    const double m = l <= nt / 2 ? static_cast<double>(l) : static_cast<double>(l) - nt;
    modulation[l] = std::pow(1.0 + std::abs(2.0 * std::numbers::pi * m / period), 2.0 * b);
  }
  // For real slices mode n - k mirrors mode k and only k <= n/2 is summed.
  const bool real = std::all_of(u.slices.begin(), u.slices.end(), [](const Field& f) { return f.is_real(); });
  const std::size_t modes = real ? n / 2 + 1 : n;
  std::vector<double> partial(modes, 0.0);
  parallel_for(modes, [&](std::size_t k) {
    bool any = false;
    for (std::size_t j = 0; j < nt && !any; ++j) any = u.slices[j].spectral()[k] != cplx{};
    if (!any) return;
    const double phi = effective_symbol(u.grid, k, p);
    std::vector<cplx> col(nt);
    std::vector<cplx> res(nt);
    for (std::size_t j = 0; j < nt; ++j) {
      col[j] = unit_phase(phi * u.time(j)) * u.slices[j].spectral()[k];
    }
    detail::fft_forward(col, res);
    const double space = std::exp(2.0 * sigma * std::abs(u.grid.wavenumber(k)));
    double sum = 0.0;
    for (std::size_t l = 0; l < nt; ++l) sum += modulation[l] * std::norm(res[l]);
    const double mult = (!real || k == 0 || k == n / 2) ? 1.0 : 2.0;
    partial[k] = mult * space * sum * u.dt * u.dt;
  });
  double total = 0.0;
  for (double v : partial) total += v;
  if (!std::isfinite(total)) throw OverflowGuardError("xsb_norm: weighted sum overflowed");
  return std::sqrt(total / (u.grid.period() * period));
}

double xsb_norm(const SpaceTimeField& u, const BourgainParams& params, const EquationParams& p) {
  return xsb_norm(u, params.sigma, params.b, p);
}

SpaceTimeField free_evolution(const Field& u0, const SpaceTimeField& window,
                              const EquationParams& p) {
  auto out = like(window);
  out.slices.resize(window.time_samples(), Field::zeros(window.grid));
  parallel_for(window.time_samples(), [&](std::size_t j) {
    out.slices[j] = linear_propagator(u0, window.time(j), p);
  });
  return out;
}

SpaceTimeField duhamel_integral(const SpaceTimeField& forcing, const EquationParams& p) {
  const std::size_t nt = forcing.time_samples();
  const std::size_t n = forcing.grid.size();
  const std::size_t j0 = forcing.origin_index();
  const double h = forcing.dt;
  std::vector<std::vector<cplx>> spec(nt, std::vector<cplx>(n));
  parallel_for(n / 2 + 1, [&](std::size_t k) {
    const double phi = effective_symbol(forcing.grid, k, p);
    const double theta = phi * h;
    const auto [wa, wb] = linear_phase_weights(theta);
    const cplx rot = unit_phase(-theta);
    const cplx back = unit_phase(theta);
    auto f = [&](std::size_t j) { return forcing.slices[j].spectral()[k]; };
    spec[j0][k] = 0.0;
    for (std::size_t j = j0; j + 1 < nt; ++j) {
      spec[j + 1][k] = rot * (spec[j][k] + h * (f(j) * wa + f(j + 1) * wb));
    }
    for (std::size_t j = j0; j > 0; --j) {
      spec[j - 1][k] = back * spec[j][k] - h * (f(j - 1) * wa + f(j) * wb);
    }
  });
  auto out = like(forcing);
  for (std::size_t j = 0; j < nt; ++j) out.slices.push_back(field_from_half(forcing.grid, std::move(spec[j])));
  return out;
}

PicardReport picard_iterate(const Field& u0, const EquationParams& p, const DampingProfile& a,
                            const BourgainParams& params, std::size_t n_iters,
                            const PicardOptions& options) {
  params.validate();
  if (n_iters < 2) throw ConfigError("picard: n_iters must be >= 2");
  if (!(u0.grid() == a.field().grid())) throw ConfigError("picard: grid mismatch");
  const auto& grid = u0.grid();
  const GevreyWeight sigma(params.sigma);
  check_overflow_guard(grid, sigma);

  const auto window = make_window(grid, params.delta, params.time_samples);
  const std::size_t nt = window.time_samples();
  const std::size_t j0 = window.origin_index();
  const auto psi = make_cutoff(params.delta, params.cutoff_margin, window.times());
  const auto free = free_evolution(u0, window, p);

  PicardReport report;
  report.metric_window_end = params.delta * (1.0 - params.cutoff_margin);
  report.oracle_window_end = params.delta * (1.0 - 2.0 * params.cutoff_margin);
  std::vector<std::size_t> metric;
  for (std::size_t j = j0; j < nt; ++j) {
    if (window.time(j) <= report.metric_window_end + 1e-12) metric.push_back(j);
  }

  auto taper = [&](SpaceTimeField&& f) {
    parallel_for(nt, [&](std::size_t j) { f.slices[j] = psi[j] * f.slices[j]; });
    return std::move(f);
  };
  auto sup_gevrey = [&](const SpaceTimeField& f) {
    double mx = 0.0;
    for (std::size_t j : metric) mx = std::max(mx, gevrey_norm(f.slices[j], sigma));
    return mx;
  };

  SpaceTimeField current = taper(SpaceTimeField(free));
  SpaceTimeField previous = current;
  std::size_t rising = 0;
  for (std::size_t it = 0; it < n_iters; ++it) {
    auto forcing = like(current);
    forcing.slices.resize(nt, Field::zeros(grid));
    parallel_for(nt, [&](std::size_t j) { forcing.slices[j] = nonlinearity(current.slices[j], p, a); });
    const auto integral = duhamel_integral(forcing, p);
    SpaceTimeField next = taper(difference(free, integral));

    const auto diff = difference(next, current);
    const double d = sup_gevrey(diff);
    report.iterate_distances.push_back(d);
    report.xsb_distances.push_back(xsb_norm(diff, params, p));
    previous = std::move(current);
    current = std::move(next);
    report.iterations = it + 1;

    const std::size_t m = report.iterate_distances.size();
    if (m >= 2 && report.iterate_distances[m - 2] > 1e-14) {
      const double ratio = d / report.iterate_distances[m - 2];
      report.contraction_ratios.push_back(ratio);
      report.max_ratio = std::max(report.max_ratio, ratio);
      rising = ratio > 1.0 ? rising + 1 : 0;
      if (rising >= 3) {
        report.diverged = true;
        break;
      }
    }
    if (!std::isfinite(d)) {
      report.diverged = true;
      break;
    }
    if (d <= options.tolerance * std::max(1.0, sup_gevrey(current))) {
      report.converged = true;
      break;
    }
  }

  report.final_norm = sup_gevrey(current);
  report.final_xsb_norm = xsb_norm(current, params, p);
  const double prev_xsb = xsb_norm(previous, params, p);
  report.m_diagnostic = a_sigma_partial_sum(a, sigma).value + report.final_xsb_norm + prev_xsb +
                        report.final_xsb_norm * report.final_xsb_norm + prev_xsb * prev_xsb;

  if (options.run_oracle) {
    std::size_t j_end = j0;
    while (j_end + 1 < nt && window.time(j_end + 1) <= report.oracle_window_end + 1e-12) ++j_end;
    const auto sub = static_cast<std::size_t>(std::ceil(window.dt / options.oracle_max_dt - 1e-12));
    IntegratorConfig cfg;
    cfg.dt = window.dt / static_cast<double>(sub);
    cfg.record_every = sub;
    report.oracle_dt = cfg.dt;
    MonitorSet none;
    none.radius = false;
    const auto traj = evolve(State(u0, 0.0), static_cast<double>(j_end - j0) * window.dt, p, a,
                             cfg, none);
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
      worst = std::max(worst, gevrey_norm(traj.states[i].field - current.slices[j0 + i], sigma));
    }
    report.final_vs_oracle = worst;
  }
  return report;
}

}  // namespace kdvk

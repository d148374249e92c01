#include "kdvk/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kdvk/error.hpp"
#include "kdvk/parallel.hpp"

namespace kdvk {

MonitorRecord make_record(const Field& u, double t, const MonitorSet& monitors,
                          const DampingProfile& a) {
  MonitorRecord r;
  r.t = t;
  r.l2 = l2_norm(u);
  for (double s : monitors.sigmas) r.gevrey_norms.emplace_back(s, gevrey_norm(u, GevreyWeight(s)));
  if (monitors.radius) {
    try {
      r.radius = estimate_radius(u, monitors.window.value_or(default_radius_window(u.grid())));
    } catch (const EstimatorError&) {
      r.radius.reset();
    }
  }
  if (monitors.commutator_sigma) {
    const auto c = commutators(u, GevreyWeight(*monitors.commutator_sigma), a);
    r.commutator_norms = std::array<double, 3>{l2_norm(c.delta), l2_norm(c.theta), l2_norm(c.gamma)};
  }
  return r;
}

double weighted_l2_square(const Field& u, const DampingProfile& a) {
  const Field au = a.is_constant() ? a.field().physical()[0] * u : dealias_product(a.field(), u, 2);
  auto uh = u.spectral();
  auto wh = au.spectral();
  double sum = 0.0;
  for (std::size_t k = 0; k < uh.size(); ++k) sum += (std::conj(uh[k]) * wh[k]).real();
  return sum / u.grid().period();
}

namespace {

// Fornberg weights for the first derivative at x0 on the given nodes.
std::array<double, 5> first_derivative_weights(double x0, const std::array<double, 5>& x) {
  constexpr int n = 5;
  double c[n][2] = {};
  c[0][0] = 1.0;
  double c1 = 1.0;
  double c4 = x[0] - x0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, 1);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::array<double, 5> w{};
  for (int i = 0; i < n; ++i) w[i] = c[i][1];
  return w;
}

}  // namespace

std::vector<double> l2_identity_residual(const Trajectory& traj, const DampingProfile& a) {
  const std::size_t n = traj.states.size();
  if (n < 5) {
    throw ConfigError("l2_identity_residual: need at least 5 records, got " + std::to_string(n));
  }
  std::vector<double> energy(n);
  std::vector<double> damping(n);
  parallel_for(n, [&](std::size_t i) {
    const double l2 = l2_norm(traj.states[i].field);
    energy[i] = l2 * l2;
    damping[i] = weighted_l2_square(traj.states[i].field, a);
  });
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t start = std::min(i >= 2 ? i - 2 : 0, n - 5);
    std::array<double, 5> nodes{};
    for (std::size_t j = 0; j < 5; ++j) nodes[j] = traj.states[start + j].time;
    const auto w = first_derivative_weights(traj.states[i].time, nodes);
    double deriv = 0.0;
    for (std::size_t j = 0; j < 5; ++j) deriv += w[j] * energy[start + j];
    out[i] = deriv + 2.0 * damping[i];
  }
  return out;
}

void fill_l2_identity_residual(Trajectory& traj, const DampingProfile& a) {
  if (traj.states.size() < 5) return;
  const auto res = l2_identity_residual(traj, a);
  for (std::size_t i = 0; i < res.size(); ++i) traj.records[i].l2_identity_residual = res[i];
}

L2DecayCheck l2_decay_check(const Trajectory& traj, double gamma, double tol) {
  L2DecayCheck out;
  out.tol = tol;
  if (traj.states.empty()) return out;
  const double l2_0 = l2_norm(traj.states.front().field);
  const double t0 = traj.states.front().time;
  out.pass = true;
  out.min_slack = INFINITY;
  out.max_slack = -INFINITY;
  for (const auto& s : traj.states) {
    const double bound = l2_0 * std::exp(-gamma * (s.time - t0));
    const double l2 = l2_norm(s.field);
    if (l2 > (1.0 + tol) * bound) out.pass = false;
    const double slack = bound > 0.0 ? (bound - l2) / bound : 0.0;
    out.min_slack = std::min(out.min_slack, slack);
    out.max_slack = std::max(out.max_slack, slack);
    out.max_abs_relative_deviation = std::max(out.max_abs_relative_deviation, std::abs(slack));
  }
  return out;
}

CommutatorSet commutators(const Field& f, GevreyWeight sigma, const DampingProfile& a) {
  if (!(f.grid() == a.field().grid())) throw ConfigError("commutators: grid mismatch");
  check_overflow_guard(f.grid(), sigma);
  const Field v = apply_lambda_sigma(f, sigma);
  const Field sq = dealias_product(v, v, 2) - apply_lambda_sigma(dealias_product(f, f, 2), sigma);
  const Field cu = dealias_product(v, v, 3) - apply_lambda_sigma(dealias_product(f, f, 3), sigma);
  Field gam = Field::zeros(f.grid());
  if (!a.is_constant()) {
    gam = dealias_product(a.field(), v, 2) -
          apply_lambda_sigma(dealias_product(a.field(), f, 2), sigma);
  }
  return {spatial_derivative(sq, 1), spatial_derivative(cu, 1), std::move(gam)};
}

namespace {

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0;
  double my = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0)) continue;
    mx += std::log(x[i]);
    my += std::log(y[i]);
    ++count;
  }
  if (count < 2) return NAN;
  mx /= static_cast<double>(count);
  my /= static_cast<double>(count);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0)) continue;
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  return sxy / sxx;
}

bool decreasing_with_sigma(const std::vector<double>& norms) {
  // sigmas are decreasing, so norms must be nonincreasing along the sequence.
  for (std::size_t i = 1; i < norms.size(); ++i) {
    if (norms[i] > norms[i - 1]) return false;
  }
  return true;
}

}  // namespace

ScalingReport sigma_scaling_probe(const Field& f, const std::vector<double>& sigma_grid,
                                  const DampingProfile& a) {
  if (sigma_grid.size() < 2) throw ConfigError("sigma_scaling_probe: need at least two sigmas");
  for (std::size_t i = 0; i < sigma_grid.size(); ++i) {
    if (!(sigma_grid[i] > 0.0)) throw ConfigError("sigma_scaling_probe: sigmas must be positive");
    if (i > 0 && !(sigma_grid[i] < sigma_grid[i - 1])) {
      throw ConfigError("sigma_scaling_probe: sigma grid must be strictly decreasing");
    }
  }
  if (sigma_grid.front() / sigma_grid.back() < 10.0 * (1.0 - 1e-12)) {
    throw ConfigError("sigma_scaling_probe: sigma grid must span at least one decade");
  }
  check_overflow_guard(f.grid(), GevreyWeight(sigma_grid.front()));

  ScalingReport r;
  r.sigmas = sigma_grid;
  const std::size_t m = sigma_grid.size();
  r.delta_norms.resize(m);
  r.theta_norms.resize(m);
  r.gamma_norms.resize(m);
  parallel_for(m, [&](std::size_t i) {
    const auto c = commutators(f, GevreyWeight(sigma_grid[i]), a);
    r.delta_norms[i] = l2_norm(c.delta);
    r.theta_norms[i] = l2_norm(c.theta);
    r.gamma_norms[i] = l2_norm(c.gamma);
  });
  const std::vector<double>* series[3] = {&r.delta_norms, &r.theta_norms, &r.gamma_norms};
  r.monotone = true;
  for (int j = 0; j < 3; ++j) {
    r.slopes[j] = loglog_slope(sigma_grid, *series[j]);
    r.slope_pass[j] = r.slopes[j] >= 0.9;
    r.monotone = r.monotone && decreasing_with_sigma(*series[j]);
  }

  // Pointwise exponential-difference bound on a symmetric frequency grid.
  constexpr int kPoints = 128;
  constexpr double kRange = 20.0;
  const double kappas[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  double worst = 0.0;
  for (double s : sigma_grid) {
    for (int i = 0; i < kPoints; ++i) {
      const double x = -kRange + 2.0 * kRange * i / (kPoints - 1);
      for (int j = 0; j < kPoints; ++j) {
        const double y = -kRange + 2.0 * kRange * j / (kPoints - 1);
        const double p = std::abs(x - y);
        const double q = std::abs(y);
        const double mn = std::min(p, q);
        // Divided through by e^{s(|x-y|+|y|)}.
        const double lhs = -std::expm1(-s * (p + q - std::abs(x)));
        for (double kap : kappas) {
          const double rhs = kExponentialDifferenceConstant * std::pow(s * mn, kap);
          if (rhs == 0.0) {
            if (lhs > 0.0) worst = INFINITY;
            continue;
          }
          worst = std::max(worst, lhs / rhs);
        }
      }
    }
  }
  r.exp_difference_max_ratio = worst;
  r.exp_difference_pass = worst <= 1.0;

  double bracket = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    const double x = -kRange + 2.0 * kRange * i / (kPoints - 1);
    for (int j = 0; j < kPoints; ++j) {
      const double y = -kRange + 2.0 * kRange * j / (kPoints - 1);
      const double mn = std::min(std::abs(x - y), std::abs(y));
      const double ratio = mn * (1.0 + std::abs(x)) / ((1.0 + std::abs(x - y)) * (1.0 + std::abs(y)));
      bracket = std::max(bracket, ratio);
    }
  }
  r.bracket_max_ratio = bracket;
  r.bracket_pass = bracket <= 2.0;
  return r;
}

std::vector<double> default_sigma_list(double sigma0) {
  return {sigma0, sigma0 / 2.0, sigma0 / 4.0, sigma0 / 8.0};
}

double interpolation_ratio(const Field& u, GevreyWeight sigma) {
  const double half = gevrey_norm(u, GevreyWeight(sigma.sigma() / 2.0));
  const double denom = l2_norm(u) * gevrey_norm(u, sigma);
  if (denom == 0.0) return 0.0;
  return half * half / denom;
}

DecayVerdict gevrey_decay_verdict(const Trajectory& traj, const std::vector<double>& sigma_list,
                                  double gamma, double sigma0, double bookkeeping_delta) {
  if (traj.states.size() < 2) throw ConfigError("decay verdict: trajectory too short");
  if (!(gamma > 0.0)) throw ConfigError("decay verdict: gamma must be positive");
  const double t0 = traj.states.front().time;
  const double span = traj.states.back().time - t0;
  if (gamma * span < 3.0 * (1.0 - 1e-12)) {
    throw ConfigError("decay verdict: trajectory spans gamma*T = " + std::to_string(gamma * span) +
                      " < 3 damping e-foldings");
  }
  if (!(bookkeeping_delta > 0.0)) throw ConfigError("decay verdict: bookkeeping delta must be > 0");

  DecayVerdict v;
  v.sigma0 = sigma0;
  const Field& u0 = traj.states.front().field;
  const double g0 = gevrey_norm(u0, GevreyWeight(sigma0));
  v.cap = 10.0 * g0;

  const std::size_t nrec = traj.states.size();
  const std::size_t ns = sigma_list.size();
  // norms[i][j]: record i, sigma j; plus half-sigma norms and L2 for interpolation.
  std::vector<std::vector<double>> norms(nrec, std::vector<double>(ns));
  std::vector<double> interp(nrec, 0.0);
  parallel_for(nrec, [&](std::size_t i) {
    const Field& u = traj.states[i].field;
    double worst = 0.0;
    for (std::size_t j = 0; j < ns; ++j) {
      norms[i][j] = gevrey_norm(u, GevreyWeight(sigma_list[j]));
      worst = std::max(worst, interpolation_ratio(u, GevreyWeight(sigma_list[j])));
    }
    interp[i] = worst;
  });

  for (std::size_t j = 0; j < ns; ++j) {
    EnvelopeEntry e;
    e.sigma = sigma_list[j];
    for (std::size_t i = 0; i < nrec; ++i) {
      const double t = traj.states[i].time - t0;
      e.constant = std::max(e.constant, norms[i][j] * std::exp(0.5 * gamma * t));
    }
    e.pass = e.constant <= v.cap;
    if (e.pass && e.sigma > v.sigma_star) {
      v.sigma_star = e.sigma;
      v.envelope_constant = e.constant;
    }
    v.entries.push_back(e);
  }
  v.half_rate_pass = v.sigma_star > 0.0;

  v.interpolation_max_ratio = *std::max_element(interp.begin(), interp.end());
  v.interpolation_pass = v.interpolation_max_ratio <= 1.0 + 1e-10;

  // Induction bookkeeping at t = k delta, using the first sigma of the list.
  v.bookkeeping_delta = bookkeeping_delta;
  if (ns > 0) {
    const double l2sq = std::pow(l2_norm(u0), 2);
    const double g0sq = g0 * g0;
    double increments = 0.0;
    std::size_t rec = 0;
    for (std::size_t k = 1;; ++k) {
      const double tk = static_cast<double>(k) * bookkeeping_delta;
      if (tk > span + 1e-9) break;
      while (rec + 1 < nrec && traj.states[rec].time - t0 < tk - 1e-9) ++rec;
      if (k >= 2) increments += std::exp(-2.0 * static_cast<double>(k - 1) * bookkeeping_delta * gamma);
      if (std::abs(traj.states[rec].time - t0 - tk) > 1e-9) continue;
      BookkeepingEntry b;
      b.k = k;
      b.t = tk;
      b.measured = l2sq > 0.0 ? (norms[rec][0] * norms[rec][0] - g0sq) / l2sq : 0.0;
      b.increment_sum = increments;
      v.bookkeeping.push_back(b);
    }
  }
  return v;
}

RadiusSeries radius_over_time(const Trajectory& traj, const WavenumberWindow& window) {
  RadiusSeries out;
  const std::size_t n = traj.states.size();
  out.times.resize(n);
  out.fits.resize(n);
  parallel_for(n, [&](std::size_t i) {
    out.times[i] = traj.states[i].time;
    out.fits[i] = estimate_radius(traj.states[i].field, window);
  });
  out.min_sigma_hat = INFINITY;
  for (const auto& f : out.fits) out.min_sigma_hat = std::min(out.min_sigma_hat, f.sigma_hat);
  if (n == 0) out.min_sigma_hat = 0.0;
  return out;
}

RadiusSeries radius_over_time(const Trajectory& traj) {
  if (traj.states.empty()) return {};
  return radius_over_time(traj, default_radius_window(traj.states.front().field.grid()));
}

}  // namespace kdvk

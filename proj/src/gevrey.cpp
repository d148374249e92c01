#include "kdvk/gevrey.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "fft.hpp"
#include "kdvk/error.hpp"

namespace kdvk {

GevreyWeight::GevreyWeight(double sigma) : sigma_(sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("gevrey: sigma must be a finite nonnegative number");
  }
}

void check_overflow_guard(const GridSpec& grid, GevreyWeight sigma) {
  if (sigma.sigma() * grid.xi_max() > kOverflowGuard) {
    throw OverflowGuardError("gevrey: sigma * xi_max = " +
                             std::to_string(sigma.sigma() * grid.xi_max()) + " exceeds " +
                             std::to_string(kOverflowGuard));
  }
}

double gevrey_norm(const Field& f, GevreyWeight sigma) {
  const auto& grid = f.grid();
  check_overflow_guard(grid, sigma);
  auto c = f.spectral();
  double sum = 0.0;
  if (sigma.sigma() == 0.0) {
    for (const auto& v : c) sum += std::norm(v);
  } else {
    for (std::size_t k = 0; k < c.size(); ++k) {
      const double w = std::exp(sigma.sigma() * std::abs(grid.wavenumber(k))) * std::abs(c[k]);
      sum += w * w;
    }
  }
  if (!std::isfinite(sum)) throw OverflowGuardError("gevrey: weighted sum overflowed");
  return std::sqrt(sum / grid.period());
}

Field apply_lambda_sigma(const Field& f, GevreyWeight sigma) {
  check_overflow_guard(f.grid(), sigma);
  const double s = sigma.sigma();
  return apply_multiplier(f, [s](double xi, std::size_t) -> cplx { return std::exp(s * std::abs(xi)); });
}

namespace {

std::vector<double> spectral_sup_norms(const Field& a, int max_derivative) {
  const auto& grid = a.grid();
  const std::size_t n = grid.size();
  auto src = a.spectral();

  double peak = 0.0;
  for (const auto& v : src) peak = std::max(peak, std::abs(v));
  std::vector<cplx> clean(src.begin(), src.end());
  for (auto& v : clean) {
    if (std::abs(v) <= kNoiseFloor * peak) v = 0.0;
  }

  std::vector<double> norms(static_cast<std::size_t>(max_derivative) + 1);
  std::vector<cplx> work(n);
  std::vector<cplx> phys(n);
  std::vector<cplx> symbol(n, 1.0);  // (i xi)^order
  for (int order = 0; order <= max_derivative; ++order) {
    for (std::size_t k = 0; k < n; ++k) {
      if (order > 0) symbol[k] *= cplx(0.0, grid.wavenumber(k));
      if (order % 2 == 1 && k == grid.nyquist_index()) {
        work[k] = 0.0;
        continue;
      }
      work[k] = clean[k] * symbol[k];
    }
    detail::fft_backward(work, phys);
    double sup = 0.0;
    for (const auto& v : phys) sup = std::max(sup, std::abs(v.real()));
    norms[static_cast<std::size_t>(order)] = sup / grid.period();
  }
  return norms;
}

}  // namespace

DampingProfile::DampingProfile(Field a, double gamma, int max_derivative)
    : a_(std::move(a)), gamma_(gamma) {
  if (!a_.is_real()) throw ConfigError("damping: a(x) must be real-valued");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw ConfigError("damping: gamma must be finite and nonnegative");
  }
  if (max_derivative < 0) throw ConfigError("damping: max_derivative must be >= 0");
  auto values = a_.physical();
  min_ = *std::min_element(values.begin(), values.end());
  const double max = *std::max_element(values.begin(), values.end());
  constant_ = (max == min_);
  sup_norms_ = spectral_sup_norms(a_, max_derivative);
  if (constant_) {
    // Exact values for constant profiles; the spectral route leaves rounding noise.
    sup_norms_[0] = std::abs(min_);
    std::fill(sup_norms_.begin() + 1, sup_norms_.end(), 0.0);
  }
}

DampingProfile DampingProfile::constant(const GridSpec& grid, double value, double gamma) {
  return DampingProfile(Field::from_physical(grid, std::vector<double>(grid.size(), value)), gamma);
}

DampingProfile DampingProfile::sinusoid(const GridSpec& grid, double offset, double amplitude,
                                        double wavenumber, double gamma) {
  return DampingProfile(Field::from_function(grid,
                                             [=](double x) {
                                               return offset + amplitude * std::sin(wavenumber * x);
                                             }),
                        gamma);
}

DampingProfile DampingProfile::cosine_bump(const GridSpec& grid, double gamma, double amplitude,
                                           double wavenumber) {
  return DampingProfile(
      Field::from_function(grid,
                           [=](double x) {
                             return gamma + amplitude * (1.0 + std::cos(wavenumber * x));
                           }),
      gamma);
}

ASigmaSum a_sigma_partial_sum(const DampingProfile& a, GevreyWeight sigma, int terms) {
  const auto& norms = a.derivative_sup_norms();
  const int last = std::min(terms, static_cast<int>(norms.size()) - 1);
  const double s = sigma.sigma();

  std::vector<double> term(static_cast<std::size_t>(last) + 1);
  double coeff = 1.0;  // sigma^k / k!
  double sum = 0.0;
  for (int k = 0; k <= last; ++k) {
    if (k > 0) coeff *= s / static_cast<double>(k);
    term[static_cast<std::size_t>(k)] =
        std::pow(static_cast<double>(k + 1), 0.25) * coeff * norms[static_cast<std::size_t>(k)];
    sum += term[static_cast<std::size_t>(k)];
  }

  ASigmaSum out;
  out.value = sum;
  out.terms = last + 1;
  if (!std::isfinite(sum)) return out;

  // Ratio test over the trailing terms: tail <= t_K q / (1 - q).
  const double t_last = term.back();
  if (t_last == 0.0) {
    out.tail_bound = 0.0;
  } else {
    double q = 0.0;
    const int window = std::min(4, last);
    for (int k = last - window + 1; k <= last; ++k) {
      const double prev = term[static_cast<std::size_t>(k - 1)];
      if (prev == 0.0) {
        q = 1.0;
        break;
      }
      q = std::max(q, term[static_cast<std::size_t>(k)] / prev);
    }
    out.tail_bound = q < 1.0 ? t_last * q / (1.0 - q) : INFINITY;
  }
  out.certified = out.tail_bound < 1e-10 * std::max(sum, 1e-300);
  return out;
}

double a_sigma_norm(const DampingProfile& a, GevreyWeight sigma, int terms) {
  const auto sum = a_sigma_partial_sum(a, sigma, terms);
  if (!sum.certified) {
    throw EstimatorError("A^sigma norm: partial sums not certified convergent after " +
                         std::to_string(sum.terms) + " terms (analytic-class assumption fails)");
  }
  return sum.value;
}

AssumptionReport check_assumptions(const DampingProfile& a, GevreyWeight sigma0) {
  AssumptionReport r;
  r.sigma0 = sigma0.sigma();
  r.gamma = a.gamma();
  r.grid_min = a.grid_min();
  r.floor_pass = a.gamma() > 0.0 && r.grid_min >= a.gamma() * (1.0 - 1e-12);
  const auto sum = a_sigma_partial_sum(a, sigma0);
  r.a_norm = sum.value;
  r.a_norm_certified = sum.certified;
  r.analytic_class_pass = sum.certified && std::isfinite(sum.value);
  return r;
}

WavenumberWindow default_radius_window(const GridSpec& grid) {
  return {2.0, grid.xi_max() / 4.0};
}

namespace {

// Solves the 3x3 system in place (partial pivoting).
std::array<double, 3> solve3(std::array<std::array<double, 4>, 3> m) {
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    }
    std::swap(m[col], m[pivot]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
    }
  }
  std::array<double, 3> x{};
  for (int r = 2; r >= 0; --r) {
    double s = m[r][3];
    for (int c = r + 1; c < 3; ++c) s -= m[r][c] * x[c];
    x[r] = s / m[r][r];
  }
  return x;
}

}  // namespace

RadiusFit estimate_radius(const Field& f, WavenumberWindow window) {
  if (!(window.hi > window.lo) || window.lo < 0.0) {
    throw EstimatorError("radius: window must satisfy 0 <= lo < hi");
  }
  const auto& grid = f.grid();
  auto c = f.spectral();
  double peak = 0.0;
  for (const auto& v : c) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) throw EstimatorError("radius: field is identically zero");

  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t k = 1; k < grid.nyquist_index(); ++k) {
    const double xi = grid.wavenumber(k);
    if (xi < window.lo || xi > window.hi) continue;
    const double mag = std::abs(c[k]);
    if (mag <= kNoiseFloor * peak) continue;
    xs.push_back(xi);
    ys.push_back(std::log(mag));
  }
  if (xs.size() < 8) {
    throw EstimatorError("radius: only " + std::to_string(xs.size()) +
                         " usable modes in the window (need 8)");
  }

  const double npts = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= npts;
  my /= npts;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;

  RadiusFit fit;
  fit.window = window;
  fit.modes_used = xs.size();
  fit.sigma_hat = -slope;
  fit.intercept = my - slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + slope * xs[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / npts);

  // Quadratic fit in the centred variable; a downward-curving log profile means
  // the local decay rate grows across the window (faster than exponential).
  std::array<std::array<double, 4>, 3> normal{};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double t = xs[i] - mx;
    const double basis[3] = {1.0, t, t * t};
    for (int r = 0; r < 3; ++r) {
      for (int col = 0; col < 3; ++col) normal[r][col] += basis[r] * basis[col];
      normal[r][3] += basis[r] * ys[i];
    }
  }
  const auto q = solve3(normal);
  const double t_lo = xs.front() - mx;
  const double t_hi = xs.back() - mx;
  const double rate_lo = -(q[1] + 2.0 * q[2] * t_lo);
  const double rate_hi = -(q[1] + 2.0 * q[2] * t_hi);
  const double scale = std::max(std::abs(fit.sigma_hat), 1e-12);
  fit.rate_growth = (rate_hi - rate_lo) / scale;
  fit.entire_beyond_window = fit.rate_growth > 0.25;
  return fit;
}

}  // namespace kdvk

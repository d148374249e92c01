#include "kdvk/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fft.hpp"
#include "kdvk/error.hpp"

namespace kdvk {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Tolerance used to decide whether a spectrum describes a real function.
constexpr double kHermitianTolerance = 1e-12;

bool is_conjugate_symmetric(std::span<const cplx> c) {
  const std::size_t n = c.size();
  double scale = 0.0;
  for (const auto& v : c) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return true;
  const double tol = kHermitianTolerance * scale;
  if (std::abs(c[0].imag()) > tol || std::abs(c[n / 2].imag()) > tol) return false;
  for (std::size_t k = 1; k < n / 2; ++k) {
    if (std::abs(c[k] - std::conj(c[n - k])) > tol) return false;
  }
  return true;
}

std::vector<double> physical_from_spectrum(const GridSpec& grid, std::span<const cplx> c) {
  const std::size_t n = grid.size();
  std::vector<cplx> out(n);
  detail::fft_backward(c, out);
  std::vector<double> u(n);
  const double scale = 1.0 / grid.period();
  for (std::size_t j = 0; j < n; ++j) u[j] = out[j].real() * scale;
  return u;
}

std::vector<cplx> spectrum_from_physical(const GridSpec& grid, std::span<const double> u) {
  const std::size_t n = grid.size();
  std::vector<cplx> in(u.begin(), u.end());
  std::vector<cplx> out(n);
  detail::fft_forward(in, out);
  const double dx = grid.dx();
  for (auto& v : out) v *= dx;
  return out;
}

void require_same_grid(const Field& a, const Field& b, const char* op) {
  if (!(a.grid() == b.grid())) {
    throw ConfigError(std::string(op) + ": fields live on different grids");
  }
}

}  // namespace

GridSpec::GridSpec(std::size_t n, double period) : n_(n), period_(period) {
  if (n < 8 || !is_power_of_two(n)) {
    throw ConfigError("grid: n_points must be a power of two >= 8, got " + std::to_string(n));
  }
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw ConfigError("grid: period must be positive and finite");
  }
  xi_.resize(n);
  const double dxi = kTwoPi / period;
  for (std::size_t k = 0; k < n; ++k) {
    const long m = k <= n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
    xi_[k] = dxi * static_cast<double>(m);
  }
}

double GridSpec::dxi() const noexcept { return kTwoPi / period_; }

double GridSpec::xi_max() const noexcept { return dxi() * static_cast<double>(n_ / 2); }

std::vector<double> GridSpec::wavenumbers_ascending() const {
  std::vector<double> out(xi_.begin(), xi_.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t GridSpec::index_of(long m) const {
  const long half = static_cast<long>(n_ / 2);
  if (m <= -half || m > half) throw ConfigError("grid: wave index out of range");
  return m >= 0 ? static_cast<std::size_t>(m) : static_cast<std::size_t>(m + static_cast<long>(n_));
}

GridSpec make_grid(std::size_t n, double period) { return GridSpec(n, period); }

Field::Field(GridSpec grid, std::vector<double> physical, std::vector<cplx> spectral,
             Representation authoritative)
    : grid_(std::move(grid)),
      physical_(std::move(physical)),
      spectral_(std::move(spectral)),
      authoritative_(authoritative) {}

Field Field::from_physical(const GridSpec& grid, std::vector<double> samples) {
  if (samples.size() != grid.size()) throw ConfigError("field: sample count does not match grid");
  for (double v : samples) {
    if (!std::isfinite(v)) throw ConfigError("field: non-finite sample");
  }
  auto spectral = spectrum_from_physical(grid, samples);
  return Field(grid, std::move(samples), std::move(spectral), Representation::physical);
}

Field Field::from_spectral(const GridSpec& grid, std::vector<cplx> coefficients) {
  if (coefficients.size() != grid.size()) {
    throw ConfigError("field: coefficient count does not match grid");
  }
  std::vector<double> physical;
  if (is_conjugate_symmetric(coefficients)) physical = physical_from_spectrum(grid, coefficients);
  return Field(grid, std::move(physical), std::move(coefficients), Representation::spectral);
}

Field Field::from_function(const GridSpec& grid, const std::function<double(double)>& f) {
  std::vector<double> u(grid.size());
  for (std::size_t j = 0; j < u.size(); ++j) u[j] = f(grid.x(j));
  return from_physical(grid, std::move(u));
}

Field Field::zeros(const GridSpec& grid) {
  return Field(grid, std::vector<double>(grid.size(), 0.0), std::vector<cplx>(grid.size()),
               Representation::physical);
}

std::span<const double> Field::physical() const {
  if (physical_.empty()) throw std::logic_error("field: complex-valued field has no real samples");
  return physical_;
}

namespace {

Field combine(double a, const Field& f, double b, const Field& g) {
  require_same_grid(f, g, "field arithmetic");
  const std::size_t n = f.grid().size();
  std::vector<cplx> c(n);
  auto fs = f.spectral();
  auto gs = g.spectral();
  for (std::size_t k = 0; k < n; ++k) c[k] = a * fs[k] + b * gs[k];
  return Field::from_spectral(f.grid(), std::move(c));
}

}  // namespace

Field operator+(const Field& a, const Field& b) { return combine(1.0, a, 1.0, b); }
Field operator-(const Field& a, const Field& b) { return combine(1.0, a, -1.0, b); }

Field operator*(double s, const Field& f) {
  std::vector<cplx> c(f.spectral().begin(), f.spectral().end());
  for (auto& v : c) v *= s;
  return Field::from_spectral(f.grid(), std::move(c));
}

Field transform_forward(const Field& f) {
  auto phys = f.physical();
  return Field::from_physical(f.grid(), std::vector<double>(phys.begin(), phys.end()));
}

Field transform_inverse(const Field& f) {
  auto c = f.spectral();
  return Field::from_spectral(f.grid(), std::vector<cplx>(c.begin(), c.end()));
}

Field apply_multiplier(const Field& f,
                       const std::function<cplx(double, std::size_t)>& multiplier) {
  const auto& grid = f.grid();
  auto src = f.spectral();
  std::vector<cplx> c(src.size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = multiplier(grid.wavenumber(k), k) * src[k];
  return Field::from_spectral(grid, std::move(c));
}

double l2_norm(const Field& f) {
  double sum = 0.0;
  for (const auto& v : f.spectral()) sum += std::norm(v);
  return std::sqrt(sum / f.grid().period());
}

EquationParams::EquationParams(double alpha, double beta, double mu, double lambda)
    : alpha_(alpha), beta_(beta), mu_(mu), lambda_(lambda) {
  if (alpha == 0.0) throw ConfigError("equation: alpha must be nonzero");
  for (double v : {alpha, beta, mu, lambda}) {
    if (!std::isfinite(v)) throw ConfigError("equation: coefficients must be finite");
  }
}

double dispersion_symbol(double xi, const EquationParams& p) noexcept {
  const double xi2 = xi * xi;
  const double xi3 = xi2 * xi;
  return p.alpha() * xi3 * xi2 - p.beta() * xi3;
}

Field spatial_derivative(const Field& f, int order) {
  if (order < 0 || order > kMaxDerivativeOrder) {
    throw ConfigError("spatial_derivative: order must be in [0, " +
                      std::to_string(kMaxDerivativeOrder) + "]");
  }
  if (order == 0) return f;
  const std::size_t nyquist = f.grid().nyquist_index();
  const bool odd = order % 2 == 1;
  return apply_multiplier(f, [&](double xi, std::size_t k) -> cplx {
    if (odd && k == nyquist) return 0.0;
    cplx m = 1.0;
    for (int j = 0; j < order; ++j) m *= cplx(0.0, xi);
    return m;
  });
}

std::size_t padded_size(std::size_t n, int degree) {
  switch (degree) {
    case 2:
      return 3 * n / 2;
    case 3:
      return 2 * n;
    default:
      throw ConfigError("dealias_product: degree must be 2 or 3");
  }
}

PaddedGrid::PaddedGrid(const GridSpec& grid, std::size_t padded_points)
    : grid_(grid), m_(padded_points), half_(padded_points / 2 + 1) {
  if (m_ < grid.size() || m_ % 2 != 0) throw ConfigError("padded grid must be even and >= n");
}

void PaddedGrid::to_physical(std::span<const cplx> spectrum, std::span<double> out) {
  const std::size_t n = grid_.size();
  std::fill(half_.begin(), half_.end(), cplx{});
  for (std::size_t k = 0; k < n / 2; ++k) half_[k] = spectrum[k];
  detail::fft_c2r(half_, out);
  const double scale = 1.0 / grid_.period();
  for (auto& v : out) v *= scale;
}

void PaddedGrid::to_spectrum(std::span<const double> values, std::span<cplx> out) {
  const std::size_t n = grid_.size();
  detail::fft_r2c(values, half_);
  const double scale = grid_.period() / static_cast<double>(m_);
  out[0] = cplx(half_[0].real() * scale, 0.0);
  for (std::size_t k = 1; k < n / 2; ++k) {
    out[k] = half_[k] * scale;
    out[n - k] = std::conj(out[k]);
  }
  out[n / 2] = 0.0;
}

namespace {

// General (possibly complex-valued) padded product through c2c transforms.
Field padded_product_complex(std::span<const Field* const> factors, std::size_t m) {
  const auto& grid = factors[0]->grid();
  const std::size_t n = grid.size();
  const std::size_t half = n / 2;
  std::vector<cplx> acc(m, cplx(1.0, 0.0));
  std::vector<cplx> pad(m);
  std::vector<cplx> phys(m);
  for (const Field* f : factors) {
    std::fill(pad.begin(), pad.end(), cplx{});
    auto c = f->spectral();
    for (std::size_t k = 0; k < half; ++k) pad[k] = c[k];
    for (std::size_t k = half + 1; k < n; ++k) pad[m - (n - k)] = c[k];
    detail::fft_backward(pad, phys);
    const double scale = 1.0 / grid.period();
    for (std::size_t j = 0; j < m; ++j) acc[j] *= phys[j] * scale;
  }
  detail::fft_forward(acc, pad);
  const double scale = grid.period() / static_cast<double>(m);
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < half; ++k) out[k] = pad[k] * scale;
  for (std::size_t k = half + 1; k < n; ++k) out[k] = pad[m - (n - k)] * scale;
  return Field::from_spectral(grid, std::move(out));
}

Field padded_product(std::span<const Field* const> factors, std::size_t m) {
  const auto& grid = factors[0]->grid();
  for (const Field* f : factors) require_same_grid(*factors[0], *f, "dealias_product");
  const bool all_real =
      std::all_of(factors.begin(), factors.end(), [](const Field* f) { return f->is_real(); });
  if (!all_real) return padded_product_complex(factors, m);

  PaddedGrid padded(grid, m);
  std::vector<double> acc(m, 1.0);
  std::vector<double> values(m);
  for (const Field* f : factors) {
    padded.to_physical(f->spectral(), values);
    for (std::size_t j = 0; j < m; ++j) acc[j] *= values[j];
  }
  std::vector<cplx> out(grid.size());
  padded.to_spectrum(acc, out);
  return Field::from_spectral(grid, std::move(out));
}

}  // namespace

Field dealias_product(const Field& f, const Field& g, int degree) {
  const std::size_t m = padded_size(f.grid().size(), degree);
  if (degree == 2) {
    const Field* factors[] = {&f, &g};
    return padded_product(factors, m);
  }
  const Field* factors[] = {&f, &g, &g};
  return padded_product(factors, m);
}

Field dealias_product3(const Field& f, const Field& g, const Field& h) {
  const Field* factors[] = {&f, &g, &h};
  return padded_product(factors, padded_size(f.grid().size(), 3));
}

}  // namespace kdvk

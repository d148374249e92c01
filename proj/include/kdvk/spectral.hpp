#pragma once

// Periodic Fourier substrate: grid, fields carried in physical and spectral
// form, spectral differentiation, the dispersion symbol and dealiased products.
//
// Conventions (continuum-consistent on the torus [0, L)):
//   u_hat(xi_k) = dx * sum_j u(x_j) e^{-i xi_k x_j}
//   u(x_j)      = (1/L) * sum_k u_hat(xi_k) e^{+i xi_k x_j}
// so u_hat approximates the whole-line transform and
//   sum_j |u_j|^2 dx = (1/L) sum_k |u_hat_k|^2.
// Spectral arrays use FFT order: index k in [0, n/2] holds xi = 2 pi k / L,
// index k in (n/2, n) holds xi = 2 pi (k - n) / L. Index n/2 is the Nyquist mode.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace kdvk {

using cplx = std::complex<double>;

class GridSpec {
 public:
  // n must be a power of two, at least 8; period must be positive.
  GridSpec(std::size_t n, double period);

  std::size_t size() const noexcept { return n_; }
  double period() const noexcept { return period_; }
  double dx() const noexcept { return period_ / static_cast<double>(n_); }
  // Wavenumber spacing 2 pi / L.
  double dxi() const noexcept;
  // Largest wavenumber magnitude on the grid (the Nyquist wavenumber).
  double xi_max() const noexcept;
  std::size_t nyquist_index() const noexcept { return n_ / 2; }

  double x(std::size_t j) const noexcept { return static_cast<double>(j) * dx(); }
  double wavenumber(std::size_t index) const noexcept { return xi_[index]; }
  // FFT order.
  std::span<const double> wavenumbers() const noexcept { return xi_; }
  std::vector<double> wavenumbers_ascending() const;

  // Index of the mode with integer wave index m (xi = 2 pi m / L), m in (-n/2, n/2].
  std::size_t index_of(long m) const;

  friend bool operator==(const GridSpec& a, const GridSpec& b) noexcept {
    return a.n_ == b.n_ && a.period_ == b.period_;
  }

 private:
  std::size_t n_;
  double period_;
  std::vector<double> xi_;
};

GridSpec make_grid(std::size_t n, double period);

enum class Representation { physical, spectral };

// A function on the grid. Both representations are kept in sync at
// construction; `authoritative()` records which one the field was built from.
// Fields whose spectrum is not conjugate-symmetric (complex-valued functions)
// carry only the spectral representation.
class Field {
 public:
  static Field from_physical(const GridSpec& grid, std::vector<double> samples);
  static Field from_spectral(const GridSpec& grid, std::vector<cplx> coefficients);
  static Field from_function(const GridSpec& grid, const std::function<double(double)>& f);
  static Field zeros(const GridSpec& grid);

  const GridSpec& grid() const noexcept { return grid_; }
  Representation authoritative() const noexcept { return authoritative_; }
  bool is_real() const noexcept { return !physical_.empty(); }

  // Throws std::logic_error for complex-valued fields.
  std::span<const double> physical() const;
  std::span<const cplx> spectral() const noexcept { return spectral_; }

 private:
  Field(GridSpec grid, std::vector<double> physical, std::vector<cplx> spectral,
        Representation authoritative);

  GridSpec grid_;
  std::vector<double> physical_;
  std::vector<cplx> spectral_;
  Representation authoritative_;
};

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double s, const Field& f);

// Returns a field whose spectral side is recomputed from the physical samples.
Field transform_forward(const Field& f);
// Returns a field whose physical side is recomputed from the spectral coefficients.
Field transform_inverse(const Field& f);

// Multiplies every spectral coefficient by multiplier(xi, index).
Field apply_multiplier(const Field& f, const std::function<cplx(double, std::size_t)>& multiplier);

// L2 norm (sum_j |u_j|^2 dx)^{1/2}, evaluated spectrally via Parseval.
double l2_norm(const Field& f);

class EquationParams {
 public:
  // alpha must be nonzero.
  EquationParams(double alpha, double beta, double mu, double lambda);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double mu() const noexcept { return mu_; }
  double lambda() const noexcept { return lambda_; }

 private:
  double alpha_;
  double beta_;
  double mu_;
  double lambda_;
};

// phi(xi) = alpha xi^5 - beta xi^3.
double dispersion_symbol(double xi, const EquationParams& p) noexcept;

inline constexpr int kMaxDerivativeOrder = 6;

// Multiplication by (i xi)^order; the Nyquist mode is zeroed for odd orders.
Field spatial_derivative(const Field& f, int order);

// Pointwise product of degree 2 (f*g, padding 3/2) or degree 3 (f*g*g, padding 2)
// evaluated on a zero-padded grid and truncated back. The Nyquist mode of the
// result is zeroed.
Field dealias_product(const Field& f, const Field& g, int degree);
// Cubic product f*g*h on the factor-2 grid.
Field dealias_product3(const Field& f, const Field& g, const Field& h);

std::size_t padded_size(std::size_t n, int degree);

// Workspace for moving conjugate-symmetric spectra between the base grid and a
// zero-padded grid of m points (same period). Holds scratch buffers, so one
// instance per thread.
class PaddedGrid {
 public:
  PaddedGrid(const GridSpec& grid, std::size_t padded_points);

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t padded_points() const noexcept { return m_; }

  // spectrum: length n full spectrum of a real field. out: m samples.
  void to_physical(std::span<const cplx> spectrum, std::span<double> out);
  // values: m samples. out: length n full spectrum, |k| >= n/2 dropped.
  void to_spectrum(std::span<const double> values, std::span<cplx> out);

 private:
  GridSpec grid_;
  std::size_t m_;
  std::vector<cplx> half_;
};

}  // namespace kdvk

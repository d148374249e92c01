#pragma once

// Gevrey norms, the exponential Fourier multiplier Lambda^sigma, the damping
// coefficient class A^sigma and a radius-of-analyticity estimator.

#include <cstddef>
#include <vector>

#include "kdvk/spectral.hpp"

namespace kdvk {

// Largest admissible sigma * xi_max before e^{sigma |xi|} is considered unsafe.
inline constexpr double kOverflowGuard = 700.0;

class GevreyWeight {
 public:
  explicit GevreyWeight(double sigma);
  double sigma() const noexcept { return sigma_; }

 private:
  double sigma_;
};

// Throws OverflowGuardError when sigma * xi_max exceeds kOverflowGuard.
void check_overflow_guard(const GridSpec& grid, GevreyWeight sigma);

// (1/L sum_k e^{2 sigma |xi_k|} |u_hat_k|^2)^{1/2}. At sigma = 0 this is l2_norm.
double gevrey_norm(const Field& f, GevreyWeight sigma);

// Multiplies the spectrum by e^{sigma |xi|}.
Field apply_lambda_sigma(const Field& f, GevreyWeight sigma);

// Damping coefficient a(x) with its floor gamma and the sup norms of its
// first derivatives, precomputed spectrally.
class DampingProfile {
 public:
  static constexpr int kDefaultTerms = 64;

  DampingProfile(Field a, double gamma, int max_derivative = kDefaultTerms);

  static DampingProfile constant(const GridSpec& grid, double value, double gamma);
  // offset + amplitude * sin(wavenumber * x)
  static DampingProfile sinusoid(const GridSpec& grid, double offset, double amplitude,
                                 double wavenumber, double gamma);
  // gamma + amplitude * (1 + cos(wavenumber * x)), floor gamma
  static DampingProfile cosine_bump(const GridSpec& grid, double gamma, double amplitude,
                                    double wavenumber);

  const Field& field() const noexcept { return a_; }
  double gamma() const noexcept { return gamma_; }
  // ||d^k a / dx^k||_inf for k = 0..max_derivative.
  const std::vector<double>& derivative_sup_norms() const noexcept { return sup_norms_; }
  double sup_norm() const noexcept { return sup_norms_[0]; }
  double grid_min() const noexcept { return min_; }
  bool is_constant() const noexcept { return constant_; }

 private:
  Field a_;
  double gamma_;
  std::vector<double> sup_norms_;
  double min_;
  bool constant_;
};

struct ASigmaSum {
  double value = 0.0;
  double tail_bound = 0.0;  // estimated remainder after the last term
  bool certified = false;   // tail_bound < 1e-10 * value
  int terms = 0;
};

// Partial sum of sum_k (k+1)^{1/4} sigma^k / k! ||d^k a||_inf with a ratio-test
// tail estimate. Never throws on non-convergence.
ASigmaSum a_sigma_partial_sum(const DampingProfile& a, GevreyWeight sigma,
                              int terms = DampingProfile::kDefaultTerms);

// Certified A^sigma norm; throws EstimatorError when the tail cannot be bounded.
double a_sigma_norm(const DampingProfile& a, GevreyWeight sigma,
                    int terms = DampingProfile::kDefaultTerms);

struct AssumptionReport {
  double sigma0 = 0.0;
  double gamma = 0.0;
  double grid_min = 0.0;
  bool floor_pass = false;  // min a >= gamma > 0
  double a_norm = 0.0;
  bool a_norm_certified = false;
  bool analytic_class_pass = false;  // finite, certified A^{sigma0} norm
};

AssumptionReport check_assumptions(const DampingProfile& a, GevreyWeight sigma0);

struct WavenumberWindow {
  double lo = 0.0;
  double hi = 0.0;
};

// [2, xi_max / 4]
WavenumberWindow default_radius_window(const GridSpec& grid);

inline constexpr double kNoiseFloor = 1e-13;

struct RadiusFit {
  double sigma_hat = 0.0;   // fitted exponential decay rate of |u_hat|
  double intercept = 0.0;   // log|u_hat| at xi = 0 from the line fit
  double residual = 0.0;    // RMS of the line fit in log units
  WavenumberWindow window;  // requested window
  std::size_t modes_used = 0;
  double rate_growth = 0.0;  // relative increase of the local decay rate across the window
  bool entire_beyond_window = false;
};

// Least-squares fit of log|u_hat(xi)| against -xi over the positive modes of the
// window whose modulus exceeds kNoiseFloor * max|u_hat|. Throws EstimatorError
// with fewer than 8 usable modes.
RadiusFit estimate_radius(const Field& f, WavenumberWindow window);

}  // namespace kdvk

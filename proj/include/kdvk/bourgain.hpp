#pragma once

// Spacetime fields on a symmetric time window, their X_{sigma,b} norms, the
// Duhamel integral and the Picard iteration of the Duhamel map.

#include <cstddef>
#include <span>
#include <vector>

#include "kdvk/gevrey.hpp"
#include "kdvk/spectral.hpp"

namespace kdvk {

struct BourgainParams {
  double sigma = 0.5;
  double b = 0.55;
  double b_prime = 0.65;
  double delta = 0.05;          // local time window, cutoff supported in |t| < delta
  double cutoff_margin = 0.25;  // taper occupies delta*(1-2m) <= |t| <= delta*(1-m)
  std::size_t time_samples = 256;

  // 1/2 < b < b' < 1, 0 < delta <= 1, 0 < margin < 1/2, time_samples >= 128 and even.
  void validate() const;
};

// psi(|t|): 1 on [0, delta(1-2m)], 0 beyond delta(1-m), joined by the balanced
// exp(-1/s) glue g(1-x)/(g(1-x)+g(x)).
double cutoff_weight(double t, double delta, double margin);
std::vector<double> make_cutoff(double delta, double margin, std::span<const double> times);

// Real fields sampled at t_j = t0 + j dt, j = 0..nt-1. The window is treated as
// one period of a time-periodic extension.
struct SpaceTimeField {
  GridSpec grid;
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<Field> slices;

  std::size_t time_samples() const noexcept { return slices.size(); }
  double time(std::size_t j) const noexcept { return t0 + static_cast<double>(j) * dt; }
  double period() const noexcept { return dt * static_cast<double>(slices.size()); }
  std::vector<double> times() const;
  // Index of the sample at t = 0; throws ConfigError if there is none.
  std::size_t origin_index() const;
};

// Zero field on t_j = -delta + j (2 delta / nt).
SpaceTimeField make_window(const GridSpec& grid, double delta, std::size_t nt);

struct SpacetimeSpectrum {
  std::size_t nt = 0;
  std::size_t n = 0;
  double period = 0.0;            // time period T
  std::vector<double> taus;       // FFT order, 2 pi l / T
  std::vector<cplx> values;       // values[l * n + k] ~ u~(xi_k, tau_l)

  cplx at(std::size_t l, std::size_t k) const { return values[l * n + k]; }
};

// u~(xi, tau) = dt dx sum_{j,x} u e^{-i(xi x + tau t)}. Parseval:
// sum |u|^2 dx dt = (1 / (L T)) sum |u~|^2.
SpacetimeSpectrum spacetime_transform(const SpaceTimeField& u);

// (dt sum_j ||u(t_j)||_{L2}^2)^{1/2}
double spacetime_l2(const SpaceTimeField& u);

// Discrete (1/(L T) sum e^{2 sigma|xi|} (1+|tau+phi(xi)|)^{2b} |u~|^2)^{1/2}, with
// tau + phi(xi) resolved exactly by transforming e^{i phi t} u_hat in time.
double xsb_norm(const SpaceTimeField& u, double sigma, double b, const EquationParams& p);
double xsb_norm(const SpaceTimeField& u, const BourgainParams& params, const EquationParams& p);

// S(t) u0 at every sample time.
SpaceTimeField free_evolution(const Field& u0, const SpaceTimeField& window,
                              const EquationParams& p);

// t -> int_0^t S(t - s) F(s) ds per mode, integrated in the rotating frame with
// F interpolated linearly between samples and the phase e^{i phi s} integrated
// exactly. Reduces to the trapezoidal rule as phi dt -> 0. Needs a sample at t = 0.
SpaceTimeField duhamel_integral(const SpaceTimeField& forcing, const EquationParams& p);

struct PicardReport {
  std::vector<double> iterate_distances;  // sup_t G^sigma distance between successive iterates
  std::vector<double> xsb_distances;      // X_{sigma,b} distance between successive iterates
  std::vector<double> contraction_ratios;
  double max_ratio = 0.0;
  double final_vs_oracle = 0.0;  // sup over the flat part of the cutoff, G^sigma
  double final_norm = 0.0;       // sup_t G^sigma norm of the last iterate
  double final_xsb_norm = 0.0;
  double m_diagnostic = 0.0;     // ||a||_{A^sigma} + |u| + |v| + |u|^2 + |v|^2 in X_{sigma,b}
  double metric_window_end = 0.0;
  double oracle_window_end = 0.0;
  double oracle_dt = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool diverged = false;
};

struct PicardOptions {
  double tolerance = 1e-12;       // stop when d_k <= tolerance * max(1, norm)
  double oracle_max_dt = 1e-4;    // oracle step is sample dt / ceil(sample dt / this)
  bool run_oracle = true;
};

// u^0 = psi S(t) u0, u^{k+1} = psi [S(t) u0 - int_0^t S(t-s) N(u^k(s)) ds].
PicardReport picard_iterate(const Field& u0, const EquationParams& p, const DampingProfile& a,
                            const BourgainParams& params, std::size_t n_iters,
                            const PicardOptions& options = {});

}  // namespace kdvk

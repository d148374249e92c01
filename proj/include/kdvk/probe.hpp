#pragma once

// Randomized measurement of the constants in the product, multilinear and
// elementary weight inequalities, with stability checks under grid refinement.

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "kdvk/bourgain.hpp"
#include "kdvk/gevrey.hpp"
#include "kdvk/spectral.hpp"

namespace kdvk {

struct ProbeConfig {
  std::size_t n_samples = 1000;
  std::uint64_t seed = 42;
  double period = 16.0 * std::numbers::pi;
  std::vector<std::size_t> grid_sizes{64, 128, 256};
  BourgainParams bourgain{0.5, 0.55, 0.65, 1.0 / 128.0, 0.25, 128};
  EquationParams equation{1.0, 1.0, 1.0, 1.0};
  double rho_max = 50.0;         // modulation frequencies drawn from [-rho_max, rho_max]
  double band_fraction = 1.0;    // retained band = band_fraction * xi_max / degree
  std::optional<double> band_limit;  // absolute cap on the retained band
  bool mean_zero = true;         // drop the xi = 0 mode from every draw
  double max_growth = 0.10;      // allowed max-ratio growth per refinement step
  // Damping profile gamma + amplitude (1 + cos(wavenumber x)).
  double damping_gamma = 1.0;
  double damping_amplitude = 0.5;
  double damping_wavenumber = 1.0;
  // Data-to-solution map.
  std::size_t lipschitz_samples = 100;
  std::size_t lipschitz_n = 128;
  std::vector<double> perturbations{1e-3, 1e-4, 1e-5};
  double lipschitz_amplitude = 0.1;  // G^sigma norm of the base data
  double lipschitz_dt = 1e-3;
  double lipschitz_time = 0.05;

  void validate() const;
};

struct RatioStats {
  std::size_t samples = 0;   // draws that entered the statistics
  std::size_t excluded = 0;  // draws with a denominator below 1e-14
  double max = 0.0;
  double p99 = 0.0;
  double median = 0.0;
};

// Nearest-rank statistics over the valid ratios.
RatioStats summarize(std::vector<double> ratios, std::size_t excluded);

struct RefinementLevel {
  std::string label;
  double parameter = 0.0;  // grid size or perturbation size
  std::size_t n = 0;
  std::size_t time_samples = 0;
  RatioStats stats;
};

struct ProbeReport {
  std::string kind;
  std::vector<RefinementLevel> levels;
  std::vector<double> growth;  // max_{i+1} / max_i - 1
  double max_growth = 0.0;
  bool pass = false;
};

// Time samples resolving the interaction frequencies of a degree-d product of draws.
std::size_t probe_time_samples(const GridSpec& grid, const ProbeConfig& cfg, int degree);

// Largest retained wavenumber for a degree-d probe on this grid.
double probe_band(const GridSpec& grid, const ProbeConfig& cfg, int degree);

// Random tapered spacetime field psi(t) e^{-i phi t} sum_m c_m e^{i rho_m t} e^{i xi_m x},
// |xi_m| <= band, with c_m ~ CN(0,1) e^{-r|xi|} / (1 + |xi|), r ~ U[sigma, 3 sigma].
// Coefficients are indexed by integer wave number, so draws agree across grids.
SpaceTimeField random_spacetime_field(const GridSpec& grid, const ProbeConfig& cfg,
                                      std::uint64_t draw, unsigned stream, double band,
                                      std::size_t time_samples);

// Random real field with the same spectral envelope and band.
Field random_field(const GridSpec& grid, const ProbeConfig& cfg, std::uint64_t draw,
                   unsigned stream, double band);

// Slice-wise dealiased product and derivative.
SpaceTimeField spacetime_product(const SpaceTimeField& u, const SpaceTimeField& v);
SpaceTimeField spacetime_derivative(const SpaceTimeField& u);

// ||d_x(u v)||_{X_{sigma,b-1}} / (||u||_{X_{sigma,b'}} ||v||_{X_{sigma,b'}}); negative when
// the denominator is below 1e-14.
double bilinear_ratio(const SpaceTimeField& u, const SpaceTimeField& v, const BourgainParams& bp,
                      const EquationParams& p);
double trilinear_ratio(const SpaceTimeField& u1, const SpaceTimeField& u2,
                       const SpaceTimeField& u3, const BourgainParams& bp,
                       const EquationParams& p);

// ||a u||_{G^sigma} / (||a||_{A^sigma} ||u||_{G^sigma}).
double damping_ratio_gevrey(const DampingProfile& a, const Field& u, GevreyWeight sigma);
// ||a u||_{X_{sigma,b'-1}} / (||a||_{A^sigma} ||u||_{X_{sigma,b}}).
double damping_ratio_xsb(const DampingProfile& a, const SpaceTimeField& u,
                         const BourgainParams& bp, const EquationParams& p);

ProbeReport probe_bilinear(const ProbeConfig& cfg);
ProbeReport probe_trilinear(const ProbeConfig& cfg);

struct DampingProbeReport {
  ProbeReport gevrey;
  ProbeReport xsb;
  bool pass = false;
};

// Uses the cosine-bump profile from cfg on every grid. Throws EstimatorError when
// the profile fails the analytic-class check.
DampingProbeReport probe_damping_product(const ProbeConfig& cfg);

struct WeightReport {
  double a_exp = 0.0;
  double b_exp = 0.0;
  int sign = 1;
  double range = 0.0;
  std::size_t points = 0;
  double max_ratio = 0.0;
  double doubled_range_max_ratio = 0.0;
  bool finite = false;
  bool range_checked = false;  // |b| <= a
  bool range_stable = false;   // doubling the range changes the max by < 1e-9 relative
};

// Max of <x +- y>^b / (<x>^a <y>^b) over a (points x points) grid on [-range, range]^2,
// with <x> = 1 + |x|. Throws ConfigError unless a >= b and a >= 0.
WeightReport probe_weight_inequality(double a_exp, double b_exp, int sign = 1,
                                     double range = 100.0, std::size_t points = 401);

struct TriangleReport {
  double sigma = 0.0;
  std::size_t points = 0;
  std::size_t violations = 0;
  double max_ratio = 0.0;  // max e^{s|x|} / (e^{s|x-y|} e^{s|y|})
  bool pass = false;
};

// Exhaustive check of s|x| <= s|x-y| + s|y| on a dyadic (points x points) grid.
TriangleReport probe_exponential_triangle(double sigma, std::size_t points = 256,
                                          double spacing = 0.125);

// Pairs (u0, u0 + eps w) evolved by the stepper for cfg.lipschitz_time; ratio of
// sup_t G^sigma distance to the data distance, one level per perturbation size.
ProbeReport probe_lipschitz_data_map(const ProbeConfig& cfg, const EquationParams& p,
                                     const DampingProfile& a);

// Bilinear probe repeated for each b in the list; b' is raised to b + 0.1 where needed.
std::vector<ProbeReport> probe_bilinear_sweep(const ProbeConfig& cfg,
                                              const std::vector<double>& b_values);

}  // namespace kdvk

#pragma once

// Diagnostics over trajectories: the damped L2 identity and decay law, the
// Gevrey commutators and their small-sigma scaling, the half-rate decay
// envelope and the radius of analyticity over time.

#include <array>
#include <cstddef>
#include <vector>

#include "kdvk/evolution.hpp"
#include "kdvk/gevrey.hpp"
#include "kdvk/record.hpp"

namespace kdvk {

// Residual of d/dt int u^2 + 2 int a u^2 at each record. The derivative uses
// 5-point finite-difference weights on the recorded times (centred in the
// interior, one-sided at the ends). Throws ConfigError with fewer than 5 records.
std::vector<double> l2_identity_residual(const Trajectory& traj, const DampingProfile& a);

// Stores the residuals in traj.records when there are enough records.
void fill_l2_identity_residual(Trajectory& traj, const DampingProfile& a);

// int a u^2 dx, evaluated spectrally with a dealiased product.
double weighted_l2_square(const Field& u, const DampingProfile& a);

struct L2DecayCheck {
  bool pass = false;
  double tol = 1e-4;
  // slack_i = ||u0|| e^{-gamma t_i} - ||u(t_i)||, relative to ||u0|| e^{-gamma t_i}.
  double min_slack = 0.0;
  double max_slack = 0.0;
  double max_abs_relative_deviation = 0.0;
};

// ||u(t)|| <= (1 + tol) ||u0|| e^{-gamma t} at every record.
L2DecayCheck l2_decay_check(const Trajectory& traj, double gamma, double tol = 1e-4);

struct CommutatorSet {
  Field delta;  // d/dx [ (L u)^2 - L(u^2) ]
  Field theta;  // d/dx [ (L u)^3 - L(u^3) ]
  Field gamma;  // a L u - L(a u)
};

// L = Lambda^sigma. Products are dealiased.
CommutatorSet commutators(const Field& f, GevreyWeight sigma, const DampingProfile& a);

// Constant in e^{s|x-y|}e^{s|y|} - e^{s|x|} <= C (s min{|x-y|,|y|})^k e^{s|x-y|}e^{s|y|}, k in [0,1].
inline constexpr double kExponentialDifferenceConstant = 2.0;

struct ScalingReport {
  std::vector<double> sigmas;
  std::vector<double> delta_norms;
  std::vector<double> theta_norms;
  std::vector<double> gamma_norms;
  std::array<double, 3> slopes{};        // log-log slopes for Delta, Theta, Gamma
  std::array<bool, 3> slope_pass{};      // slope >= 0.9
  bool monotone = false;                 // all norms decrease as sigma decreases
  double exp_difference_max_ratio = 0.0; // max LHS / (C s^k m^k e^{...}) over the pointwise grid
  bool exp_difference_pass = false;
  double bracket_max_ratio = 0.0;        // max min{|x-y|,|y|} <x> / (<x-y><y>) over a 128^2 grid
  bool bracket_pass = false;             // ratio <= 2
};

// sigma_grid: strictly decreasing, positive, spanning at least one decade.
ScalingReport sigma_scaling_probe(const Field& f, const std::vector<double>& sigma_grid,
                                  const DampingProfile& a);

struct EnvelopeEntry {
  double sigma = 0.0;
  double constant = 0.0;  // smallest C with ||u(t)||_{G^sigma} <= C e^{-gamma t / 2}
  bool pass = false;      // constant <= cap
};

struct BookkeepingEntry {
  std::size_t k = 0;
  double t = 0.0;
  // (||u(k delta)||^2_{G^sigma} - ||u0||^2_{G^sigma0}) / ||u0||^2_{L2}: the smallest D_k
  // compatible with the measured state.
  double measured = 0.0;
  // sum_{j=1}^{k-1} e^{-2 j delta gamma}: the increment sum of the induction.
  double increment_sum = 0.0;
};

struct DecayVerdict {
  double sigma0 = 0.0;  // reference sigma for the cap
  double cap = 0.0;     // 10 ||u0||_{G^sigma0}
  std::vector<EnvelopeEntry> entries;
  double sigma_star = 0.0;          // largest passing sigma, 0 when none passes
  double envelope_constant = 0.0;   // C at sigma_star
  bool half_rate_pass = false;
  double interpolation_max_ratio = 0.0;  // max ||u||^2_{G^{s/2}} / (||u|| ||u||_{G^s})
  bool interpolation_pass = false;       // ratio <= 1 + 1e-10 everywhere
  double bookkeeping_delta = 0.0;
  std::vector<BookkeepingEntry> bookkeeping;
};

// Throws ConfigError when gamma * T < 3 or gamma <= 0.
DecayVerdict gevrey_decay_verdict(const Trajectory& traj, const std::vector<double>& sigma_list,
                                  double gamma, double sigma0, double bookkeeping_delta = 0.5);

// {sigma0, sigma0/2, sigma0/4, sigma0/8}
std::vector<double> default_sigma_list(double sigma0);

// Interpolation check on a single field; returns ||u||^2_{G^{s/2}} / (||u|| ||u||_{G^s}).
double interpolation_ratio(const Field& u, GevreyWeight sigma);

struct RadiusSeries {
  std::vector<double> times;
  std::vector<RadiusFit> fits;
  double min_sigma_hat = 0.0;
};

// Propagates EstimatorError from any record.
RadiusSeries radius_over_time(const Trajectory& traj, const WavenumberWindow& window);
RadiusSeries radius_over_time(const Trajectory& traj);

}  // namespace kdvk

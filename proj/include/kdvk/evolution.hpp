#pragma once

// Time integration of the damped KdV-Kawahara equation
//   u_t + alpha u_xxxxx + beta u_xxx + mu (u^2)_x + lambda (u^3)_x + a(x) u = 0
// with an integrating-factor RK4 scheme: the dispersive part is propagated
// exactly, the nonlinear and damping terms are integrated in the rotating frame.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "kdvk/gevrey.hpp"
#include "kdvk/record.hpp"
#include "kdvk/spectral.hpp"

namespace kdvk {

struct State {
  Field field;
  double time = 0.0;

  State(Field f, double t);
};

struct IntegratorConfig {
  double dt = 0.005;
  bool dealias = true;
  std::size_t record_every = 2;
  double cfl = 0.5;

  void validate() const;
};

// S(t) f: multiplies each coefficient by e^{-i t phi(xi)}. The Nyquist mode is
// left unchanged (its effective symbol is zero).
Field linear_propagator(const Field& f, double t, const EquationParams& p);

// mu (u^2)_x + lambda (u^3)_x + a u, products dealiased.
Field nonlinearity(const Field& f, const EquationParams& p, const DampingProfile& a);

// C_cfl / (xi_max (2|mu| max|u| + 3|lambda| max|u|^2) + ||a||_inf).
double stable_dt(double max_abs_u, const GridSpec& grid, const EquationParams& p,
                 const DampingProfile& a, double cfl);

// One step. Throws ConfigError when dt violates the stability bound and
// NumericalAbort when the result is not finite.
State step(const State& s, const EquationParams& p, const DampingProfile& a,
           const IntegratorConfig& cfg);

struct Trajectory {
  std::vector<State> states;
  std::vector<MonitorRecord> records;
  double dt = 0.0;
};

struct EvolveOutcome {
  Trajectory trajectory;              // everything recorded before any abort
  std::optional<std::string> abort;   // set when the run stopped early
  double last_valid_time = 0.0;
};

// Runs round(T / dt) steps, recording every `record_every` steps and the final
// state. Numerical aborts are reported in the outcome, never thrown. A stability
// violation at t = 0 throws ConfigError.
EvolveOutcome evolve_checked(const State& s0, double T, const EquationParams& p,
                             const DampingProfile& a, const IntegratorConfig& cfg,
                             const MonitorSet& monitors);

// As evolve_checked, rethrowing an abort as NumericalAbort.
Trajectory evolve(const State& s0, double T, const EquationParams& p, const DampingProfile& a,
                  const IntegratorConfig& cfg, const MonitorSet& monitors);

}  // namespace kdvk

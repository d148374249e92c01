#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "kdvk/error.hpp"
#include "kdvk/evolution.hpp"

using namespace kdvk;

namespace {

constexpr double kPi = std::numbers::pi;

MonitorSet l2_only() {
  MonitorSet m;
  m.radius = false;
  return m;
}

Field sech(const GridSpec& g, double amp) {
  const double c = g.period() / 2.0;
  return Field::from_function(g, [=](double x) { return amp / std::cosh(x - c); });
}

double max_spectral_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.grid().size(); ++k) m = std::max(m, std::abs(a.spectral()[k] - b.spectral()[k]));
  return m;
}

// e^{-i t phi} with the phase reduced in extended precision.
cplx reference_phase(long double xi, long double t, const EquationParams& p) {
  const long double phi = static_cast<long double>(p.alpha()) * std::pow(xi, 5.0L) -
                          static_cast<long double>(p.beta()) * std::pow(xi, 3.0L);
  const long double angle = -t * phi;
  return {static_cast<double>(std::cos(angle)), static_cast<double>(std::sin(angle))};
}

}  // namespace

TEST_CASE("propagator rotates single modes by the dispersion phase") {
  const GridSpec g(64, 8.0 * kPi);
  const EquationParams p(1.0, 1.0, 0.0, 0.0);
  std::mt19937_64 eng(3);
  std::uniform_int_distribution<int> mode(1, 31);
  std::uniform_real_distribution<double> time(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = mode(eng);
    const double t = time(eng);
    std::vector<cplx> c(g.size());
    c[m] = 1.0;
    c[g.size() - m] = 1.0;
    const auto out = linear_propagator(Field::from_spectral(g, c), t, p);
    const cplx expected = reference_phase(g.wavenumber(m), t, p);
    CHECK(std::abs(out.spectral()[m] - expected) < 1e-12);
    CHECK(std::abs(out.spectral()[g.size() - m] - std::conj(expected)) < 1e-12);
  }
}

TEST_CASE("propagator group law and Nyquist identity") {
  const GridSpec g(128, 16.0 * kPi);
  const EquationParams p(1.0, -2.0, 0.0, 0.0);
  const auto u = sech(g, 1.0);
  const auto a = linear_propagator(linear_propagator(u, 0.3, p), 0.45, p);
  const auto b = linear_propagator(u, 0.75, p);
  CHECK(max_spectral_diff(a, b) < 1e-12);
  const auto back = linear_propagator(b, -0.75, p);
  CHECK(max_spectral_diff(back, u) < 1e-12);
  CHECK(back.spectral()[g.nyquist_index()] == u.spectral()[g.nyquist_index()]);
}

TEST_CASE("constant damping step is the RK4 polynomial times the phase") {
  const GridSpec g(64, 8.0 * kPi);
  const EquationParams p(1.0, 1.0, 0.0, 0.0);
  const double gamma = 2.0;
  const auto a = DampingProfile::constant(g, gamma, gamma);
  IntegratorConfig cfg;
  cfg.dt = 0.01;
  const auto u = Field::from_function(g, [](double x) { return std::cos(0.75 * x); });  // m = 3
  const auto s = step(State(u, 0.0), p, a, cfg);
  const double z = -gamma * cfg.dt;
  const double r = 1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0;
  const cplx expected = u.spectral()[3] * r * reference_phase(g.wavenumber(3), cfg.dt, p);
  CHECK(std::abs(s.field.spectral()[3] - expected) < 1e-12);
  CHECK(s.time == doctest::Approx(0.01));
}

TEST_CASE("mass of the undamped flow is conserved and decays with damping") {
  const GridSpec g(256, 32.0 * kPi);
  const EquationParams p(1.0, 1.0, 1.0, 1.0);
  IntegratorConfig cfg;
  cfg.dt = 0.0005;
  cfg.record_every = 200;
  const auto u0 = sech(g, 0.5);
  const auto none = DampingProfile::constant(g, 0.0, 0.0);
  const auto traj = evolve(State(u0, 0.0), 0.5, p, none, cfg, l2_only());
  CHECK(traj.records.size() == 6);
  for (const auto& r : traj.records) CHECK(r.l2 == doctest::Approx(traj.records[0].l2).epsilon(1e-9));

  const auto one = DampingProfile::constant(g, 1.0, 1.0);
  const auto damped = evolve(State(u0, 0.0), 0.5, p, one, cfg, l2_only());
  for (const auto& r : damped.records) {
    CHECK(r.l2 == doctest::Approx(damped.records[0].l2 * std::exp(-r.t)).epsilon(1e-8));
  }
}

TEST_CASE("nonlinear flow converges at fourth order") {
  // Coarse grid keeps dt * phi(xi_max) small, so the asymptotic regime is reached.
  const GridSpec g(32, 16.0 * kPi);
  const EquationParams p(1.0, 1.0, 1.0, 1.0);
  const auto none = DampingProfile::constant(g, 0.0, 0.0);
  const auto u0 = sech(g, 1.0);
  auto run = [&](double dt) {
    IntegratorConfig cfg;
    cfg.dt = dt;
    cfg.record_every = 1000000;
    return evolve(State(u0, 0.0), 1.0, p, none, cfg, l2_only()).states.back().field;
  };
  const auto a = run(0.04);
  const auto b = run(0.02);
  const auto c = run(0.01);
  const double ratio = l2_norm(a - b) / l2_norm(b - c);
  CHECK(ratio > 14.0);
  CHECK(ratio < 18.0);
}

TEST_CASE("T = 0 records only the initial state") {
  const GridSpec g(64, 8.0 * kPi);
  const auto out = evolve(State(sech(g, 0.5), 0.0), 0.0, EquationParams(1, 1, 1, 1),
                          DampingProfile::constant(g, 1.0, 1.0), IntegratorConfig{}, l2_only());
  CHECK(out.states.size() == 1);
  CHECK(out.records.size() == 1);
}

TEST_CASE("stability bound violation at t = 0 is a config error") {
  const GridSpec g(1024, 8.0 * kPi);
  IntegratorConfig cfg;
  cfg.dt = 0.1;
  CHECK_THROWS_AS(evolve(State(sech(g, 10.0), 0.0), 1.0, EquationParams(1, 1, 1, 1),
                         DampingProfile::constant(g, 1.0, 1.0), cfg, l2_only()),
                  ConfigError);
  CHECK_THROWS_AS(step(State(sech(g, 10.0), 0.0), EquationParams(1, 1, 1, 1),
                       DampingProfile::constant(g, 1.0, 1.0), cfg),
                  ConfigError);
}

TEST_CASE("blow-up aborts with the last valid time") {
  // Stability bound disabled, so a huge step on large data overflows.
  const GridSpec g(64, 8.0 * kPi);
  const State s(sech(g, 50.0), 0.0);
  const auto a = DampingProfile::constant(g, 1.0, 1.0);
  const EquationParams p(1, 1, 1, 1);
  IntegratorConfig cfg;
  cfg.dt = 0.5;
  cfg.record_every = 1;
  cfg.cfl = std::numeric_limits<double>::max();
  const auto out = evolve_checked(s, 1000.0, p, a, cfg, l2_only());
  REQUIRE(out.abort.has_value());
  CHECK(out.last_valid_time < 1000.0);
  CHECK(out.trajectory.states.back().time == out.last_valid_time);
  CHECK_THROWS_AS(evolve(s, 1000.0, p, a, cfg, l2_only()), NumericalAbort);
}

TEST_CASE("integrator config validation") {
  IntegratorConfig cfg;
  cfg.dt = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.dt = 0.01;
  cfg.record_every = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

#include "doctest.h"

#include <cmath>
#include <numbers>

#include "kdvk/bourgain.hpp"
#include "kdvk/error.hpp"
#include "kdvk/evolution.hpp"

using namespace kdvk;

namespace {

constexpr double kPi = std::numbers::pi;

SpaceTimeField filled(const GridSpec& g, double delta, std::size_t nt,
                      double (*f)(double x, double t)) {
  auto u = make_window(g, delta, nt);
  for (std::size_t j = 0; j < nt; ++j) {
    const double t = u.time(j);
    u.slices[j] = Field::from_function(g, [=](double x) { return f(x, t); });
  }
  return u;
}

double sample_field(double x, double t) {
  return std::cos(x - 3.0 * t) * (1.0 + t) + 0.5 * std::sin(2.0 * x + t * t) + 0.25 * std::cos(3.0 * x);
}

}  // namespace

TEST_CASE("cutoff is flat, smooth and compactly supported") {
  const double delta = 0.2, m = 0.25;
  CHECK(cutoff_weight(0.0, delta, m) == 1.0);
  CHECK(cutoff_weight(0.1, delta, m) == 1.0);
  CHECK(cutoff_weight(-0.1, delta, m) == 1.0);
  CHECK(cutoff_weight(0.15, delta, m) == 0.0);
  CHECK(cutoff_weight(0.125, delta, m) == doctest::Approx(0.5));
  double prev = 1.0;
  for (int i = 0; i <= 100; ++i) {
    const double w = cutoff_weight(0.1 + 0.05 * i / 100.0, delta, m);
    CHECK(w <= prev);
    prev = w;
  }
  CHECK_THROWS_AS(cutoff_weight(0.0, 0.0, m), ConfigError);
  CHECK_THROWS_AS(cutoff_weight(0.0, delta, 0.5), ConfigError);
}

TEST_CASE("parameter validation") {
  BourgainParams bp;
  CHECK_NOTHROW(bp.validate());
  bp.b = 0.7;
  CHECK_THROWS_AS(bp.validate(), ConfigError);
  bp = BourgainParams{};
  bp.time_samples = 100;
  CHECK_THROWS_AS(bp.validate(), ConfigError);
}

TEST_CASE("window geometry") {
  const GridSpec g(16, 2.0 * kPi);
  const auto w = make_window(g, 0.5, 8);
  CHECK(w.time(0) == doctest::Approx(-0.5));
  CHECK(w.dt == doctest::Approx(0.125));
  CHECK(w.origin_index() == 4);
  CHECK(w.period() == doctest::Approx(1.0));
  CHECK_THROWS_AS(make_window(g, 0.5, 7), ConfigError);
}

TEST_CASE("spacetime transform obeys Parseval") {
  const GridSpec g(16, 2.0 * kPi);
  const auto u = filled(g, 0.5, 32, sample_field);
  const auto spec = spacetime_transform(u);
  double sum = 0.0;
  for (const auto& v : spec.values) sum += std::norm(v);
  const double l2 = spacetime_l2(u);
  CHECK(sum / (g.period() * spec.period) == doctest::Approx(l2 * l2).epsilon(1e-12));
}

TEST_CASE("X norm against direct quadrature") {
  const GridSpec g(16, 2.0 * kPi);
  const EquationParams p(1.0, 1.0, 0.0, 0.0);
  const std::size_t nt = 64;
  const auto u = filled(g, 0.25, nt, sample_field);
  const double sigma = 0.3, b = 0.6;
  const double T = u.period();
  double total = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double xi = g.wavenumber(k);
    const double phi = k == g.nyquist_index() ? 0.0 : dispersion_symbol(xi, p);
    for (std::size_t l = 0; l < nt; ++l) {
      const double m = l <= nt / 2 ? static_cast<double>(l) : static_cast<double>(l) - nt;
      const double rho = 2.0 * kPi * m / T;
      cplx acc = 0.0;
      for (std::size_t j = 0; j < nt; ++j) {
        const double t = u.time(j);
        const auto vals = u.slices[j].physical();
        for (std::size_t i = 0; i < g.size(); ++i) {
          acc += vals[i] * std::polar(1.0, -xi * g.x(i) + phi * t - rho * (t - u.t0));
        }
      }
      acc *= u.dt * g.dx();
      total += std::exp(2.0 * sigma * std::abs(xi)) * std::pow(1.0 + std::abs(rho), 2.0 * b) * std::norm(acc);
    }
  }
  const double oracle = std::sqrt(total / (g.period() * T));
  CHECK(xsb_norm(u, sigma, b, p) == doctest::Approx(oracle).epsilon(1e-11));
}

TEST_CASE("X norm at b = 0 and sigma = 0 is the spacetime L2 norm") {
  const GridSpec g(32, 4.0 * kPi);
  const auto u = filled(g, 0.5, 128, sample_field);
  CHECK(xsb_norm(u, 0.0, 0.0, EquationParams(1, 1, 0, 0)) == doctest::Approx(spacetime_l2(u)).epsilon(1e-12));
}

TEST_CASE("Duhamel integral of a constant forcing") {
  const GridSpec g(32, 2.0 * kPi);
  const EquationParams p(1.0, 1.0, 0.0, 0.0);
  auto forcing = make_window(g, 0.1, 256);
  for (auto& s : forcing.slices) s = Field::from_function(g, [](double x) { return std::cos(3.0 * x); });
  const auto w = duhamel_integral(forcing, p);
  const double phi = dispersion_symbol(3.0, p);
  const cplx fhat = forcing.slices[0].spectral()[3];
  double err = 0.0;
  for (std::size_t j = 0; j < forcing.time_samples(); ++j) {
    const double t = forcing.time(j);
    const cplx expected = fhat * (1.0 - std::polar(1.0, -phi * t)) / cplx(0.0, phi);
    err = std::max(err, std::abs(w.slices[j].spectral()[3] - expected));
  }
  CHECK(err < 1e-12 * std::abs(fhat));
  CHECK(std::abs(w.slices[w.origin_index()].spectral()[3]) == 0.0);
}

TEST_CASE("free evolution matches the propagator") {
  const GridSpec g(32, 4.0 * kPi);
  const EquationParams p(1.0, 1.0, 0.0, 0.0);
  const auto u0 = Field::from_function(g, [](double x) { return std::cos(x) + 0.1 * std::sin(2.0 * x); });
  const auto w = free_evolution(u0, make_window(g, 0.1, 128), p);
  const auto direct = linear_propagator(u0, w.time(5), p);
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(w.slices[5].spectral()[k] == direct.spectral()[k]);
}

TEST_CASE("Picard iteration: zero data and the linear flow") {
  const GridSpec g(64, 8.0 * kPi);
  const auto none = DampingProfile::constant(g, 0.0, 0.0);
  BourgainParams bp{0.5, 0.55, 0.65, 0.05, 0.25, 128};

  const auto zero = picard_iterate(Field::zeros(g), EquationParams(1, 1, 1, 1), none, bp, 5);
  CHECK(zero.converged);
  CHECK(zero.iterations == 1);
  CHECK(zero.iterate_distances[0] == 0.0);
  CHECK(zero.final_norm == 0.0);

  const auto u0 = Field::from_function(g, [&](double x) { return 1.0 / std::cosh(x - 4.0 * kPi); });
  const auto lin = picard_iterate(u0, EquationParams(1, 1, 0, 0), none, bp, 5);
  CHECK(lin.converged);
  CHECK(lin.iterations == 1);
  CHECK(lin.iterate_distances[0] <= 1e-12);
  CHECK(lin.final_vs_oracle < 1e-10);

  CHECK_THROWS_AS(picard_iterate(u0, EquationParams(1, 1, 0, 0), none, bp, 1), ConfigError);
}

TEST_CASE("Picard iteration contracts for small data") {
  const GridSpec g(128, 16.0 * kPi);
  const auto a = DampingProfile::constant(g, 1.0, 1.0);
  const auto u0 = Field::from_function(g, [&](double x) { return 0.1 / std::cosh(x - 8.0 * kPi); });
  BourgainParams bp{0.5, 0.55, 0.65, 0.05, 0.25, 256};
  const auto r = picard_iterate(u0, EquationParams(1, 1, 1, 1), a, bp, 20);
  CHECK(r.converged);
  CHECK_FALSE(r.diverged);
  for (double q : r.contraction_ratios) CHECK(q < 1.0);
  CHECK(r.final_vs_oracle < 1e-4);
}

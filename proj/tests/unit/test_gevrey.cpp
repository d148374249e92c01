#include "doctest.h"

#include <cmath>
#include <numbers>

#include "kdvk/error.hpp"
#include "kdvk/gevrey.hpp"

using namespace kdvk;

namespace {

constexpr double kPi = std::numbers::pi;

Field sech(const GridSpec& g, double amp) {
  const double c = g.period() / 2.0;
  return Field::from_function(g, [=](double x) { return amp / std::cosh(x - c); });
}

}  // namespace

TEST_CASE("Gevrey norm of a single cosine") {
  const GridSpec g(64, 8.0 * kPi);  // xi = 2 pi m / L, m = 12 -> xi = 3
  const auto f = Field::from_function(g, [](double x) { return std::cos(3.0 * x); });
  for (double s : {0.0, 0.25, 1.0}) {
    CHECK(gevrey_norm(f, GevreyWeight(s)) ==
          doctest::Approx(std::sqrt(g.period() / 2.0) * std::exp(3.0 * s)).epsilon(1e-12));
  }
  CHECK(gevrey_norm(f, GevreyWeight(0.0)) == doctest::Approx(l2_norm(f)).epsilon(1e-14));
}

TEST_CASE("negative sigma and overflow are rejected") {
  CHECK_THROWS_AS(GevreyWeight(-0.1), ConfigError);
  const GridSpec g(1024, 2.0 * kPi);  // xi_max = 512
  const auto f = Field::zeros(g);
  CHECK_THROWS_AS(gevrey_norm(f, GevreyWeight(2.0)), OverflowGuardError);
}

TEST_CASE("Lambda^sigma scales each mode") {
  const GridSpec g(32, 2.0 * kPi);
  const auto f = Field::from_function(g, [](double x) { return std::sin(2.0 * x) + std::cos(5.0 * x); });
  const auto lf = apply_lambda_sigma(f, GevreyWeight(0.3));
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double x = g.x(j);
    CHECK(lf.physical()[j] ==
          doctest::Approx(std::exp(0.6) * std::sin(2.0 * x) + std::exp(1.5) * std::cos(5.0 * x)));
  }
}

TEST_CASE("cosine bump derivative sup norms and A^sigma sum") {
  const GridSpec g(64, 2.0 * kPi);
  const double gamma = 0.5, amp = 0.25, k = 2.0;
  const auto a = DampingProfile::cosine_bump(g, gamma, amp, k);
  const auto& norms = a.derivative_sup_norms();
  CHECK(norms[0] == doctest::Approx(gamma + 2.0 * amp));
  for (int j = 1; j <= 10; ++j) CHECK(norms[j] == doctest::Approx(amp * std::pow(k, j)).epsilon(1e-10));
  CHECK(a.grid_min() == doctest::Approx(gamma));

  // Independent summation with lgamma-based factorials.
  const double s = 0.3;
  double expected = gamma + 2.0 * amp;
  for (int j = 1; j < 60; ++j) {
    expected += std::pow(j + 1.0, 0.25) * std::exp(j * std::log(s) - std::lgamma(j + 1.0)) * amp * std::pow(k, j);
  }
  CHECK(a_sigma_norm(a, GevreyWeight(s)) == doctest::Approx(expected).epsilon(1e-12));
  const auto report = check_assumptions(a, GevreyWeight(s));
  CHECK(report.floor_pass);
  CHECK(report.analytic_class_pass);
}

TEST_CASE("constant damping has A^sigma norm equal to its value") {
  const GridSpec g(32, 2.0 * kPi);
  const auto a = DampingProfile::constant(g, 1.5, 1.0);
  CHECK(a.is_constant());
  CHECK(a_sigma_norm(a, GevreyWeight(0.7)) == doctest::Approx(1.5));
  const auto zero = DampingProfile::constant(g, 0.0, 0.0);
  CHECK_FALSE(check_assumptions(zero, GevreyWeight(0.5)).floor_pass);
}

TEST_CASE("floor violations are reported") {
  const GridSpec g(32, 2.0 * kPi);
  const auto a = DampingProfile::sinusoid(g, 1.0, 0.5, 1.0, 0.8);
  CHECK_FALSE(check_assumptions(a, GevreyWeight(0.1)).floor_pass);
}

TEST_CASE("radius of a pure exponential spectrum") {
  const GridSpec g(512, 32.0 * kPi);
  const double s = 0.8;
  std::vector<cplx> c(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) c[k] = std::exp(-s * std::abs(g.wavenumber(k)));
  c[g.nyquist_index()] = std::real(c[g.nyquist_index()]);
  const auto f = Field::from_spectral(g, c);
  const auto fit = estimate_radius(f, {2.0, 8.0});
  CHECK(fit.sigma_hat == doctest::Approx(s).epsilon(1e-10));
  CHECK(fit.residual < 1e-10);
  CHECK_FALSE(fit.entire_beyond_window);
}

TEST_CASE("sech data has radius pi/2") {
  const GridSpec g(4096, 64.0 * kPi);
  const auto fit = estimate_radius(sech(g, 0.5), default_radius_window(g));
  CHECK(fit.sigma_hat >= 0.95 * kPi / 2.0);
  CHECK(fit.sigma_hat <= 1.05 * kPi / 2.0);
  CHECK_FALSE(fit.entire_beyond_window);
}

TEST_CASE("Gaussian data is flagged as entire") {
  const GridSpec g(4096, 64.0 * kPi);
  const double c = g.period() / 2.0;
  const auto f = Field::from_function(g, [=](double x) { return 0.5 * std::exp(-(x - c) * (x - c)); });
  const auto fit = estimate_radius(f, {2.0, 16.0});
  CHECK(fit.entire_beyond_window);
}

TEST_CASE("radius estimator failure modes") {
  const GridSpec g(256, 16.0 * kPi);
  CHECK_THROWS_AS(estimate_radius(Field::zeros(g), {2.0, 8.0}), EstimatorError);
  const auto f = Field::from_function(g, [](double x) { return std::cos(x); });
  CHECK_THROWS_AS(estimate_radius(f, {2.0, 8.0}), EstimatorError);
  CHECK_THROWS_AS(estimate_radius(f, {8.0, 2.0}), EstimatorError);
}

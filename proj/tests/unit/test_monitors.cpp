#include "doctest.h"

#include <cmath>
#include <numbers>

#include "kdvk/error.hpp"
#include "kdvk/monitors.hpp"

using namespace kdvk;

namespace {

constexpr double kPi = std::numbers::pi;

Trajectory scaled_trajectory(const Field& f, double rate, double h, std::size_t count) {
  Trajectory traj;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = h * static_cast<double>(i);
    traj.states.emplace_back(std::exp(-rate * t) * f, t);
  }
  return traj;
}

}  // namespace

TEST_CASE("L2 identity residual vanishes for exact exponential decay") {
  const GridSpec g(64, 8.0 * kPi);
  const auto f = Field::from_function(g, [](double x) { return std::cos(0.5 * x) + 0.2; });
  const auto a = DampingProfile::constant(g, 1.5, 1.5);
  const auto traj = scaled_trajectory(f, 1.5, 0.001, 20);
  const auto res = l2_identity_residual(traj, a);
  const double scale = std::pow(l2_norm(f), 2);
  for (double r : res) CHECK(std::abs(r) < 1e-8 * scale);
  CHECK_THROWS_AS(l2_identity_residual(scaled_trajectory(f, 1.0, 0.01, 4), a), ConfigError);
}

TEST_CASE("weighted mass with a variable profile") {
  const GridSpec g(64, 2.0 * kPi);
  const auto a = DampingProfile::cosine_bump(g, 1.0, 0.5, 1.0);  // 1.5 + 0.5 cos x
  const auto u = Field::from_function(g, [](double x) { return std::cos(x); });
  // int (1.5 + 0.5 cos x) cos^2 x dx over [0, 2 pi] = 1.5 pi
  CHECK(weighted_l2_square(u, a) == doctest::Approx(1.5 * kPi).epsilon(1e-13));
}

TEST_CASE("decay check reports slack against the exponential bound") {
  const GridSpec g(32, 2.0 * kPi);
  const auto f = Field::from_function(g, [](double x) { return std::sin(x); });
  const auto exact = l2_decay_check(scaled_trajectory(f, 1.0, 0.1, 11), 1.0);
  CHECK(exact.pass);
  CHECK(exact.max_abs_relative_deviation < 1e-14);
  const auto faster = l2_decay_check(scaled_trajectory(f, 2.0, 0.1, 11), 1.0);
  CHECK(faster.pass);
  CHECK(faster.min_slack == doctest::Approx(0.0));
  CHECK(faster.max_slack == doctest::Approx(1.0 - std::exp(-1.0)));
  const auto slower = l2_decay_check(scaled_trajectory(f, 0.5, 0.1, 11), 1.0);
  CHECK_FALSE(slower.pass);
}

TEST_CASE("commutators vanish at sigma = 0 and Gamma vanishes for constant damping") {
  const GridSpec g(128, 16.0 * kPi);
  const auto f = Field::from_function(g, [&](double x) { return 0.5 / std::cosh(x - 8.0 * kPi); });
  const auto bump = DampingProfile::cosine_bump(g, 1.0, 0.5, 0.25);
  const auto zero = commutators(f, GevreyWeight(0.0), bump);
  CHECK(l2_norm(zero.delta) < 1e-14);
  CHECK(l2_norm(zero.theta) < 1e-14);
  CHECK(l2_norm(zero.gamma) < 1e-14);
  const auto flat = commutators(f, GevreyWeight(0.3), DampingProfile::constant(g, 2.0, 2.0));
  CHECK(l2_norm(flat.gamma) == 0.0);
  CHECK(l2_norm(flat.delta) > 0.0);
}

TEST_CASE("two-mode closed form for Delta") {
  // u = cos(k1 x) + cos(k2 x): every product mode cancels except k1 - k2, giving
  // Delta = -(k1 - k2) (e^{s(k1+k2)} - e^{s|k1-k2|}) sin((k1 - k2) x).
  const GridSpec g(64, 2.0 * kPi);
  const double k1 = 5.0, k2 = 2.0, s = 0.2;
  const auto u = Field::from_function(g, [=](double x) { return std::cos(k1 * x) + std::cos(k2 * x); });
  const auto c = commutators(u, GevreyWeight(s), DampingProfile::constant(g, 1.0, 1.0));
  const double amp = -(k1 - k2) * (std::exp(s * (k1 + k2)) - std::exp(s * (k1 - k2)));
  double err = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    err = std::max(err, std::abs(c.delta.physical()[j] - amp * std::sin((k1 - k2) * g.x(j))));
  }
  CHECK(err < 1e-10);
}

TEST_CASE("commutator norms scale linearly in small sigma") {
  const GridSpec g(256, 16.0 * kPi);
  std::vector<cplx> c(g.size());
  for (long m = 1; m <= 24; ++m) {
    const cplx v = std::polar(std::exp(-0.1 * m), 0.7 * m);
    c[g.index_of(m)] = v;
    c[g.index_of(-m)] = std::conj(v);
  }
  const auto f = Field::from_spectral(g, c);
  const auto a = DampingProfile::cosine_bump(g, 1.0, 0.5, 0.5);
  std::vector<double> sigmas;
  for (int i = 0; i <= 8; ++i) sigmas.push_back(0.1 * std::pow(10.0, -2.0 * i / 8.0));
  const auto r = sigma_scaling_probe(f, sigmas, a);
  for (int j = 0; j < 3; ++j) {
    CHECK(r.slopes[j] >= 0.9);
    CHECK(r.slope_pass[j]);
  }
  CHECK(r.monotone);
  CHECK(r.exp_difference_pass);
  CHECK(r.bracket_pass);
  CHECK_THROWS_AS(sigma_scaling_probe(f, {0.1, 0.05}, a), ConfigError);
  CHECK_THROWS_AS(sigma_scaling_probe(f, {0.01, 0.1}, a), ConfigError);
}

TEST_CASE("interpolation ratio never exceeds one") {
  const GridSpec g(128, 16.0 * kPi);
  const auto f = Field::from_function(g, [&](double x) { return 1.0 / std::cosh(x - 8.0 * kPi); });
  for (double s : {0.1, 0.5, 1.0, 2.0}) CHECK(interpolation_ratio(f, GevreyWeight(s)) <= 1.0 + 1e-12);
  const auto mode = Field::from_function(g, [](double x) { return std::cos(x); });
  CHECK(interpolation_ratio(mode, GevreyWeight(0.7)) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("decay verdict envelope constants") {
  const GridSpec g(64, 8.0 * kPi);
  const auto f = Field::from_function(g, [](double x) { return std::cos(0.5 * x); });
  // ||u(t)||_{G^s} = e^{-t} ||f||_{G^s}; against e^{-t/2} the worst time is t = 0.
  const auto traj = scaled_trajectory(f, 1.0, 0.5, 9);
  const auto v = gevrey_decay_verdict(traj, {0.4, 0.2}, 1.0, 0.4, 0.5);
  REQUIRE(v.entries.size() == 2);
  CHECK(v.entries[0].constant == doctest::Approx(gevrey_norm(f, GevreyWeight(0.4))));
  CHECK(v.cap == doctest::Approx(10.0 * gevrey_norm(f, GevreyWeight(0.4))));
  CHECK(v.half_rate_pass);
  CHECK(v.sigma_star == 0.4);
  CHECK(v.interpolation_pass);
  REQUIRE_FALSE(v.bookkeeping.empty());
  CHECK(v.bookkeeping[0].t == doctest::Approx(0.5));
  CHECK(v.bookkeeping[1].increment_sum == doctest::Approx(std::exp(-1.0)));

  CHECK_THROWS_AS(gevrey_decay_verdict(traj, {0.4}, 0.0, 0.4), ConfigError);
  CHECK_THROWS_AS(gevrey_decay_verdict(scaled_trajectory(f, 1.0, 0.1, 5), {0.4}, 1.0, 0.4), ConfigError);
}

TEST_CASE("default sigma list halves three times") {
  const auto s = default_sigma_list(1.6);
  REQUIRE(s.size() == 4);
  CHECK(s[3] == doctest::Approx(0.2));
}

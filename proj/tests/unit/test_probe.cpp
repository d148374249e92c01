#include "doctest.h"

#include <cmath>
#include <numbers>

#include "kdvk/error.hpp"
#include "kdvk/probe.hpp"

using namespace kdvk;

namespace {

ProbeConfig small_config() {
  ProbeConfig c;
  c.n_samples = 3;
  c.grid_sizes = {32, 64};
  c.lipschitz_samples = 3;
  c.lipschitz_n = 32;
  return c;
}

}  // namespace

TEST_CASE("nearest-rank statistics") {
  std::vector<double> r;
  for (int i = 100; i >= 1; --i) r.push_back(i);
  const auto s = summarize(r, 2);
  CHECK(s.samples == 100);
  CHECK(s.excluded == 2);
  CHECK(s.max == 100.0);
  CHECK(s.p99 == 99.0);
  CHECK(s.median == 50.0);
  CHECK(summarize({}, 0).samples == 0);
}

TEST_CASE("random fields are band-limited, real and grid-consistent") {
  const auto cfg = small_config();
  const GridSpec coarse(32, cfg.period), fine(64, cfg.period);
  const auto a = random_field(coarse, cfg, 7, 0, probe_band(coarse, cfg, 2));
  const auto b = random_field(fine, cfg, 7, 0, probe_band(coarse, cfg, 2));
  CHECK(a.is_real());
  CHECK(a.spectral()[0] == cplx(0.0, 0.0));
  for (long m = 1; m < 16; ++m) {
    CHECK(a.spectral()[coarse.index_of(m)] == b.spectral()[fine.index_of(m)]);
  }
  for (long m = 9; m < 16; ++m) CHECK(a.spectral()[coarse.index_of(m)] == cplx(0.0, 0.0));
  const auto other = random_field(coarse, cfg, 8, 0, probe_band(coarse, cfg, 2));
  CHECK(other.spectral()[1] != a.spectral()[1]);
}

TEST_CASE("probe drivers agree with the reference spacetime path") {
  auto cfg = small_config();
  cfg.grid_sizes = {32};
  const GridSpec g(32, cfg.period);
  const auto bi = probe_bilinear(cfg);
  const auto tri = probe_trilinear(cfg);
  const auto damp = probe_damping_product(cfg);
  const auto bump = DampingProfile::cosine_bump(g, cfg.damping_gamma, cfg.damping_amplitude,
                                                cfg.damping_wavenumber);
  const std::size_t nt2 = probe_time_samples(g, cfg, 2);
  const std::size_t nt3 = probe_time_samples(g, cfg, 3);
  const double b2 = probe_band(g, cfg, 2), b3 = probe_band(g, cfg, 3);
  const double bd = std::min(b2, g.xi_max() - cfg.damping_wavenumber);
  double mb = 0.0, mt = 0.0, md = 0.0;
  for (std::uint64_t i = 0; i < cfg.n_samples; ++i) {
    mb = std::max(mb, bilinear_ratio(random_spacetime_field(g, cfg, i, 0, b2, nt2),
                                     random_spacetime_field(g, cfg, i, 1, b2, nt2), cfg.bourgain,
                                     cfg.equation));
    mt = std::max(mt, trilinear_ratio(random_spacetime_field(g, cfg, i, 0, b3, nt3),
                                      random_spacetime_field(g, cfg, i, 1, b3, nt3),
                                      random_spacetime_field(g, cfg, i, 2, b3, nt3), cfg.bourgain,
                                      cfg.equation));
    md = std::max(md, damping_ratio_xsb(bump, random_spacetime_field(g, cfg, i, 4, bd, nt2),
                                        cfg.bourgain, cfg.equation));
  }
  CHECK(bi.levels[0].stats.max == doctest::Approx(mb).epsilon(1e-13));
  CHECK(tri.levels[0].stats.max == doctest::Approx(mt).epsilon(1e-13));
  CHECK(damp.xsb.levels[0].stats.max == doctest::Approx(md).epsilon(1e-13));
}

TEST_CASE("constant damping has product ratio one") {
  const auto cfg = small_config();
  const GridSpec g(64, cfg.period);
  const auto a = DampingProfile::constant(g, 2.5, 2.5);
  const auto u = random_field(g, cfg, 1, 3, probe_band(g, cfg, 2));
  CHECK(damping_ratio_gevrey(a, u, GevreyWeight(0.5)) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(damping_ratio_gevrey(a, Field::zeros(g), GevreyWeight(0.5)) < 0.0);
}

TEST_CASE("bilinear ratio of a single tapered mode") {
  // For u = psi(t) cos(3x) the numerator field is d_x(u^2) = -3 psi^2 sin(6x).
  const GridSpec g(32, 2.0 * std::numbers::pi);
  const EquationParams p(1.0, 1.0, 1.0, 1.0);
  auto u = make_window(g, 0.1, 256);
  auto w = make_window(g, 0.1, 256);
  for (std::size_t j = 0; j < u.time_samples(); ++j) {
    const double s = cutoff_weight(u.time(j), 0.1, 0.25);
    u.slices[j] = Field::from_function(g, [=](double x) { return s * std::cos(3.0 * x); });
    w.slices[j] = Field::from_function(g, [=](double x) { return -3.0 * s * s * std::sin(6.0 * x); });
  }
  const BourgainParams bp{0.5, 0.55, 0.65, 0.1, 0.25, 256};
  const double expected = xsb_norm(w, bp.sigma, bp.b - 1.0, p) / std::pow(xsb_norm(u, bp.sigma, bp.b_prime, p), 2);
  CHECK(bilinear_ratio(u, u, bp, p) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(bilinear_ratio(make_window(g, 0.1, 256), u, bp, p) < 0.0);
}

TEST_CASE("weight inequality") {
  const auto w = probe_weight_inequality(1.0, 1.0);
  CHECK(w.max_ratio <= 1.0 + 1e-12);
  CHECK(w.max_ratio == doctest::Approx(1.0));
  CHECK(w.range_stable);
  const auto neg = probe_weight_inequality(0.5, -0.5, -1);
  CHECK(neg.finite);
  CHECK(neg.max_ratio <= 1.0 + 1e-12);
  CHECK_THROWS_AS(probe_weight_inequality(0.5, 1.0), ConfigError);
  CHECK_THROWS_AS(probe_weight_inequality(1.0, 0.5, 2), ConfigError);
}

TEST_CASE("exponential triangle inequality") {
  const auto t = probe_exponential_triangle(0.5, 256, 0.125);
  CHECK(t.pass);
  CHECK(t.violations == 0);
  CHECK(t.max_ratio == doctest::Approx(1.0));
  CHECK_THROWS_AS(probe_exponential_triangle(1000.0, 256, 0.125), OverflowGuardError);
}

TEST_CASE("linear data map is a G^sigma isometry") {
  auto cfg = small_config();
  const GridSpec g(32, cfg.period);
  const auto r = probe_lipschitz_data_map(cfg, EquationParams(1, 1, 0, 0), DampingProfile::constant(g, 0.0, 0.0));
  for (const auto& lvl : r.levels) CHECK(lvl.stats.max == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.pass);
  const auto damped = probe_lipschitz_data_map(cfg, EquationParams(1, 1, 0, 0), DampingProfile::constant(g, 1.0, 1.0));
  for (const auto& lvl : damped.levels) CHECK(lvl.stats.max <= 1.0 + 1e-12);
}

TEST_CASE("probe config validation") {
  auto cfg = small_config();
  cfg.n_samples = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.bourgain.b = 0.7;
  cfg.bourgain.b_prime = 0.8;
  CHECK_THROWS_AS(probe_trilinear(cfg), ConfigError);
}

TEST_CASE("b sweep keeps b below b'") {
  auto cfg = small_config();
  cfg.n_samples = 1;
  cfg.grid_sizes = {32};
  const auto out = probe_bilinear_sweep(cfg, {0.51, 0.69});
  REQUIRE(out.size() == 2);
  CHECK(out[1].levels[0].stats.samples == 1);
}

import json
import math

import numpy as np
import pytest

import kdvk


def grid(n=128, period=2 * math.pi):
    return kdvk.GridSpec(n, period)


def test_spectral_matches_numpy_fft():
    g = grid(64, 8 * math.pi)
    rng = np.random.default_rng(1)
    u = rng.standard_normal(64)
    f = kdvk.Field.from_physical(g, u)
    assert np.allclose(f.spectral(), np.fft.fft(u) * g.dx, atol=1e-13)
    assert np.allclose(f.physical(), u, atol=1e-14)


def test_l2_norm_is_the_trapezoid_sum():
    g = grid()
    x = g.x()
    f = kdvk.Field.from_physical(g, np.sin(3 * x) + 0.5)
    expected = math.sqrt(np.sum((np.sin(3 * x) + 0.5) ** 2) * g.dx)
    assert kdvk.l2_norm(f) == pytest.approx(expected, rel=1e-13)


def test_derivative_of_a_single_mode():
    g = grid()
    x = g.x()
    f = kdvk.Field.from_physical(g, np.sin(4 * x))
    d3 = kdvk.spatial_derivative(f, 3).physical()
    assert np.allclose(d3, -64 * np.cos(4 * x), atol=1e-10)


def test_linear_propagator_rotates_a_mode():
    g = grid()
    x = g.x()
    p = kdvk.EquationParams(1.0, 1.0, 0.0, 0.0)
    k, t = 3.0, 0.37
    phi = k**5 - k**3
    assert kdvk.dispersion_symbol(k, p) == pytest.approx(phi)
    out = kdvk.linear_propagator(kdvk.Field.from_physical(g, np.cos(k * x)), t, p).physical()
    assert np.allclose(out, np.cos(k * x - phi * t), atol=1e-11)


def test_constant_damping_decays_exponentially():
    g = grid(256, 32 * math.pi)
    x = g.x()
    u0 = kdvk.Field.from_physical(g, 0.5 / np.cosh(x - 16 * math.pi))
    a = kdvk.DampingProfile.constant(g, 1.0, 1.0)
    p = kdvk.EquationParams(1.0, 1.0, 1.0, 1.0)
    times, l2, final = kdvk.evolve_l2(u0, 1.0, p, a, 0.001, record_every=100)
    assert len(times) == 11
    expected = l2[0] * np.exp(-np.asarray(times))
    assert np.allclose(l2, expected, rtol=1e-6)
    assert kdvk.l2_norm(final) == pytest.approx(l2[-1])


def test_radius_of_sech_data():
    g = grid(4096, 64 * math.pi)
    x = g.x()
    u0 = kdvk.Field.from_physical(g, 0.5 / np.cosh(x - 32 * math.pi))
    fit = kdvk.estimate_radius(u0, 2.0, 16.0)
    assert fit.sigma_hat == pytest.approx(math.pi / 2, rel=0.05)
    assert not fit.entire_beyond_window


def test_zero_field_radius_raises():
    g = grid()
    with pytest.raises(ArithmeticError):
        kdvk.estimate_radius(kdvk.Field.zeros(g), 2.0, 16.0)


def test_triangle_and_weight_probes():
    assert kdvk.probe_exponential_triangle(0.5).passed
    w = kdvk.probe_weight_inequality(1.0, 1.0)
    assert w.max_ratio <= 1.0 + 1e-12
    with pytest.raises(ValueError):
        kdvk.probe_weight_inequality(0.5, 1.0)


def test_presets_resolve():
    for name in kdvk.preset_names():
        cfg = json.loads(kdvk.preset_config_json(name))
        assert cfg["preset"] == name
    cfg = json.loads(kdvk.parse_config_json("preset = linear-decay\n[grid]\nn = 2048\n"))
    assert cfg["grid"]["n"] == 2048
    assert cfg["equation"]["mu"] == 0
    with pytest.raises(ValueError):
        kdvk.parse_config_json("[grid]\nbogus = 1\n")


def test_cli_exit_codes(tmp_path):
    assert kdvk.cli_main(["probe", "triangle", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "probe_triangle.json").read_text())
    assert report["config"]["preset"] == "default"
    bad = tmp_path / "bad.ini"
    bad.write_text("[equation]\nalpha = 0\n")
    assert kdvk.cli_main(["simulate", "--config", str(bad), "--out", str(tmp_path)]) == 1

"""Spectral propagation, gauges, parametrix phases, and field I/O."""

import numpy as np
import pytest

from sojournlab import (Bump, EvolveConfig, Field, MetricSpec, PotentialSpec,
                        euclid_kernel, field_to_csv, free_propagate, gauge,
                        load_field, parametrix_phase, phase_extraction,
                        save_field, smooth_window, split_step)


def _gaussian_field(n=1024, extent=40.0, k0=3.0):
    base = Field(dim=1, n=n, extent=extent, data=np.zeros(n, complex))
    ax = base.axis()
    return Field(dim=1, n=n, extent=extent,
                 data=np.exp(-ax**2) * np.exp(1j * k0 * ax))


def test_free_propagate_inverse():
    psi = _gaussian_field()
    back = free_propagate(free_propagate(psi, 0.7), -0.7)
    assert np.max(np.abs(back.data - psi.data)) < 1e-13
    assert back.t == pytest.approx(psi.t)


def test_free_propagate_time_stamp():
    psi = _gaussian_field()
    assert free_propagate(psi, 0.25).t == pytest.approx(0.25)


def test_gauge_inverse_and_tag():
    psi = _gaussian_field()
    g = gauge(psi, 0.8)
    assert g.gauge_alpha == pytest.approx(0.8)
    gg = gauge(g, -0.8)
    assert np.max(np.abs(gg.data - psi.data)) < 1e-14


def test_gaussian_exact_free_evolution():
    # |psi(t)|^2 of a Gaussian wave packet spreads analytically
    psi = _gaussian_field(k0=0.0)
    t = 0.5
    out = free_propagate(psi, t)
    ax = out.axis()
    # e^{-z^2} = e^{-z^2/(2 s2)} with s2 = 1/2; |psi(t)| has variance
    # (s2^2 + t^2) / s2
    s2 = 0.5
    spread = (s2**2 + t**2) / s2
    exact = np.exp(-(ax**2) / (2.0 * spread))
    exact /= np.max(exact)
    prof = np.abs(out.data) / np.max(np.abs(out.data))
    assert np.max(np.abs(prof - exact)) < 1e-10


def test_split_step_zero_potential_matches_free():
    psi = _gaussian_field()
    a = split_step(psi, PotentialSpec(), 0.4, EvolveConfig(dt=1e-3))
    b = free_propagate(psi, 0.4)
    assert np.max(np.abs(a.data - b.data)) < 1e-12


def test_split_step_norm_conservation():
    psi = _gaussian_field()
    pot = PotentialSpec(bumps=(Bump(center=(0.5,), amplitude=0.2,
                                    width=1.0, cutoff=3.0),))
    out = split_step(psi, pot, 0.2, EvolveConfig(dt=1e-3))
    assert abs(out.norm() - psi.norm()) < 1e-12


def test_euclid_kernel_matches_multiplier():
    psi = _gaussian_field()
    z = psi.axis()
    K = euclid_kernel(0.7, z[:, None], z[None, :], 1)
    quad = (K @ psi.data) * psi.h
    spectral = free_propagate(psi, 0.7).data
    sel = np.abs(z) < 10.0
    assert np.max(np.abs(quad - spectral)[sel]) < 1e-8


def test_smooth_window_profile():
    base = Field(dim=1, n=512, extent=40.0, data=np.zeros(512, complex))
    w = smooth_window(base, 5.0, 10.0)
    r = base.radius()
    assert np.all(w[r <= 5.0] == 1.0)
    assert np.all(w[r >= 10.0] == 0.0)
    assert np.all((w >= 0.0) & (w <= 1.0))


def test_fourier_field_peak_and_quadrature():
    n, extent, k0 = 1024, 40.0, 2.2
    base = Field(dim=1, n=n, extent=extent, data=np.zeros(n, complex),
                 center=(3.0,))
    x = base.axis()
    fld = Field(dim=1, n=n, extent=extent,
                data=np.exp(-((x - 3.0) / 6.0) ** 2) * np.exp(1j * k0 * x),
                center=(3.0,))
    dual = fld.fourier_field()
    k = dual.axis()
    peak = k[np.argmax(np.abs(dual.data))]
    assert abs(peak - k0) <= 2.0 * np.pi / extent
    direct = fld.h * np.sum(fld.data * np.exp(-1j * peak * x))
    assert abs(dual.data[np.argmax(np.abs(dual.data))] - direct) < 1e-10


def test_parametrix_phase_flat_value():
    spec = MetricSpec(dimension=2)
    w = np.array([1.2, -0.7])
    thetas = [np.array([1.0, 0.0]), np.array([0.6, 0.8])]
    for res in parametrix_phase(spec, w, 1.0, thetas):
        assert np.isclose(res["S"], -(w @ res["theta"]), atol=1e-8)


def test_phase_extraction_recovers_slope():
    t = 2.0
    n, extent = 2048, 100.0
    base = Field(dim=1, n=n, extent=extent, data=np.zeros(n, complex))
    x = base.axis()
    b = 0.37
    data = np.exp(1j * x**2 / (2.0 * t)) * np.exp(1j * b * np.abs(x))
    fld = Field(dim=1, n=n, extent=extent, data=data)
    for ray in phase_extraction(fld, t, 20.0, 35.0):
        assert abs(ray["slope"] - b) < 1e-3


def test_save_load_roundtrip(tmp_path):
    psi = free_propagate(_gaussian_field(), 0.3)
    shifted = Field(dim=1, n=psi.n, extent=psi.extent, data=psi.data,
                    t=psi.t, gauge_alpha=0.5, center=(-2.0,))
    target = tmp_path / "field.sjfd"
    save_field(shifted, target)
    back = load_field(target)
    assert np.array_equal(back.data, shifted.data)
    assert back.t == shifted.t
    assert back.extent == shifted.extent
    assert back.gauge_alpha == shifted.gauge_alpha
    assert tuple(back.center) == tuple(shifted.center)


def test_field_to_csv(tmp_path):
    psi = _gaussian_field(n=128)
    target = tmp_path / "field.csv"
    field_to_csv(psi, target)
    rows = np.loadtxt(target, delimiter=",", skiprows=1)
    assert rows.shape == (128, 4)
    assert np.allclose(rows[:, 0], psi.axis())
    assert np.allclose(rows[:, 1] + 1j * rows[:, 2], psi.data)


def test_field_validation():
    with pytest.raises(ValueError):
        Field(dim=1, n=16, extent=10.0, data=np.zeros(8, complex))
    with pytest.raises(ValueError):
        EvolveConfig(dt=0.0)

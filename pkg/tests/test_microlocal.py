"""Gabor detectors for WF, WF_sc, and WF_qsc on known singularities."""

import numpy as np
import pytest
from scipy.special import airy

from sojournlab import (Field, GaborConfig, detect_qscwf, detect_scwf,
                        detect_wf, qsc_resample)

N, L = 1024, 40.0
BASE = Field(dim=1, n=N, extent=L, data=np.zeros(N, complex))
Z = BASE.axis()
WF_CFG = GaborConfig(sigma_w=0.5, n_space=21, scan_radius=8.0)


def _cell(cfg):
    return 2.0 * cfg.scan_radius / (cfg.n_space - 1)


def _floor_reach(cfg):
    """Distance at which a window still sees a singularity above the
    relative noise floor."""
    return cfg.sigma_w * np.sqrt(2.0 * np.log(1.0 / cfg.floor_rel))


def test_smooth_gaussian_has_empty_wf():
    fld = Field(dim=1, n=N, extent=L, data=np.exp(-Z**2 / 2.0) + 0j)
    assert not detect_wf(fld, WF_CFG).points


def test_grid_delta_detected_at_location():
    data = np.zeros(N, complex)
    data[N // 2 + int(round(3.0 / BASE.h))] = 1.0 / BASE.h
    rep = detect_wf(Field(dim=1, n=N, extent=L, data=data), WF_CFG)
    assert rep.points
    # an isolated spike dominates the global scale, so the peak threshold
    # confines detections to windows that still see it strongly
    reach = WF_CFG.sigma_w * np.sqrt(2.0 * np.log(1.0 / WF_CFG.peak_rel))
    positions = {p["position"][0] for p in rep.points}
    directions = {p["direction"][0] for p in rep.points}
    assert max(abs(p - 3.0) for p in positions) <= reach + 0.5 * _cell(WF_CFG)
    assert min(abs(p - 3.0) for p in positions) <= _cell(WF_CFG)
    assert directions == {-1.0, 1.0}


def test_jump_singularity_located():
    data = np.where(Z > 1.0, 1.0, 0.0) * np.exp(-Z**2 / 50.0)
    cfg = GaborConfig(sigma_w=0.5, n_space=21, scan_radius=8.0,
                      floor_rel=1e-6, peak_rel=0.05)
    rep = detect_wf(Field(dim=1, n=N, extent=L, data=data + 0j), cfg)
    assert rep.points
    # with an order-one smooth plateau the localization is set by the
    # noise floor, not the peak threshold
    positions = {p["position"][0] for p in rep.points}
    assert min(abs(p - 1.0) for p in positions) <= _cell(cfg)
    assert max(abs(p - 1.0) for p in positions) \
        <= _floor_reach(cfg) + 0.5 * _cell(cfg)


def test_plane_wave_scwf_frequency():
    xi0 = 1.7
    data = np.exp(1j * xi0 * Z) * np.exp(-((Z / 9.0) ** 2))
    cfg = GaborConfig(sigma_w=0.8, n_space=81, scan_radius=4.0,
                      merge_radius=0.5)
    rep = detect_scwf(Field(dim=1, n=N, extent=L, data=data), cfg)
    assert rep.points
    for p in rep.points:
        assert abs(p["zeta"][0] - xi0) <= 3.0 * 2.0 * np.pi / L
    assert {p["zhat"][0] for p in rep.points} == {-1.0, 1.0}


def test_compact_gaussian_scwf_empty():
    cfg = GaborConfig(sigma_w=3.0, n_space=41, scan_radius=4.0)
    rep = detect_scwf(
        Field(dim=1, n=N, extent=L, data=np.exp(-((Z / 3.0) ** 2)) + 0j), cfg
    )
    assert not rep.points


def test_qsc_resample_square_root_pullback():
    n, extent = 4096, 80.0
    base = Field(dim=1, n=n, extent=extent, data=np.zeros(n, complex))
    z = base.axis()
    fld = Field(dim=1, n=n, extent=extent,
                data=np.exp(-(z**2) / 100.0) + 0j)
    st = qsc_resample(fld)
    w = st.axis()
    # outside the tapered inner region the stretched field samples u at
    # sign(w) sqrt(|w|)
    sel = (np.abs(w) > 200.0) & (np.abs(w) < 800.0)
    ref = np.exp(-np.abs(w[sel]) / 100.0)
    assert np.max(np.abs(st.data[sel] - ref) / ref) < 1e-6
    assert st.extent > extent


def test_airy_qsc_point():
    n, extent = 4096, 80.0
    base = Field(dim=1, n=n, extent=extent, data=np.zeros(n, complex))
    z = base.axis()
    data = 2.0 * np.pi * np.exp(-1j * z**2 / 2.0) * airy(z)[0]
    fld = Field(dim=1, n=n, extent=extent, data=data)
    cfg = GaborConfig(sigma_w=0.5, n_space=33, scan_radius=2.0,
                      scan_center=(0.0,), merge_radius=0.5)
    rep = detect_qscwf(fld, cfg)
    pts = [(p["zhat"][0], p["zeta"][0]) for p in rep.points]
    assert len(pts) == 1
    assert pts[0][0] == -1.0
    assert abs(pts[0][1] - 0.5) <= _cell(cfg)


def test_gabor_config_validation():
    with pytest.raises(ValueError):
        GaborConfig(sigma_w=-0.1)
    fine = Field(dim=1, n=64, extent=40.0, data=np.zeros(64, complex))
    with pytest.raises(ValueError):
        # window below four grid cells cannot be sampled faithfully
        detect_wf(fine, GaborConfig(sigma_w=0.5))


def test_wf_2d_line_singularity():
    n, extent = 256, 30.0
    base = Field(dim=2, n=n, extent=extent,
                 data=np.zeros((n, n), complex))
    g1, _ = base.grid()
    data = np.where(g1 > 0.0, 1.0, 0.0) * np.exp(-(g1**2) / 30.0)
    cfg = GaborConfig(sigma_w=1.0, n_space=7, scan_radius=3.0, n_dir=8,
                      floor_rel=1e-6, peak_rel=0.05)
    rep = detect_wf(Field(dim=2, n=n, extent=extent, data=data + 0j), cfg)
    assert rep.points
    positions = {p["position"][0] for p in rep.points}
    assert min(abs(p) for p in positions) <= _cell(cfg)
    # the jump is transverse to e1, so every codirection is +-e1
    for p in rep.points:
        assert abs(p["direction"][0]) > 0.9
        assert abs(p["position"][0]) <= _floor_reach(cfg) + 0.5 * _cell(cfg)

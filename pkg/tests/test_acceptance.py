"""Acceptance suite: ten numbered criteria, one printed verdict line each.

Each criterion test prints ``criterion N: PASS/FAIL`` (bypassing pytest
capture) followed by the measured quantity, then asserts at the stated
tolerance.
"""

import time

import numpy as np
import pytest
from scipy.optimize import brentq
from scipy.special import airy

from sojournlab import (AsymptoticModelError, Bump, EvolveConfig,
                        ExtrapolationConfig, Field, GaborConfig,
                        IntegratorConfig, MetricSpec, PhasePoint,
                        PotentialSpec, PropagationScenario, airy_exact_t1,
                        contact_check, detect_qscwf, detect_wf,
                        eikonal_residual, flow, free_propagate, gauge,
                        make_preset, propagation_check, smooth_window,
                        sojourn_forward, sojourn_long_range, split_step,
                        wf1_shift_check, wf2_check)

BUMP_METRIC = MetricSpec(
    dimension=2,
    family="compact-bump",
    bumps=(Bump(center=(0.5, 0.0), amplitude=0.3, width=1.0, cutoff=2.5),),
    r_pert=3.0,
)


def _verdict(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")


def _unit(rng, n):
    v = rng.normal(size=n)
    return v / np.linalg.norm(v)


def test_criterion_01_flat_closed_form(capsys):
    """S_f(z, zetahat) = (zetahat, -z) exactly on the flat metric."""
    rng = np.random.default_rng(11)
    t0 = time.time()
    worst = 0.0
    for dim in (2, 3):
        spec = MetricSpec(dimension=dim)
        for _ in range(100):
            z = _unit(rng, dim) * rng.uniform(0.0, 5.0)
            zh = _unit(rng, dim)
            pt = sojourn_forward(spec, z, zh)
            err = max(float(np.max(np.abs(pt.theta - zh))),
                      float(np.max(np.abs(pt.xi + z))))
            worst = max(worst, err)
    elapsed = time.time() - t0
    ok = worst <= 1e-8 and elapsed <= 30.0
    _verdict(capsys, 1, ok,
             f"max error {worst:.2e} over 200 samples, {elapsed:.1f}s")
    assert worst <= 1e-8
    assert elapsed <= 30.0


def test_criterion_02_asymptotic_model_fit(capsys):
    """Checkpoint increments of r(s) - s decay like 1/r on a bump metric."""
    rng = np.random.default_rng(23)
    good = 0
    for _ in range(100):
        ang = rng.uniform(0.0, 2.0 * np.pi)
        z = 4.0 * np.array([np.cos(ang), np.sin(ang)])
        zh = rng.uniform(-2.0, 2.0, 2) - z
        zh /= np.linalg.norm(zh)
        pt = sojourn_forward(BUMP_METRIC, z, zh)
        if 0.8 <= pt.exponent <= 1.2:
            good += 1
    ok = good >= 95
    _verdict(capsys, 2, ok, f"{good}/100 exponents in [0.8, 1.2]")
    assert good >= 95


def test_criterion_03_contact_property(capsys):
    """Pullback of the contact form is a nonvanishing multiple."""
    rng = np.random.default_rng(37)
    worst_res = 0.0
    min_f = np.inf
    for _ in range(50):
        ang = rng.uniform(0.0, 2.0 * np.pi)
        z = 4.0 * np.array([np.cos(ang), np.sin(ang)])
        zh = rng.uniform(-1.0, 1.0, 2) - z
        zh /= np.linalg.norm(zh)
        rep = contact_check(BUMP_METRIC, z, zh)
        worst_res = max(worst_res, rep["residual"])
        min_f = min(min_f, abs(rep["pullback_factor"]))
    flat = MetricSpec(dimension=2)
    worst_flat = 0.0
    for _ in range(5):
        rep = contact_check(flat, rng.uniform(-3.0, 3.0, 2), _unit(rng, 2))
        worst_flat = max(worst_flat, abs(rep["pullback_factor"] + 1.0))
    ok = worst_res <= 1e-4 and min_f >= 0.5 and worst_flat <= 1e-6
    _verdict(capsys, 3, ok,
             f"bump residual {worst_res:.2e}, min |f| {min_f:.3f}, "
             f"flat |f+1| {worst_flat:.2e}")
    assert worst_res <= 1e-4
    assert min_f >= 0.5
    assert worst_flat <= 1e-6


def test_criterion_04_long_range_subtraction(capsys):
    """The log-corrected radius removes the long-range divergence."""
    spec = MetricSpec(dimension=2, family="radial-long-range", m=1.0)
    z = np.array([1.0, 2.0])
    zh = np.array([0.6, 0.8])
    cfg1 = ExtrapolationConfig()
    cfg2 = ExtrapolationConfig(
        radii=cfg1.radii[:-1] + (2.0 * cfg1.radii[-1],)
    )
    s1 = sojourn_long_range(spec, z, zh, cfg1)
    s2 = sojourn_long_range(spec, z, zh, cfg2)
    stability = abs(s1.lam - s2.lam)

    # unsubtracted values t - r at the last two checkpoint radii
    icfg = IntegratorConfig(rtol=1e-12, atol=1e-12, s_max=45000.0,
                            r_escape=5500.0)
    path = flow(spec, PhasePoint(z, zh), icfg)
    radii_samples = np.linalg.norm(path.z, axis=1)
    raw = []
    for rk in cfg1.radii[-2:]:
        idx = np.nonzero((radii_samples[:-1] < rk)
                         & (radii_samples[1:] >= rk))[0][-1]
        sk = brentq(lambda s: path.radius_at(s) - rk,
                    path.s[idx], path.s[idx + 1])
        raw.append(sk - rk)
    drift = abs(raw[1] - raw[0])

    with pytest.raises(AsymptoticModelError):
        sojourn_long_range(spec, z, zh, cfg1, subtract_log=False)

    ok = stability <= 1e-4 and drift >= 0.3
    _verdict(capsys, 4, ok,
             f"lambda stability {stability:.2e}, raw drift {drift:.3f}")
    assert stability <= 1e-4
    assert drift >= 0.3


def test_criterion_05_eikonal_residual(capsys):
    """Half the squared distance solves the eikonal equation."""
    t0 = time.time()
    w = np.array([0.3, -0.2])
    ax = np.linspace(-2.0, 2.0, 21)
    pts = np.array([[w[0] + a, w[1] + b] for a in ax for b in ax])
    dist = np.linalg.norm(pts - w, axis=1)
    pts = pts[(dist >= 0.5) & (dist <= 2.0)]

    res_flat = eikonal_residual(MetricSpec(dimension=2), w, pts)
    flat_max = float(np.nanmax(np.abs(res_flat)))

    res_bump = eikonal_residual(BUMP_METRIC, w, pts,
                                cfg=IntegratorConfig(rtol=1e-9, atol=1e-9))
    solved = np.isfinite(res_bump)
    bump_max = float(np.nanmax(np.abs(res_bump[solved])))
    elapsed = time.time() - t0
    ok = flat_max <= 1e-8 and bump_max <= 1e-5 and elapsed <= 120.0
    _verdict(capsys, 5, ok,
             f"flat {flat_max:.2e}, bump {bump_max:.2e} on "
             f"{int(solved.sum())}/{len(pts)} points, {elapsed:.0f}s")
    assert flat_max <= 1e-8
    assert bump_max <= 1e-5
    assert elapsed <= 120.0


def test_criterion_06_airy_example(capsys):
    """Exact dispersive smoothing of the gauged Airy profile."""
    psi0 = make_preset("airy-1d")
    psi1 = free_propagate(psi0, 1.0)
    z = psi1.axis()
    sel = np.abs(z) <= 5.0
    exact = airy_exact_t1(z[sel])
    max_err = float(np.max(np.abs(psi1.data[sel] - exact) / np.abs(exact)))

    wf_cfg = GaborConfig(sigma_w=0.3, n_space=41, scan_radius=5.0,
                         scan_center=(0.0,), floor_rel=1e-6, peak_rel=0.05)
    wf = detect_wf(psi1, wf_cfg)

    qsc_cfg = GaborConfig(sigma_w=0.5, n_space=33, scan_radius=2.0,
                          scan_center=(0.0,), merge_radius=0.5)
    qsc = detect_qscwf(psi0, qsc_cfg)
    cell = 2.0 * qsc_cfg.scan_radius / (qsc_cfg.n_space - 1)
    qsc_pts = [(p["zhat"][0], p["zeta"][0]) for p in qsc.points]
    qsc_ok = (len(qsc_pts) == 1 and qsc_pts[0][0] == -1.0
              and abs(qsc_pts[0][1] - 0.5) <= cell)

    ok = max_err <= 1e-3 and not wf.points and qsc_ok
    _verdict(capsys, 6, ok,
             f"pointwise error {max_err:.2e}, {len(wf.points)} wf points, "
             f"qsc points {np.round(qsc_pts, 4).tolist()}")
    assert max_err <= 1e-3
    assert not wf.points
    assert qsc_ok


def test_criterion_07_delta_formation(capsys):
    """2D delta formation: singular exactly on the focus line at t = 1."""
    t_start = time.time()
    n, extent = 1024, 60.0
    base = Field(dim=2, n=n, extent=extent, data=np.zeros((n, n), complex))
    g1, _ = base.grid()
    psi0_data = (-2j * np.pi) ** (-0.5) * np.exp(-1j * g1**2 / 2.0)
    psi0_data = psi0_data * smooth_window(base, 20.0, 27.0)
    psi0 = Field(dim=2, n=n, extent=extent, data=psi0_data)

    cfg = GaborConfig(sigma_w=0.5, n_space=13, scan_radius=4.8, n_dir=16,
                      floor_rel=1e-6, peak_rel=0.05)
    cell = 2.0 * cfg.scan_radius / (cfg.n_space - 1)
    ang_cell = 2.0 * np.pi / cfg.n_dir

    rep1 = detect_wf(free_propagate(psi0, 1.0), cfg)
    violations = 0
    for p in rep1.points:
        d = np.asarray(p["direction"])
        ang = np.arccos(np.clip(abs(d[0]), -1.0, 1.0))
        if abs(p["position"][0]) > cell + 1e-9 or ang > ang_cell + 1e-9:
            violations += 1

    off_counts = []
    for t in (0.5, 2.0):
        off_counts.append(len(detect_wf(free_propagate(psi0, t), cfg).points))
    elapsed = time.time() - t_start

    ok = (len(rep1.points) > 0 and violations == 0
          and off_counts == [0, 0] and elapsed <= 300.0)
    _verdict(capsys, 7, ok,
             f"{len(rep1.points)} detections at t=1, {violations} off the "
             f"line, {off_counts} at t=0.5/2, {elapsed:.0f}s")
    assert len(rep1.points) > 0
    assert violations == 0
    assert off_counts == [0, 0]
    assert elapsed <= 300.0


def test_criterion_08_propagation_round_trip(capsys):
    """WF of the data matches WF_sc of the gauged evolution both ways."""
    psi0 = make_preset("chirped-gaussian")
    pot = PotentialSpec(bumps=(Bump(center=(0.0,), amplitude=0.2,
                                    width=1.0, cutoff=3.0),))
    wf_cfg = GaborConfig(sigma_w=0.4, n_space=41, scan_radius=8.0,
                         band_top_frac=0.3)
    sc_cfg = GaborConfig(sigma_w=0.4, n_space=201, scan_radius=10.0,
                         merge_radius=0.8)
    results = {}
    for t in (2.0, 0.5):
        scn = PropagationScenario(psi0=psi0, potential=pot, t0=1.0, t=t,
                                  dt=1e-3)
        results[t] = propagation_check(scn, wf_cfg, sc_cfg)
    ok = all(
        r["consistent"] and not r["unmatched_predictions"]
        and not r["unmatched_detections"] for r in results.values()
    )
    detail = ", ".join(
        f"t={t}: {len(r['predictions'])} pred / {len(r['detections'])} det, "
        f"{len(r['unmatched_predictions'])}+{len(r['unmatched_detections'])} "
        f"unmatched" for t, r in results.items()
    )
    _verdict(capsys, 8, ok, detail)
    for r in results.values():
        assert r["consistent"]
        assert not r["unmatched_predictions"]
        assert not r["unmatched_detections"]


def test_criterion_09_unitarity_group_law(capsys):
    """Norm conservation, group law, and split-step convergence order."""
    n, extent = 1024, 40.0
    base = Field(dim=1, n=n, extent=extent, data=np.zeros(n, complex))
    ax = base.axis()
    psi = Field(dim=1, n=n, extent=extent,
                data=np.exp(-ax**2) * np.exp(3j * ax))
    n0 = psi.norm()

    drift_free = abs(free_propagate(psi, 0.7).norm() - n0)
    once = free_propagate(psi, 0.7)
    twice = free_propagate(free_propagate(psi, 0.3), 0.4)
    group_err = float(np.max(np.abs(twice.data - once.data)))

    pot = PotentialSpec(bumps=(Bump(center=(0.5,), amplitude=0.2,
                                    width=1.0, cutoff=3.0),))
    drift_split = abs(split_step(psi, pot, 1.0,
                                 EvolveConfig(dt=1e-3)).norm() - n0)

    ref = split_step(psi, pot, 0.5, EvolveConfig(dt=0.5 / 512)).data
    errs = [
        float(np.max(np.abs(
            split_step(psi, pot, 0.5, EvolveConfig(dt=0.5 / k)).data - ref
        )))
        for k in (16, 32, 64)
    ]
    order = -np.polyfit(np.log([16.0, 32.0, 64.0]), np.log(errs), 1)[0]

    ok = (drift_free <= 1e-12 and group_err <= 1e-12
          and drift_split <= 1e-10 and 1.8 <= order <= 2.2)
    _verdict(capsys, 9, ok,
             f"free drift {drift_free:.1e}, group law {group_err:.1e}, "
             f"split drift {drift_split:.1e}, order {order:.3f}")
    assert drift_free <= 1e-12
    assert group_err <= 1e-12
    assert drift_split <= 1e-10
    assert 1.8 <= order <= 2.2


def test_criterion_10_wf1_wf2_properties(capsys):
    """Gauge-shift covariance of WF_qsc and smooth-implies-no-WF_sc."""
    n, extent = 4096, 80.0
    base = Field(dim=1, n=n, extent=extent, data=np.zeros(n, complex))
    z = base.axis()
    airy_data = 2.0 * np.pi * np.exp(-1j * z**2 / 2.0) * airy(z)[0]
    airy_field = Field(dim=1, n=n, extent=extent, data=airy_data)

    qsc_cfg = GaborConfig(sigma_w=0.03, n_space=81, scan_radius=2.0,
                          merge_radius=0.25)
    cell = 2.0 * qsc_cfg.scan_radius / (qsc_cfg.n_space - 1)
    wf1_ok = True
    wf1_detail = []
    for alpha in (0.5, 1.0, 2.0):
        rep = wf1_shift_check(airy_field, alpha, qsc_cfg)
        pts = [(float(p["zhat"][0]), float(p["zeta"][0]))
               for p in rep["shifted"].points]
        expected = 0.5 * (1.0 + alpha)
        hit = (rep["consistent"] and len(pts) == 1 and pts[0][0] == -1.0
               and abs(pts[0][1] - expected) <= cell)
        wf1_ok = wf1_ok and hit
        wf1_detail.append(
            f"alpha={alpha}: {[(a, round(b, 4)) for a, b in pts]}"
        )

    sc_cfg = GaborConfig(sigma_w=0.5, n_space=49, scan_radius=3.0,
                         scan_center=(0.0,), floor_rel=1e-6, peak_rel=0.05,
                         merge_radius=0.5)
    scenarios = {
        "airy": (airy_field,
                 GaborConfig(sigma_w=0.5, n_space=41, scan_radius=2.0,
                             merge_radius=0.25)),
        "plane-wave": (make_preset("plane-wave"), sc_cfg),
        "gaussian": (make_preset("gaussian"),
                     GaborConfig(sigma_w=0.7, n_space=33, scan_radius=3.0,
                                 scan_center=(0.0,))),
    }
    chirp = make_preset("chirped-gaussian")
    chirp_cfg = GaborConfig(sigma_w=0.5, n_space=81, scan_radius=6.0,
                            scan_center=(0.0,), floor_rel=1e-6,
                            peak_rel=0.05, merge_radius=0.5)
    scenarios["chirp"] = (chirp, chirp_cfg)
    pot = PotentialSpec(bumps=(Bump(center=(0.0,), amplitude=0.2,
                                    width=1.0, cutoff=3.0),))
    evolved = split_step(chirp, pot, 2.0, EvolveConfig(dt=1e-3))
    scenarios["gauged-chirp"] = (gauge(evolved, 1.0), chirp_cfg)

    wf2_fail = [name for name, (fld, cfg) in scenarios.items()
                if not wf2_check(fld, cfg)["consistent"]]

    ok = wf1_ok and not wf2_fail
    _verdict(capsys, 10, ok,
             f"wf1 {'; '.join(wf1_detail)}; wf2 counterexamples: "
             f"{wf2_fail or 'none'}")
    assert wf1_ok
    assert not wf2_fail

"""Geodesic flow, variational data, distances, and the eikonal residual."""

import numpy as np
import pytest

from sojournlab import (Bump, IntegratorConfig, MetricSpec,
                        OutsideShootingDomainError, PhasePoint,
                        eikonal_residual, flow, geodesic_distance,
                        nontrapping_check, unit_speed, variational_flow)
from sojournlab.flow import _CS_STEP, hamilton_rhs, rhs_jacobian

BUMP_METRIC = MetricSpec(
    dimension=2,
    family="compact-bump",
    bumps=(Bump(center=(0.5, 0.0), amplitude=0.3, width=1.0, cutoff=2.5),),
    r_pert=3.0,
)
CFG = IntegratorConfig()


def test_flat_geodesics_are_straight():
    spec = MetricSpec(dimension=2)
    start = PhasePoint(z=np.array([1.0, -2.0]), zeta=np.array([0.6, 0.8]))
    path = flow(spec, start, CFG)
    for s in (0.5, 3.0, 10.0):
        z, zeta = path.state_at(s)
        assert np.allclose(z, start.z + s * start.zeta, atol=1e-10)
        assert np.allclose(zeta, start.zeta, atol=1e-12)


def test_unit_speed_normalization():
    zeta = unit_speed(BUMP_METRIC, np.array([0.5, 0.2]), np.array([3.0, 4.0]))
    from sojournlab import hamiltonian
    assert np.isclose(hamiltonian(BUMP_METRIC, np.array([0.5, 0.2]), zeta),
                      0.5, atol=1e-14)
    with pytest.raises(ValueError):
        unit_speed(BUMP_METRIC, np.zeros(2), np.zeros(2))


def test_energy_conservation_through_bump():
    start = PhasePoint(z=np.array([-4.0, 0.3]), zeta=np.array([1.0, 0.0]))
    cfg = IntegratorConfig(s_max=100.0, r_escape=10.0)
    path = flow(BUMP_METRIC, start, cfg)
    assert path.energy_drift.max() < 1e-10
    assert path.terminated_by == "escape"


def test_rhs_jacobian_matches_complex_step():
    rng = np.random.default_rng(2)
    specs = [MetricSpec(dimension=2), BUMP_METRIC,
             MetricSpec(dimension=3, family="compact-bump",
                        bumps=(Bump((0.2, -0.1, 0.4), 0.25, 0.8, 2.0),),
                        r_pert=3.0)]
    for spec in specs:
        for _ in range(5):
            y = rng.uniform(-1.5, 1.5, 2 * spec.dimension)
            A = rhs_jacobian(spec, y)
            m = y.size
            ref = np.empty((m, m))
            yc = y.astype(complex)
            for j in range(m):
                yj = yc.copy()
                yj[j] += 1j * _CS_STEP
                ref[:, j] = np.imag(hamilton_rhs(spec, yj)) / _CS_STEP
            assert np.allclose(A, ref, atol=1e-12)


def test_variational_jacobian_matches_fd():
    start = PhasePoint(z=np.array([-4.0, 0.4]), zeta=np.array([1.0, 0.05]))
    path = variational_flow(BUMP_METRIC, start, CFG, normalize=False)
    s_probe = 5.0
    J = path.jacobian_at(s_probe)
    h = 1e-6
    for j in range(4):
        dy = np.zeros(4)
        dy[j] = h
        plus = flow(BUMP_METRIC,
                    PhasePoint(start.z + dy[:2], start.zeta + dy[2:]),
                    CFG, normalize=False)
        minus = flow(BUMP_METRIC,
                     PhasePoint(start.z - dy[:2], start.zeta - dy[2:]),
                     CFG, normalize=False)
        zp, zetap = plus.state_at(s_probe)
        zm, zetam = minus.state_at(s_probe)
        fd = np.concatenate([zp - zm, zetap - zetam]) / (2.0 * h)
        assert np.allclose(J[:, j], fd, atol=1e-5)


def test_nontrapping_check_certifies_bump_samples():
    rng = np.random.default_rng(4)
    samples = []
    for _ in range(10):
        z = rng.normal(size=2)
        z = z / np.linalg.norm(z) * rng.uniform(4.0, 6.0)
        zeta = rng.normal(size=2)
        samples.append(PhasePoint(z=z, zeta=zeta / np.linalg.norm(zeta)))
    report = nontrapping_check(BUMP_METRIC, samples, CFG)
    assert len(report["certified_escaped"]) == len(samples)
    assert not report["undecided"]


def test_geodesic_distance_flat_and_symmetry():
    flat = MetricSpec(dimension=2)
    w = np.array([1.0, 2.0])
    z = np.array([-1.5, 0.5])
    assert np.isclose(geodesic_distance(flat, w, z), np.linalg.norm(z - w))
    dwz = geodesic_distance(BUMP_METRIC, w, z)
    dzw = geodesic_distance(BUMP_METRIC, z, w)
    assert np.isclose(dwz, dzw, atol=1e-8)
    # the bump is positive, so the metric is longer than Euclidean here
    assert dwz >= np.linalg.norm(z - w) - 1e-9


def test_geodesic_distance_coincident():
    assert geodesic_distance(BUMP_METRIC, np.ones(2), np.ones(2)) == 0.0


def test_eikonal_residual_flat_small():
    spec = MetricSpec(dimension=2)
    w = np.array([0.1, 0.4])
    grid = np.array([[1.0, 0.4], [0.1, -1.2], [0.8, 1.1]])
    res = eikonal_residual(spec, w, grid)
    assert np.max(np.abs(res)) < 1e-9

"""Hamiltonian geodesic flow, variational flow, nontrapping certification,
geodesic distance by shooting, and the eikonal residual check.

The flow is integrated with an adaptive high-order Runge-Kutta scheme
(scipy's DOP853) with dense output.  The variational (derivative) flow is
integrated simultaneously as one combined system; the local Jacobian of the
Hamiltonian vector field is obtained by complex-step differentiation of the
analytic right-hand side, which is accurate to machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .geometry import (
    MetricSpec,
    hamiltonian,
    metric_derivative,
    metric_inverse,
    metric_tensor,
)

__all__ = [
    "PhasePoint",
    "IntegratorConfig",
    "GeodesicPath",
    "IntegrationError",
    "AccuracyError",
    "OutsideShootingDomainError",
    "unit_speed",
    "flow",
    "variational_flow",
    "nontrapping_check",
    "geodesic_distance",
    "eikonal_residual",
]

_CS_STEP = 1e-30  # complex-step size; error is O(step^2), far below roundoff


class IntegrationError(RuntimeError):
    """The adaptive integrator failed (step-size underflow etc.)."""


class AccuracyError(RuntimeError):
    """Energy drift exceeded ten times the configured tolerance."""


class OutsideShootingDomainError(RuntimeError):
    """Geodesic shooting failed to converge or found ambiguous solutions."""


@dataclass(frozen=True)
class PhasePoint:
    """Point (z, zeta) of the cotangent bundle."""

    z: np.ndarray
    zeta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "z", np.asarray(self.z, dtype=float))
        object.__setattr__(self, "zeta", np.asarray(self.zeta, dtype=float))


@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = 1e-12
    atol: float = 1e-12
    s_max: float = 100.0
    r_escape: float = 50.0
    max_steps: int = 100_000
    tol_energy: float = 1e-9

    def __post_init__(self):
        if self.rtol <= 0 or self.atol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass
class GeodesicPath:
    """Sampled geodesic with dense-output interpolation.

    ``J`` (when present) is the derivative of the flow map with respect to
    the initial phase-space state, a (2n, 2n) matrix per sample.
    """

    spec: MetricSpec
    s: np.ndarray
    z: np.ndarray
    zeta: np.ndarray
    J: np.ndarray | None
    energy_drift: np.ndarray
    terminated_by: str  # "escape" or "s_max"
    _sol: object = field(repr=False, default=None)

    @property
    def n(self):
        return self.spec.dimension

    def state_at(self, s):
        """Dense-output phase state (z, zeta) at arclength s."""
        y = self._sol(s)
        n = self.n
        return y[:n], y[n : 2 * n]

    def jacobian_at(self, s):
        if self.J is None:
            raise ValueError("path was integrated without variational data")
        n = self.n
        return self._sol(s)[2 * n :].reshape(2 * n, 2 * n)

    def radius_at(self, s):
        z, _ = self.state_at(s)
        return float(np.linalg.norm(z))

    @property
    def s_end(self):
        return float(self.s[-1])


def unit_speed(spec, z, zeta):
    """Rescale zeta so that 2 h(z, zeta) = 1 (unit-speed geodesic)."""
    zeta = np.asarray(zeta, dtype=float)
    h = hamiltonian(spec, np.asarray(z, dtype=float), zeta)
    if h <= 0:
        raise ValueError("cannot normalize a null covector")
    return zeta / np.sqrt(2.0 * h)


def hamilton_rhs(spec, y):
    """Right-hand side of Hamilton's equations for h = g^{ij} z_i z_j / 2.

    Accepts complex phase-space vectors (complex-step safe).
    """
    n = spec.dimension
    z, zeta = y[:n], y[n:]
    if spec.family == "flat":
        return np.concatenate([zeta, np.zeros_like(zeta)])
    if spec.family == "compact-bump":
        # conformal metric exp(2 phi) I: h = exp(-2 phi) |zeta|^2 / 2,
        # so zdot = exp(-2 phi) zeta and zetadot_k = d_k phi exp(-2 phi)
        # |zeta|^2 with the holomorphic square zeta . zeta
        phi = 0.0
        grad = np.zeros_like(z)
        for b in spec.bumps:
            v, gv = b.value_and_gradient(z)
            phi = phi + v
            grad = grad + gv
        e2 = np.exp(-2.0 * phi)
        zdot = e2 * zeta
        zetadot = grad * (e2 * (zeta @ zeta))
        return np.concatenate([zdot, zetadot])
    ginv = metric_inverse(spec, z)
    zdot = ginv @ zeta
    dg = metric_derivative(spec, z)
    # d/dz_k h = -1/2 zeta^T G (d_k g) G zeta; zetadot = -dh/dz
    w = zdot  # G zeta
    zetadot = 0.5 * np.einsum("i,kij,j->k", w, dg, w)
    return np.concatenate([zdot, zetadot])


def rhs_jacobian(spec, y):
    """Jacobian of hamilton_rhs at y.

    Closed form for the flat and conformal families, complex-step
    differentiation otherwise.
    """
    n = spec.dimension
    if spec.family == "flat":
        A = np.zeros((2 * n, 2 * n))
        A[:n, n:] = np.eye(n)
        return A
    if spec.family == "compact-bump":
        z, zeta = y[:n], y[n:]
        phi = 0.0
        grad = np.zeros(n)
        hess = np.zeros((n, n))
        for b in spec.bumps:
            v, gv, hv = b.value_gradient_hessian(z)
            phi = phi + v
            grad = grad + gv
            hess = hess + hv
        e2 = np.exp(-2.0 * phi)
        q = zeta @ zeta
        A = np.empty((2 * n, 2 * n))
        A[:n, :n] = -2.0 * e2 * np.outer(zeta, grad)
        A[:n, n:] = e2 * np.eye(n)
        A[n:, :n] = e2 * q * (hess - 2.0 * np.outer(grad, grad))
        A[n:, n:] = 2.0 * e2 * np.outer(grad, zeta)
        return A
    m = y.size
    A = np.empty((m, m))
    yc = y.astype(complex)
    for j in range(m):
        yj = yc.copy()
        yj[j] += 1j * _CS_STEP
        A[:, j] = np.imag(hamilton_rhs(spec, yj)) / _CS_STEP
    return A


def _integrate(spec, start, cfg, with_jacobian, s_span=None, normalize=True):
    n = spec.dimension
    z0 = np.asarray(start.z, dtype=float)
    zeta0 = np.asarray(start.zeta, dtype=float)
    if normalize:
        zeta0 = unit_speed(spec, z0, zeta0)
    h0 = hamiltonian(spec, z0, zeta0)
    y0 = np.concatenate([z0, zeta0])
    if with_jacobian:
        y0 = np.concatenate([y0, np.eye(2 * n).ravel()])

    def fun(s, y):
        base = y[: 2 * n]
        f = hamilton_rhs(spec, base)
        if not with_jacobian:
            return f
        A = rhs_jacobian(spec, base)
        J = y[2 * n :].reshape(2 * n, 2 * n)
        return np.concatenate([f, (A @ J).ravel()])

    def escape(s, y):
        return float(np.linalg.norm(y[:n])) - 2.0 * cfg.r_escape

    escape.terminal = True
    escape.direction = 1.0

    span = (0.0, cfg.s_max) if s_span is None else s_span
    sol = solve_ivp(
        fun,
        span,
        y0,
        method="DOP853",
        rtol=cfg.rtol,
        atol=cfg.atol,
        dense_output=True,
        events=escape,
    )
    if sol.status == -1:
        raise IntegrationError(f"integration failed: {sol.message}")
    terminated_by = "escape" if sol.status == 1 else "s_max"

    svals = sol.t
    zs = sol.y[:n].T
    zetas = sol.y[n : 2 * n].T
    J = None
    if with_jacobian:
        J = sol.y[2 * n :].T.reshape(-1, 2 * n, 2 * n)
    energy = np.array(
        [hamiltonian(spec, zs[i], zetas[i]) for i in range(len(svals))]
    )
    drift = np.abs(2.0 * energy - 2.0 * h0)
    if drift.max(initial=0.0) > 10.0 * cfg.tol_energy:
        raise AccuracyError(
            f"energy drift {drift.max():.3e} exceeds 10 x tol_energy"
        )
    return GeodesicPath(
        spec=spec,
        s=svals,
        z=zs,
        zeta=zetas,
        J=J,
        energy_drift=drift,
        terminated_by=terminated_by,
        _sol=sol.sol,
    )


def flow(spec, start, cfg, normalize=True):
    """Integrate the unit-speed geodesic flow from ``start``.

    ``normalize=False`` integrates the raw Hamiltonian system without
    rescaling the initial covector (used by derivative oracles).
    """
    return _integrate(spec, start, cfg, with_jacobian=False,
                      normalize=normalize)


def variational_flow(spec, start, cfg, normalize=True):
    """Geodesic flow together with its derivative (variational) flow."""
    return _integrate(spec, start, cfg, with_jacobian=True,
                      normalize=normalize)


def nontrapping_check(spec, samples, cfg):
    """Classify each sample as certified-escaped or undecided.

    A sample escapes when the trajectory leaves radius ``r_escape`` with
    radially outward momentum before exhausting the arclength budget.
    Trapping is never claimed; only failure to certify escape.
    """
    report = {"certified_escaped": [], "undecided": []}
    for idx, start in enumerate(samples):
        entry = {"index": idx, "z": list(map(float, start.z)),
                 "zeta": list(map(float, start.zeta))}
        if cfg.s_max <= 0:
            report["undecided"].append(entry)
            continue
        try:
            path = flow(spec, start, cfg)
        except (IntegrationError, AccuracyError) as exc:
            entry["reason"] = str(exc)
            report["undecided"].append(entry)
            continue
        z_end, zeta_end = path.state_at(path.s_end)
        r_end = float(np.linalg.norm(z_end))
        zdot = metric_inverse(spec, z_end) @ zeta_end
        outward = float(z_end @ zdot) > 0.0
        if r_end > cfg.r_escape and outward:
            entry["escape_arclength"] = path.s_end
            report["certified_escaped"].append(entry)
        else:
            entry["reason"] = "arclength budget exhausted"
            report["undecided"].append(entry)
    return report


def _tangent_basis(spec, z, zeta):
    """Orthonormal basis of {v : zeta^T G(z) v = 0} (unit-energy tangent)."""
    n = zeta.size
    ginv = metric_inverse(spec, z)
    normal = ginv @ zeta
    normal = normal / np.linalg.norm(normal)
    basis = []
    for k in range(n):
        v = np.zeros(n)
        v[k] = 1.0
        v = v - (v @ normal) * normal
        for b in basis:
            v = v - (v @ b) * b
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            basis.append(v / nv)
        if len(basis) == n - 1:
            break
    return basis


def _shoot(spec, w, z_target, cfg, zeta_guess=None, s_guess=None,
           tol=1e-11, max_iter=40):
    """Damped Newton shooting: find (zeta0, s) with geodesic w -> z_target.

    Returns (distance, zeta0, path).  Raises OutsideShootingDomainError on
    non-convergence.
    """
    n = spec.dimension
    w = np.asarray(w, dtype=float)
    z_target = np.asarray(z_target, dtype=float)
    gap = z_target - w
    dist0 = float(np.linalg.norm(gap))
    if dist0 == 0.0:
        return 0.0, np.zeros(n), None
    if zeta_guess is None:
        zeta_guess = metric_tensor(spec, w) @ (gap / dist0)
    zeta = unit_speed(spec, w, zeta_guess)
    s = float(s_guess) if s_guess is not None else dist0
    scale = max(dist0, 1.0)

    prev_res = np.inf
    for _ in range(max_iter):
        run_cfg = IntegratorConfig(
            rtol=cfg.rtol, atol=cfg.atol, s_max=max(2.0 * s, 1e-6),
            r_escape=cfg.r_escape, tol_energy=cfg.tol_energy,
        )
        path = _integrate(spec, PhasePoint(w, zeta), run_cfg,
                          with_jacobian=True)
        s = min(s, path.s_end)
        z_s, zeta_s = path.state_at(s)
        resid = z_s - z_target
        rnorm = float(np.linalg.norm(resid))
        if rnorm < tol * scale:
            return s, zeta, path
        J = path.jacobian_at(s)
        dz_dzeta0 = J[:n, n:]
        basis = _tangent_basis(spec, w, zeta)
        zdot = metric_inverse(spec, z_s) @ zeta_s
        cols = [dz_dzeta0 @ b for b in basis] + [zdot]
        M = np.column_stack(cols)
        try:
            step = np.linalg.solve(M, -resid)
        except np.linalg.LinAlgError:
            raise OutsideShootingDomainError("singular shooting Jacobian")
        # damped update: halve until the residual decreases
        lam = 1.0
        for _damp in range(12):
            zeta_new = zeta + lam * sum(
                step[i] * basis[i] for i in range(len(basis))
            )
            zeta_new = unit_speed(spec, w, zeta_new)
            s_new = s + lam * step[-1]
            if s_new <= 0:
                lam *= 0.5
                continue
            if lam == 1.0 and rnorm < 0.5 * prev_res:
                break  # full step while converging quadratically
            try:
                probe = _integrate(
                    spec, PhasePoint(w, zeta_new),
                    IntegratorConfig(
                        rtol=cfg.rtol, atol=cfg.atol,
                        s_max=max(2.0 * s_new, 1e-6),
                        r_escape=cfg.r_escape, tol_energy=cfg.tol_energy,
                    ),
                    with_jacobian=False,
                )
                z_probe, _ = probe.state_at(min(s_new, probe.s_end))
            except (IntegrationError, AccuracyError):
                lam *= 0.5
                continue
            if np.linalg.norm(z_probe - z_target) < rnorm:
                break
            lam *= 0.5
        else:
            raise OutsideShootingDomainError("damped Newton stalled")
        zeta = unit_speed(spec, w, zeta + lam * sum(
            step[i] * basis[i] for i in range(len(basis))
        ))
        s = max(s + lam * step[-1], 1e-8)
        prev_res = rnorm
    raise OutsideShootingDomainError("shooting did not converge")


def geodesic_distance(spec, w, z, cfg=None, multi_start=True,
                      warm_start=None):
    """Geodesic distance d_g(w, z) by multi-start Newton shooting.

    Declares "outside shooting domain" when distinct converged solutions
    disagree by more than 1e-6 (injectivity-radius detection).
    ``warm_start`` may carry (zeta0, s) from a nearby solve.
    """
    if cfg is None:
        cfg = IntegratorConfig()
    w = np.asarray(w, dtype=float)
    z = np.asarray(z, dtype=float)
    gap = np.linalg.norm(z - w)
    if gap == 0.0:
        return 0.0
    if spec.family == "flat":
        return float(gap)

    n = spec.dimension
    solutions = []
    guesses = []
    if warm_start is not None:
        guesses.append(warm_start)
    guesses.append((None, None))
    if multi_start:
        base = metric_tensor(spec, w) @ ((z - w) / gap)
        basis = _tangent_basis(spec, w, unit_speed(spec, w, base))
        for b in basis:
            for sign in (+1.0, -1.0):
                guesses.append((base + sign * 0.1 * b, gap))
    last_err = None
    for zeta_guess, s_guess in guesses:
        try:
            s, zeta0, _ = _shoot(spec, w, z, cfg, zeta_guess, s_guess)
            solutions.append((s, zeta0))
        except OutsideShootingDomainError as exc:
            last_err = exc
    if not solutions:
        raise OutsideShootingDomainError(
            f"no shooting solution from {w} to {z}: {last_err}"
        )
    dists = np.array([s for s, _ in solutions])
    if dists.max() - dists.min() > 1e-6:
        raise OutsideShootingDomainError(
            "distinct geodesics found; outside injectivity radius"
        )
    return float(dists.min())


def eikonal_residual(spec, w, grid, cfg=None, h_fd=1e-4):
    """Residual Phi - (1/2)|grad Phi|_g^2 with Phi = d_g(w, z)^2 / 2.

    The gradient is taken by central finite differences of d_g and measured
    in the metric g.  Failed shooting solves are returned as NaN cells.
    """
    if cfg is None:
        cfg = IntegratorConfig()
    w = np.asarray(w, dtype=float)
    grid = np.asarray(grid, dtype=float)
    n = spec.dimension
    out = np.empty(len(grid))
    warm = None
    for i, z in enumerate(grid):
        try:
            d0, warm = _distance_with_warm(spec, w, z, cfg, warm)
            phi0 = 0.5 * d0**2
            grad = np.zeros(n)
            for k in range(n):
                e = np.zeros(n)
                e[k] = h_fd
                dp, _ = _distance_with_warm(spec, w, z + e, cfg, warm)
                dm, _ = _distance_with_warm(spec, w, z - e, cfg, warm)
                grad[k] = (0.5 * dp**2 - 0.5 * dm**2) / (2.0 * h_fd)
            ginv = metric_inverse(spec, z)
            out[i] = phi0 - 0.5 * grad @ ginv @ grad
        except OutsideShootingDomainError:
            out[i] = np.nan
    return out


def _distance_with_warm(spec, w, z, cfg, warm):
    """Distance plus (zeta0, s) warm-start data for neighboring solves."""
    if spec.family == "flat":
        return float(np.linalg.norm(np.asarray(z) - w)), None
    gap = float(np.linalg.norm(np.asarray(z) - w))
    if gap == 0.0:
        return 0.0, warm
    zeta_guess, s_guess = warm if warm is not None else (None, None)
    try:
        s, zeta0, _ = _shoot(spec, w, z, cfg, zeta_guess, s_guess)
    except OutsideShootingDomainError:
        s = geodesic_distance(spec, w, z, cfg, warm_start=warm)
        return s, None
    return s, (zeta0, s)

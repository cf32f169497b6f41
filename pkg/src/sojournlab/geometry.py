"""Metric and potential families on R^n with controlled asymptotics.

Three metric families are supported:

* ``flat``            -- the Euclidean metric, any dimension.
* ``radial-long-range`` -- g = I + (m/r) dr^2 + kappa(theta)/r^2 (angular),
  realized in Cartesian coordinates through the radial projector.
* ``compact-bump``    -- a conformal metric exp(2*phi) I where phi is a sum
  of truncated Gaussian bumps, identically zero beyond each bump's cutoff
  radius, so the metric is *exactly* Euclidean outside ``r_pert``.

All evaluation functions accept complex-valued points so that derivatives
of derived quantities can be obtained by complex-step differentiation.
First derivatives of the metric are coded analytically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Bump",
    "MetricSpec",
    "PotentialSpec",
    "GeometryDomainError",
    "metric_tensor",
    "metric_inverse",
    "metric_derivative",
    "christoffel",
    "potential_value",
    "hamiltonian",
]


class GeometryDomainError(ValueError):
    """Evaluation requested outside the valid domain of a spec."""


@dataclass(frozen=True)
class Bump:
    """Truncated Gaussian profile: amplitude * exp(-s^2/2w^2) * cutoff.

    The cutoff factor is exp(1 - 1/(1 - (s/cutoff)^2)) for s < cutoff and
    exactly zero beyond, so the profile is smooth and compactly supported.
    """

    center: tuple
    amplitude: float
    width: float
    cutoff: float

    def __post_init__(self):
        if self.width <= 0 or self.cutoff <= 0:
            raise ValueError("bump width and cutoff must be positive")

    def value(self, z):
        d = np.asarray(z) - np.asarray(self.center)
        s2 = d @ d
        return self.amplitude * np.exp(-s2 / (2.0 * self.width**2)) * _cutoff(
            s2, self.cutoff
        )

    def gradient(self, z):
        return self.value_and_gradient(z)[1]

    def value_and_gradient(self, z):
        """Profile value and gradient in one evaluation (complex-step safe)."""
        d = np.asarray(z) - np.asarray(self.center)
        s2 = d @ d
        g = np.exp(-s2 / (2.0 * self.width**2))
        chi, dchi = _cutoff_with_derivative(s2, self.cutoff)
        # d/ds2 of the profile, then chain rule with ds2/dz = 2 d.
        dprof = self.amplitude * (g * (-0.5 / self.width**2) * chi + g * dchi)
        return self.amplitude * g * chi, 2.0 * dprof * d

    def value_gradient_hessian(self, z):
        """Value, gradient and Hessian of the profile at z."""
        d = np.asarray(z) - np.asarray(self.center)
        s2 = d @ d
        a = -0.5 / self.width**2
        g = np.exp(a * s2)
        chi, dchi, d2chi = _cutoff_two_derivatives(s2, self.cutoff)
        p = self.amplitude * g * chi
        # derivatives of the profile in the scalar variable s2
        dp = self.amplitude * g * (a * chi + dchi)
        d2p = self.amplitude * g * (a * a * chi + 2.0 * a * dchi + d2chi)
        n = d.size
        hess = 2.0 * dp * np.eye(n) + 4.0 * d2p * np.outer(d, d)
        return p, 2.0 * dp * d, hess


def _cutoff(s2, rho):
    """Smooth compactly supported cutoff as a function of s^2."""
    q = s2 / rho**2
    if np.real(q) >= 1.0:
        return 0.0 * q
    return np.exp(1.0 - 1.0 / (1.0 - q))


def _cutoff_with_derivative(s2, rho):
    q = s2 / rho**2
    if np.real(q) >= 1.0:
        return 0.0 * q, 0.0 * q
    chi = np.exp(1.0 - 1.0 / (1.0 - q))
    # d chi / d s2 = chi * (-1/(1-q)^2) / rho^2
    return chi, -chi / ((1.0 - q) ** 2 * rho**2)


def _cutoff_two_derivatives(s2, rho):
    """Cutoff with first and second derivatives in the variable s^2."""
    q = s2 / rho**2
    if np.real(q) >= 1.0:
        return 0.0 * q, 0.0 * q, 0.0 * q
    one = 1.0 - q
    chi = np.exp(1.0 - 1.0 / one)
    dchi = -chi / (one**2 * rho**2)
    d2chi = chi * (one**-4 - 2.0 * one**-3) / rho**4
    return chi, dchi, d2chi


_FAMILIES = ("flat", "radial-long-range", "compact-bump")


@dataclass(frozen=True)
class MetricSpec:
    """Parameters of one asymptotically Euclidean metric."""

    dimension: int
    family: str = "flat"
    m: float = 0.0
    fourier_cos: tuple = ()  # kappa(theta) Fourier coefficients, 2D only
    fourier_sin: tuple = ()
    kappa0: float = 0.0
    bumps: tuple = ()
    r_pert: float = 0.0

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown metric family {self.family!r}")
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if self.family == "compact-bump":
            if not self.bumps:
                raise ValueError("compact-bump family needs at least one bump")
            reach = max(
                float(np.linalg.norm(b.center)) + b.cutoff for b in self.bumps
            )
            if self.r_pert <= 0:
                object.__setattr__(self, "r_pert", reach)
            elif reach > self.r_pert + 1e-12:
                raise ValueError("bump support extends beyond r_pert")
        if self.family == "radial-long-range":
            if self.dimension == 1:
                raise ValueError("radial family needs dimension >= 2")
            if self.dimension > 2 and (self.fourier_cos or self.fourier_sin):
                raise ValueError(
                    "angular Fourier perturbation only supported in 2D"
                )

    @property
    def short_range(self):
        return self.m == 0.0

    def conformal_exponent(self, z):
        """Sum of bump profiles; only meaningful for compact-bump."""
        phi = 0.0
        for b in self.bumps:
            phi = phi + b.value(z)
        return phi


@dataclass(frozen=True)
class PotentialSpec:
    """V = c/r + compactly supported smooth short-range part."""

    c: float = 0.0
    bumps: tuple = ()

    @property
    def short_range(self):
        return self.c == 0.0


def _kappa_terms(spec, u):
    """Angular perturbation kappa(theta) and its theta-derivative.

    Evaluated from the unit vector u = z/r via angle-addition recurrences
    (cos/sin of multiples of theta as polynomials in u), so the evaluation
    is holomorphic in z and complex-step safe.
    """
    if spec.dimension != 2:
        z = 0.0 * u[0]
        return spec.kappa0 + z, z
    c1, s1 = u[0], u[1]
    k = spec.kappa0 + 0.0 * c1
    dk = 0.0 * c1
    cp, sp = 1.0 + 0.0 * c1, 0.0 * c1  # p = 0
    order = max(len(spec.fourier_cos), len(spec.fourier_sin))
    for p in range(1, order + 1):
        cp, sp = cp * c1 - sp * s1, sp * c1 + cp * s1
        a = spec.fourier_cos[p - 1] if p <= len(spec.fourier_cos) else 0.0
        b = spec.fourier_sin[p - 1] if p <= len(spec.fourier_sin) else 0.0
        k = k + a * cp + b * sp
        dk = dk + p * (-a * sp + b * cp)
    return k, dk


def _radius(spec, z):
    z = np.asarray(z)
    r = np.sqrt(z @ z)
    if np.real(r) <= 0.0:
        raise GeometryDomainError(
            f"{spec.family} family is singular at the origin"
        )
    return r


def metric_tensor(spec, z):
    """Covariant metric g_ij at z as an (n, n) array."""
    n = spec.dimension
    z = np.asarray(z)
    eye = np.eye(n, dtype=z.dtype if np.iscomplexobj(z) else float)
    if spec.family == "flat":
        return eye
    if spec.family == "compact-bump":
        phi = spec.conformal_exponent(z)
        return np.exp(2.0 * phi) * eye
    r = _radius(spec, z)
    u = z / r
    proj = np.outer(u, u)
    k, _ = _kappa_terms(spec, u)
    return eye + (spec.m / r) * proj + (k / r**2) * (eye - proj)


def metric_inverse(spec, z):
    """Contravariant metric g^ij at z, in closed form."""
    n = spec.dimension
    z = np.asarray(z)
    eye = np.eye(n, dtype=z.dtype if np.iscomplexobj(z) else float)
    if spec.family == "flat":
        return eye
    if spec.family == "compact-bump":
        phi = spec.conformal_exponent(z)
        return np.exp(-2.0 * phi) * eye
    r = _radius(spec, z)
    u = z / r
    proj = np.outer(u, u)
    k, _ = _kappa_terms(spec, u)
    # g = (1 + m/r) P + (1 + k/r^2) Q with P, Q orthogonal projectors.
    return proj / (1.0 + spec.m / r) + (eye - proj) / (1.0 + k / r**2)


def metric_derivative(spec, z):
    """Analytic first derivative dg[k, i, j] = d g_ij / d z^k."""
    n = spec.dimension
    z = np.asarray(z)
    dtype = complex if np.iscomplexobj(z) else float
    dg = np.zeros((n, n, n), dtype=dtype)
    if spec.family == "flat":
        return dg
    if spec.family == "compact-bump":
        phi = spec.conformal_exponent(z)
        grad = np.zeros(n, dtype=dtype)
        for b in spec.bumps:
            grad = grad + b.gradient(z)
        factor = 2.0 * np.exp(2.0 * phi)
        for k in range(n):
            dg[k] = factor * grad[k] * np.eye(n)
        return dg
    r = _radius(spec, z)
    u = z / r
    eye = np.eye(n)
    proj = np.outer(u, u)
    q = eye - proj
    kappa, dkappa = _kappa_terms(spec, u)
    # dP[k,i,j] = (Q_ik u_j + u_i Q_jk) / r
    dproj = np.empty((n, n, n), dtype=dtype)
    for k in range(n):
        dproj[k] = (np.outer(q[:, k], u) + np.outer(u, q[:, k])) / r
    if spec.dimension == 2:
        eperp = np.array([-u[1], u[0]])
        dtheta = eperp / r
    else:
        dtheta = np.zeros(n, dtype=dtype)
    for k in range(n):
        d_m_over_r = -spec.m * u[k] / r**2
        d_k_over_r2 = dkappa * dtheta[k] / r**2 - 2.0 * kappa * u[k] / r**3
        dg[k] = (
            d_m_over_r * proj
            + (spec.m / r) * dproj[k]
            + d_k_over_r2 * q
            - (kappa / r**2) * dproj[k]
        )
    return dg


def christoffel(spec, z):
    """Christoffel symbols Gamma^i_{jk} of the metric at z."""
    n = spec.dimension
    if spec.family == "flat":
        return np.zeros((n, n, n))
    ginv = metric_inverse(spec, z)
    dg = metric_derivative(spec, z)
    # Gamma^i_jk = 1/2 g^il (d_j g_lk + d_k g_lj - d_l g_jk);
    # T[l,j,k] = dg[j,l,k] + dg[k,l,j] - dg[l,j,k]
    term = dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg
    return 0.5 * np.einsum("il,ljk->ijk", ginv, term)


def potential_value(spec, z):
    """V(z) = c/r + sum of short-range bump profiles."""
    z = np.asarray(z, dtype=float)
    v = 0.0
    if spec.c != 0.0:
        r = float(np.linalg.norm(z))
        if r == 0.0:
            raise GeometryDomainError("Coulomb part is singular at the origin")
        v += spec.c / r
    for b in spec.bumps:
        v += float(b.value(z))
    return v


def hamiltonian(spec, z, zeta):
    """Geodesic Hamiltonian h = (1/2) g^{ij} zeta_i zeta_j."""
    zeta = np.asarray(zeta)
    ginv = metric_inverse(spec, z)
    return 0.5 * zeta @ ginv @ zeta

"""Schrodinger propagators on periodic grids, the quadratic gauge factor,
and the sojourn-phase parametrix comparison.

All grid evolution is flat-space periodic-spectral: the free propagator is
an exact Fourier multiplier, potentials enter through Strang splitting.
Non-decaying initial data are handled by large domains and smooth window
masks; comparisons are made well inside the domain.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace

import numpy as np

from .geometry import MetricSpec, PotentialSpec, potential_value
from .sojourn import (
    ExtrapolationConfig,
    sojourn_forward,
    _variational_sojourn,
)

__all__ = [
    "Field",
    "EvolveConfig",
    "euclid_kernel",
    "free_propagate",
    "split_step",
    "gauge",
    "parametrix_phase",
    "phase_extraction",
    "smooth_window",
    "save_field",
    "load_field",
    "field_to_csv",
]

_MAGIC = b"SJFD"
_VERSION = 1


@dataclass(frozen=True)
class Field:
    """Complex wavefunction sampled on a uniform periodic grid.

    The grid along each axis is z_j = (j - N/2) * L / N for j = 0..N-1.
    ``gauge_alpha``/``gauge_m`` record an applied factor e^{-i a rtilde^2/2}.
    """

    dim: int
    n: int
    extent: float
    data: np.ndarray
    t: float = 0.0
    gauge_alpha: float = 0.0
    gauge_m: float = 0.0
    center: tuple = ()

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError("only 1D and 2D fields are supported")
        if self.n & (self.n - 1):
            raise ValueError("grid size must be a power of two")
        expected = (self.n,) if self.dim == 1 else (self.n, self.n)
        if self.data.shape != expected:
            raise ValueError(f"data shape {self.data.shape} != {expected}")
        object.__setattr__(
            self, "data", np.ascontiguousarray(self.data, dtype=complex)
        )
        c = tuple(float(x) for x in self.center)
        if not c:
            c = (0.0,) * self.dim
        if len(c) != self.dim:
            raise ValueError("center must have one entry per dimension")
        object.__setattr__(self, "center", c)

    @property
    def h(self):
        return self.extent / self.n

    def axis(self, index=0):
        return self.center[index] + (np.arange(self.n) - self.n // 2) * self.h

    def grid(self):
        """Coordinate arrays; shape (n,) in 1D, two (n, n) arrays in 2D."""
        if self.dim == 1:
            return (self.axis(),)
        return np.meshgrid(self.axis(0), self.axis(1), indexing="ij")

    def radius(self):
        if self.dim == 1:
            return np.abs(self.axis())
        x, y = self.grid()
        return np.hypot(x, y)

    def freq_axis(self):
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.h)

    def norm(self):
        """Discrete L2 norm: sqrt(h^dim * sum |psi|^2)."""
        return float(
            np.sqrt(self.h**self.dim * np.sum(np.abs(self.data) ** 2))
        )

    def fourier_field(self):
        """The DFT of the field as a Field on the frequency grid.

        Continuum normalization F(k) = h^dim sum psi e^{-i k z}, with the
        output reordered so frequencies run from -pi N/L to pi N/L.
        """
        k = self.freq_axis()
        if self.dim == 1:
            # data is indexed from z = center - L/2, absorb that shift
            phase = np.exp(-1j * k * (self.center[0] - self.extent / 2.0))
            fhat = self.h * np.fft.fft(self.data) * phase
            fhat = np.fft.fftshift(fhat)
        else:
            p0 = np.exp(-1j * k * (self.center[0] - self.extent / 2.0))
            p1 = np.exp(-1j * k * (self.center[1] - self.extent / 2.0))
            fhat = self.h**2 * np.fft.fft2(self.data)
            fhat = fhat * p0[:, None] * p1[None, :]
            fhat = np.fft.fftshift(fhat)
        dual_extent = 2.0 * np.pi * self.n / self.extent
        return Field(
            dim=self.dim, n=self.n, extent=dual_extent, data=fhat, t=self.t
        )


@dataclass(frozen=True)
class EvolveConfig:
    dt: float = 1e-3
    n_steps: int = 1000
    dealias: bool = False
    absorb_width: float = 0.0

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("time step must be positive")


def euclid_kernel(t, z, w, n):
    """Flat-space propagator kernel (2 pi i t)^{-n/2} e^{i|z-w|^2/2t}.

    Branch: (it)^{-n/2} is the continuous continuation from t > 0 of the
    principal branch, i.e. |t|^{-n/2} e^{-i pi n sign(t)/4}.
    """
    if t == 0:
        raise ValueError("kernel undefined at t = 0")
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    diff = z - w
    d2 = np.sum(diff**2, axis=-1) if n > 1 else diff**2
    amp = (2.0 * np.pi * abs(t)) ** (-n / 2.0) * np.exp(
        -1j * np.pi * n * np.sign(t) / 4.0
    )
    return amp * np.exp(1j * d2 / (2.0 * t))


def _kinetic_phase(field, t):
    k = field.freq_axis()
    if field.dim == 1:
        k2 = k**2
    else:
        k2 = k[:, None] ** 2 + k[None, :] ** 2
    return np.exp(-0.5j * t * k2)


def free_propagate(field, t):
    """Exact free propagator e^{-it(Delta/2)} as a Fourier multiplier."""
    if t == 0.0:
        return replace(field, t=field.t)
    mult = _kinetic_phase(field, t)
    if field.dim == 1:
        out = np.fft.ifft(np.fft.fft(field.data) * mult)
    else:
        out = np.fft.ifft2(np.fft.fft2(field.data) * mult)
    return replace(field, data=out, t=field.t + t)


def potential_grid(pot, field):
    """Sample the potential on the field's grid (short-range part only)."""
    if pot.c != 0.0:
        raise ValueError(
            "Coulomb part is unbounded on the grid; use c = 0 presets"
        )
    pts = field.grid()
    if field.dim == 1:
        return np.array([potential_value(pot, (z,)) for z in pts[0]])
    x, y = pts
    out = np.zeros_like(x)
    # bump profiles are cheap; evaluate vectorized per bump
    for b in pot.bumps:
        dx = x - b.center[0]
        dy = y - b.center[1]
        s2 = dx**2 + dy**2
        q = s2 / b.cutoff**2
        chi = np.where(q < 1.0, np.exp(1.0 - 1.0 / np.maximum(1.0 - q, 1e-300)), 0.0)
        out += b.amplitude * np.exp(-s2 / (2.0 * b.width**2)) * chi
    return out


def split_step(field, pot, t, cfg):
    """Strang splitting for (D_t + Delta/2 + V) psi = 0 on the flat grid."""
    n_steps = max(1, int(round(t / cfg.dt)))
    dt = t / n_steps
    v = potential_grid(pot, field)
    expv_half = np.exp(-0.5j * v * dt)
    expk = _kinetic_phase(field, dt)
    fft = np.fft.fft if field.dim == 1 else np.fft.fft2
    ifft = np.fft.ifft if field.dim == 1 else np.fft.ifft2
    psi = field.data
    for step in range(n_steps):
        psi = expv_half * psi
        psi = ifft(fft(psi) * expk)
        psi = expv_half * psi
        if not np.all(np.isfinite(psi.real)):
            raise FloatingPointError(
                f"split-step produced non-finite values at step {step}"
            )
    return replace(field, data=psi, t=field.t + t)


def gauge(field, alpha, m=0.0):
    """Multiply by e^{-i alpha rtilde^2 / 2}, rtilde = r + (m/2) log r."""
    if alpha == 0.0 and m == field.gauge_m:
        return field
    r = field.radius()
    if m != 0.0:
        safe = r > 0
        rt = np.where(safe, r + 0.5 * m * np.log(np.where(safe, r, 1.0)), 0.0)
        phase = np.where(safe, np.exp(-0.5j * alpha * rt**2), 0.0)
    else:
        phase = np.exp(-0.5j * alpha * r**2)
    return replace(
        field,
        data=field.data * phase,
        gauge_alpha=field.gauge_alpha + alpha,
        gauge_m=m if m != 0.0 else field.gauge_m,
    )


def smooth_window(field, r_flat, r_zero):
    """C-infinity radial mask: 1 for r <= r_flat, 0 for r >= r_zero."""
    if not r_flat < r_zero:
        raise ValueError("need r_flat < r_zero")
    r = field.radius()
    x = (r - r_flat) / (r_zero - r_flat)
    return _smoothstep_down(x)


def smooth_window_axis(field, axis_index, r_flat, r_zero):
    """Mask depending on |z_axis| only (for data constant in other axes)."""
    grids = field.grid()
    x = (np.abs(grids[axis_index]) - r_flat) / (r_zero - r_flat)
    return _smoothstep_down(x)


def _smoothstep_down(x):
    """Smooth transition 1 -> 0 as x goes 0 -> 1 (exp-based, C-infinity)."""
    x = np.clip(x, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(x > 0, np.exp(-1.0 / np.maximum(x, 1e-300)), 0.0)
        b = np.where(
            x < 1, np.exp(-1.0 / np.maximum(1.0 - x, 1e-300)), 0.0
        )
    return b / (a + b)


def parametrix_phase(spec, w, t, thetas, cfg=None, tol=1e-10, max_iter=30):
    """Sojourn phase S(w, theta)/t of the unique matched geodesic.

    For each target asymptotic direction theta, Newton-shoot over initial
    directions at w until the extrapolated direction of the geodesic equals
    theta; S(w, theta) is the sojourn time lambda of that geodesic (the
    flat-space value is -w.theta).  Entries that fail to converge are
    reported as errors in the result list.
    """
    if cfg is None:
        cfg = ExtrapolationConfig()
    if not spec.short_range:
        raise ValueError("parametrix phase requires a short-range metric")
    if t == 0.0:
        raise ValueError("t must be nonzero")
    w = np.asarray(w, dtype=float)
    n = spec.dimension
    results = []
    for theta_t in np.atleast_2d(np.asarray(thetas, dtype=float)):
        theta_t = theta_t / np.linalg.norm(theta_t)
        if spec.family == "flat":
            results.append(
                {"theta": theta_t, "S": -float(w @ theta_t),
                 "phase": -float(w @ theta_t) / t, "converged": True}
            )
            continue
        zeta = theta_t.copy()
        ok = False
        for _ in range(max_iter):
            basis = _unit_sphere_basis(zeta)
            dirs = [np.concatenate([np.zeros(n), b]) for b in basis]
            base, derivs = _variational_sojourn(spec, w, zeta, cfg, dirs)
            resid = base.theta - theta_t
            if np.linalg.norm(resid) < tol:
                ok = True
                break
            M = np.column_stack([d[1] for d in derivs])
            step, *_ = np.linalg.lstsq(M, -resid, rcond=None)
            zeta = zeta + sum(step[i] * basis[i] for i in range(len(basis)))
            zeta = zeta / np.linalg.norm(zeta)
        if ok:
            results.append(
                {"theta": theta_t, "S": base.lam, "phase": base.lam / t,
                 "converged": True, "mu": base.mu}
            )
        else:
            results.append(
                {"theta": theta_t, "converged": False,
                 "error": "direction shooting did not converge"}
            )
    return results


def _unit_sphere_basis(v):
    n = v.size
    basis = []
    for k in range(n):
        e = np.zeros(n)
        e[k] = 1.0
        e = e - (e @ v) * v
        for b in basis:
            e = e - (e @ b) * b
        if np.linalg.norm(e) > 1e-8:
            basis.append(e / np.linalg.norm(e))
        if len(basis) == n - 1:
            break
    return basis


def phase_extraction(field, t, r_inner, r_outer, n_rays=None,
                     skip_gauge=False):
    """Radial phase slope of gauge(psi, 1/t) along rays through the origin.

    Returns a list of {direction, slope, masked} entries; the slope is the
    least-squares d/dr of the unwrapped phase over the annulus.  A ray is
    masked when the phase jumps by more than pi between adjacent samples
    (unwrap ambiguity).
    """
    if t == 0.0:
        raise ValueError("t must be nonzero")
    work = field if skip_gauge else gauge(field, 1.0 / t, 0.0)
    ax = work.axis()
    results = []
    if field.dim == 1:
        directions = [np.array([1.0]), np.array([-1.0])]
    else:
        if n_rays is None:
            n_rays = 16
        angles = 2.0 * np.pi * np.arange(n_rays) / n_rays
        directions = [np.array([np.cos(a), np.sin(a)]) for a in angles]
    for d in directions:
        rs = np.arange(r_inner, r_outer, work.h)
        if field.dim == 1:
            idx = np.round(
                (d[0] * rs - work.center[0]) / work.h
            ).astype(int) + work.n // 2
            ok = (idx >= 0) & (idx < work.n)
            vals = work.data[idx[ok]]
        else:
            pts = rs[:, None] * d[None, :]
            ii = np.round(
                (pts[:, 0] - work.center[0]) / work.h
            ).astype(int) + work.n // 2
            jj = np.round(
                (pts[:, 1] - work.center[1]) / work.h
            ).astype(int) + work.n // 2
            ok = (ii >= 0) & (ii < work.n) & (jj >= 0) & (jj < work.n)
            vals = work.data[ii[ok], jj[ok]]
        rs = rs[ok]
        if len(rs) < 4 or np.any(np.abs(vals) == 0.0):
            results.append({"direction": d, "slope": np.nan, "masked": True})
            continue
        ph = np.unwrap(np.angle(vals))
        if np.any(np.abs(np.diff(ph)) > np.pi):
            results.append({"direction": d, "slope": np.nan, "masked": True})
            continue
        slope = float(np.polyfit(rs, ph, 1)[0])
        results.append({"direction": d, "slope": slope, "masked": False})
    return results


def save_field(field, path):
    """Binary container: header + interleaved real/imag doubles, row-major."""
    center = field.center + (0.0,) * (2 - field.dim)
    header = struct.pack(
        "<4sIIIddddddI",
        _MAGIC,
        _VERSION,
        field.dim,
        field.n,
        field.extent,
        field.t,
        field.gauge_alpha,
        field.gauge_m,
        center[0],
        center[1],
        1 if field.gauge_alpha != 0.0 else 0,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        interleaved = np.empty(field.data.size * 2)
        interleaved[0::2] = field.data.real.ravel()
        interleaved[1::2] = field.data.imag.ravel()
        interleaved.tofile(fh)


def load_field(path):
    with open(path, "rb") as fh:
        header = fh.read(struct.calcsize("<4sIIIddddddI"))
        (magic, version, dim, n, extent, t, galpha, gm, cx, cy,
         _flag) = struct.unpack("<4sIIIddddddI", header)
        if magic != _MAGIC:
            raise ValueError("not a field container")
        if version != _VERSION:
            raise ValueError(f"unsupported container version {version}")
        raw = np.fromfile(fh, dtype=float)
    data = raw[0::2] + 1j * raw[1::2]
    shape = (n,) if dim == 1 else (n, n)
    return Field(
        dim=dim, n=n, extent=extent, data=data.reshape(shape), t=t,
        gauge_alpha=galpha, gauge_m=gm, center=(cx, cy)[:dim],
    )


def field_to_csv(field, path):
    """CSV export of a 1D field (or the central row of a 2D field)."""
    ax = field.axis()
    data = field.data if field.dim == 1 else field.data[:, field.n // 2]
    with open(path, "w") as fh:
        fh.write("z,re,im,abs\n")
        for z, v in zip(ax, data):
            fh.write(f"{z:.17g},{v.real:.17g},{v.imag:.17g},{abs(v):.17g}\n")

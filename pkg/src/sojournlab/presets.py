"""Named initial-data presets shared by the command line and the tests.

Each preset builds a :class:`~sojournlab.evolve.Field` on a periodic grid.
Non-decaying profiles (the focusing chirp and the Airy data have bounded,
not decaying, modulus) are confined by smooth masks so the spectral
propagator sees effectively compactly supported data; comparisons against
closed forms are then made well inside the masked region.
"""

import numpy as np
from scipy.special import airy, erfc

from .evolve import Field, smooth_window


def euclid_delta_1d(n=4096, extent=80.0, r_flat=20.0, r_zero=27.0):
    """Chirp (-2 pi i)^{-1/2} e^{-i z^2/2} that focuses to a delta at t = 1."""
    base = Field(dim=1, n=n, extent=extent, data=np.zeros(n, complex))
    z = base.axis()
    amp = (-2j * np.pi) ** (-0.5)
    data = amp * np.exp(-1j * z**2 / 2.0)
    data = data * smooth_window(base, r_flat, r_zero)
    return Field(dim=1, n=n, extent=extent, data=data)


def euclid_delta_2d(n=1024, extent=60.0, r_flat=20.0, r_zero=27.0):
    """Planar chirp in z1, constant in z2: focuses to the line {z1 = 0}."""
    base = Field(dim=2, n=n, extent=extent, data=np.zeros((n, n), complex))
    g1, _ = base.grid()
    amp = (-2j * np.pi) ** (-0.5)
    data = amp * np.exp(-1j * g1**2 / 2.0)
    data = data * smooth_window(base, r_flat, r_zero)
    return Field(dim=2, n=n, extent=extent, data=data)


def airy_1d(n=4096, extent=80.0, grid_center=-24.0,
            left_edge=50.0, left_width=4.0,
            right_edge=10.0, right_width=1.5):
    """Airy data 2 pi e^{-i z^2/2} Ai(z) on an off-center grid.

    The grid is shifted left because the Airy function oscillates only on
    the negative axis; centering the grid there keeps the slowly decaying
    oscillatory tail inside the domain while the right tail (which decays
    super-exponentially) needs little room.  Gaussian-error-function
    tapers remove the periodization jump at both ends.
    """
    base = Field(dim=1, n=n, extent=extent, data=np.zeros(n, complex),
                 center=(grid_center,))
    z = base.axis()
    data = 2.0 * np.pi * np.exp(-1j * z**2 / 2.0) * airy(z)[0]
    taper = 0.5 * erfc((-z - left_edge) / (np.sqrt(2.0) * left_width))
    taper = taper * 0.5 * erfc((z - right_edge) / (np.sqrt(2.0) * right_width))
    return Field(dim=1, n=n, extent=extent, data=data * taper,
                 center=(grid_center,))


def airy_exact_t1(z):
    """Closed form of the Airy preset at t = 1: (-2 pi i)^{1/2} e^{i(z^3/3 + z^2/2)}."""
    z = np.asarray(z, dtype=float)
    return np.sqrt(2.0 * np.pi) * np.exp(-1j * np.pi / 4.0) * np.exp(
        1j * (z**3 / 3.0 + z**2 / 2.0)
    )


def gaussian(n=1024, extent=40.0, dim=1, sigma=1.0, momentum=0.0,
             offset=0.0):
    """Smooth Gaussian packet; the all-clear case for every detector."""
    shape = (n,) * dim
    base = Field(dim=dim, n=n, extent=extent, data=np.zeros(shape, complex))
    if dim == 1:
        z = base.axis()
        data = np.exp(-((z - offset) ** 2) / (2.0 * sigma**2))
        data = data * np.exp(1j * momentum * z)
    else:
        g1, g2 = base.grid()
        r2 = (g1 - offset) ** 2 + g2**2
        data = np.exp(-r2 / (2.0 * sigma**2)) * np.exp(1j * momentum * g1)
    return Field(dim=dim, n=n, extent=extent, data=data)


def plane_wave(n=4096, extent=80.0, k0=1.7, r_flat=25.0, r_zero=35.0):
    """Windowed plane wave e^{i k0 z}; scattering-singular at zeta = k0."""
    base = Field(dim=1, n=n, extent=extent, data=np.zeros(n, complex))
    z = base.axis()
    data = np.exp(1j * k0 * z) * smooth_window(base, r_flat, r_zero)
    return Field(dim=1, n=n, extent=extent, data=data)


def chirped_gaussian(n=4096, extent=80.0, focus=4.0, sigma=12.0,
                     t_focus=1.0):
    """Gaussian with a quadratic phase that focuses at ``t_focus``.

    At the focusing time the packet contracts to width 1/sigma around
    ``focus``; on a grid that is a near-singular spike, the test article
    for the propagation round trip.
    """
    base = Field(dim=1, n=n, extent=extent, data=np.zeros(n, complex))
    z = base.axis()
    d = z - focus
    data = np.exp(-(d**2) / (2.0 * sigma**2)) * np.exp(
        -1j * d**2 / (2.0 * t_focus)
    )
    return Field(dim=1, n=n, extent=extent, data=data)


PRESETS = {
    "euclid-delta-1d": euclid_delta_1d,
    "euclid-delta-2d": euclid_delta_2d,
    "airy-1d": airy_1d,
    "gaussian": gaussian,
    "plane-wave": plane_wave,
    "chirped-gaussian": chirped_gaussian,
}


def make_preset(name, **params):
    """Instantiate a named preset, rejecting unknown names."""
    if name not in PRESETS:
        known = ", ".join(sorted(PRESETS))
        raise KeyError(f"unknown preset {name!r} (known: {known})")
    return PRESETS[name](**params)

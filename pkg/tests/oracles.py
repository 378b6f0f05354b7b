"""Independent reference implementations used only by the test suite.

Everything here deliberately avoids the library's evaluation paths: the theta
oracle is a plain double loop over the defining series (with a doubled term
bound and no argument reduction), derivatives come from finite differences,
and integrals from scipy quadrature.
"""

from __future__ import annotations

import cmath

import numpy as np
from scipy.integrate import quad


def theta_series(char, z, tau, term_bound):
    """Direct summation of the defining q-series, no reduction tricks."""
    a, b = char
    acc = 0j
    for n in range(-term_bound, term_bound + 1):
        m = n + a / 2.0
        acc += cmath.exp(1j * cmath.pi * m * m * tau + 2j * cmath.pi * m * (b / 2.0 + z))
    return acc


def theta_series_deriv(char, order, z, tau, term_bound):
    """Term-by-term derivative of the direct series."""
    a, b = char
    acc = 0j
    for n in range(-term_bound, term_bound + 1):
        m = n + a / 2.0
        acc += (2j * cmath.pi * m) ** order * cmath.exp(
            1j * cmath.pi * m * m * tau + 2j * cmath.pi * m * (b / 2.0 + z)
        )
    return acc


def central_diff(f, z, h=1e-5):
    return (f(z + h) - f(z - h)) / (2 * h)


def richardson_diff(f, z, h=1e-3):
    """Fourth-order first derivative from two central differences."""
    d1 = central_diff(f, z, h)
    d2 = central_diff(f, z, h / 2)
    return (4 * d2 - d1) / 3


def second_diff(f, z, h=1e-4):
    return (f(z + h) - 2 * f(z) + f(z - h)) / (h * h)


def segment_integral(f, z0, z1, **kw):
    """Integral of a complex function along the straight segment z0 -> z1."""
    dz = z1 - z0

    def re_part(t):
        return (f(z0 + t * dz) * dz).real

    def im_part(t):
        return (f(z0 + t * dz) * dz).imag

    re, _ = quad(re_part, 0.0, 1.0, limit=200, **kw)
    im, _ = quad(im_part, 0.0, 1.0, limit=200, **kw)
    return re + 1j * im


def kron_chain(mats):
    """np.kron over a list, left to right."""
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def random_cell_points(rng, ctx, count, min_lattice_dist=0.1):
    """Generic points of the fundamental cell away from lattice points."""
    pts = []
    while len(pts) < count:
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.05, 0.95) * ctx.tau.imag)
        if ctx.lattice_distance(z) > min_lattice_dist:
            pts.append(z)
    return np.array(pts)

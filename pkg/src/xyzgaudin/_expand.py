"""Anisotropy-expansion utilities: geometric ladders, polynomial coefficient
extraction and log-log slope fits shared by the quasiclassical checks."""

from __future__ import annotations

import numpy as np

# Geometric ladder balancing truncation against double-precision rounding.
DEFAULT_ETA_LADDER = (1e-2, 5e-3, 2.5e-3, 1.25e-3)


def eta_polyfit(etas, values, order: int) -> np.ndarray:
    """Least-squares polynomial coefficients in eta, per trailing component.

    values has shape (len(etas), *rest); the return has shape
    (order + 1, *rest) with entry [k] the eta^k coefficient.
    """
    etas = np.asarray(etas, dtype=float)
    values = np.asarray(values, dtype=complex)
    flat = values.reshape(len(etas), -1)
    coeffs = np.polynomial.polynomial.polyfit(etas, flat, order)
    return coeffs.reshape((order + 1,) + values.shape[1:])


def leading_coefficient(etas, values, power: int, orders=(2, 3), stab_tol: float = 1e-5):
    """Limit of values / eta**power as eta -> 0 by polynomial fits.

    Fits values / eta**power against polynomials of each order in `orders`
    and returns (constant_term, spread) where spread is the relative
    disagreement between fit orders, a stability diagnostic.
    """
    etas = np.asarray(etas, dtype=float)
    values = np.asarray(values, dtype=complex)
    scaled = values / (etas.reshape((-1,) + (1,) * (values.ndim - 1)) ** power)
    results = [eta_polyfit(etas, scaled, order)[0] for order in orders]
    ref = results[-1]
    scale = max(1.0, float(np.max(np.abs(ref))))
    spread = max(float(np.max(np.abs(r - ref))) / scale for r in results[:-1])
    return ref, spread


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of log|y| against log(x); nan-safe for exact zeros."""
    xs = np.asarray(xs, dtype=float)
    ys = np.maximum(np.asarray(ys, dtype=float), 1e-300)
    lx = np.log(xs)
    ly = np.log(ys)
    a = np.vstack([lx, np.ones_like(lx)]).T
    slope, _ = np.linalg.lstsq(a, ly, rcond=None)[0]
    return float(slope)

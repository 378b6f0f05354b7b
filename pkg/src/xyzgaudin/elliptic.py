"""Elliptic layer: theta functions with half-integer characteristics and the
Weierstrass functions derived from them, all from one truncated q-series engine.

Conventions
-----------
For characteristics a, b in {0, 1} and Im(tau) > 0,

    theta_ab(z; tau) = sum_n exp( pi*i*(n + a/2)^2 * tau
                                + 2*pi*i*(n + a/2) * (b/2 + z) ).

The period lattice is Z + Z*tau; we write omega_1 = 1, omega_2 = tau,
omega_3 = 1 + tau.  theta_11 is odd and vanishes exactly on the lattice;
the other three characteristics are even.

Quasi-periodicity (used for argument reduction and repeatedly in tests):

    theta_ab(z + 1)   = exp(pi*i*a) * theta_ab(z)
    theta_ab(z + tau) = exp(-pi*i*tau - 2*pi*i*z - pi*i*b) * theta_ab(z)

Weierstrass zeta and p are built from log-derivatives of theta_11 with the
additive constant fixed by the Laurent behaviour at the origin
(zeta(u) - 1/u -> 0 and p(u) - 1/u^2 -> 0), not read off a formula table,
because sign conventions differ between references.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import PoleError, TruncationError

__all__ = [
    "ModulusContext",
    "theta",
    "theta_deriv",
    "theta_zero",
    "theta11_prime0",
    "theta11_logderiv",
    "theta11_logderiv_prime",
    "w_coeff",
    "weierstrass_zeta",
    "weierstrass_p",
    "branch_points",
    "zeta_shift_coeff",
    "half_period_bar",
]

# Valid theta characteristics (a, b).
_CHARS = {(0, 0), (0, 1), (1, 0), (1, 1)}

# Lattice proximity below which evaluations with theta_11 denominators abort.
POLE_GUARD = 1e-8

_MAX_TERM_BOUND = 300


def _check_char(char) -> tuple[int, int]:
    try:
        a, b = char
    except (TypeError, ValueError):
        raise ValueError(f"theta characteristic must be a pair, got {char!r}") from None
    if (a, b) not in _CHARS:
        raise ValueError(f"invalid theta characteristic {char!r}; need a, b in {{0, 1}}")
    return a, b


def _term_bound_for(tau: complex, tol: float) -> int:
    # Worst reduced point has Im z just below Im tau, so the slowest tail
    # decays like |q|^(n^2 - 2n) with q = exp(pi*i*tau).  Solve for the first
    # index whose tail is safely below tol, with margin for the polynomial
    # factors that term-by-term differentiation introduces.
    log_q = -math.pi * tau.imag
    target = math.log(0.01 * tol)
    ratio = target / log_q
    bound = int(math.ceil(2.0 + math.sqrt(max(ratio + 1.0, 1.0)))) + 3
    if bound > _MAX_TERM_BOUND:
        raise TruncationError(
            f"tol={tol:g} unreachable for Im(tau)={tau.imag:g}: "
            f"term bound {bound} exceeds cap {_MAX_TERM_BOUND}"
        )
    return bound


@dataclass(frozen=True)
class ModulusContext:
    """Elliptic modulus plus the q-series truncation policy.

    All theta evaluation flows through one of these; everything downstream
    (operators, solvers, eigenvectors) carries a context around.
    """

    tau: complex
    tol: float = 1e-12
    term_bound: int = 0  # 0 means "derive from tol in __post_init__"

    def __post_init__(self):
        tau = complex(self.tau)
        object.__setattr__(self, "tau", tau)
        if not tau.imag > 0:
            raise ValueError(f"elliptic modulus needs Im(tau) > 0, got {tau}")
        if not 0 < self.tol:
            raise ValueError("tol must be positive")
        if self.tol < 1e-15:
            raise TruncationError("tol below double-precision headroom (min 1e-15)")
        if self.term_bound == 0:
            object.__setattr__(self, "term_bound", _term_bound_for(tau, self.tol))
        elif self.term_bound < 1 or self.term_bound > _MAX_TERM_BOUND:
            raise ValueError(f"term_bound out of range: {self.term_bound}")

    def half_modulus(self) -> "ModulusContext":
        """Context for modulus tau/2 (used by the gauge matrices)."""
        return ModulusContext(self.tau / 2, self.tol)

    def lattice_coords(self, z: complex) -> tuple[float, float]:
        """Real coordinates (x, y) with z = x + y*tau."""
        z = complex(z)
        y = z.imag / self.tau.imag
        x = z.real - y * self.tau.real
        return x, y

    def lattice_distance(self, z) -> float:
        """Distance from z to the nearest point of Z + Z*tau (elementwise min)."""
        z = np.asarray(z, dtype=complex)
        y = z.imag / self.tau.imag
        x = z.real - y * self.tau.real
        xr = x - np.round(x)
        yr = y - np.round(y)
        d = np.abs(xr + yr * self.tau)
        return float(np.min(d))

    def require_off_lattice(self, z, what: str = "argument", guard: float = POLE_GUARD):
        d = self.lattice_distance(z)
        if d < guard:
            raise PoleError(f"{what} within {d:.2e} of a lattice point (guard {guard:g})")


@lru_cache(maxsize=256)
def _series_data(tau: complex, term_bound: int, a: int):
    n = np.arange(-term_bound, term_bound + 1, dtype=float)
    m = n + a / 2.0
    qpow = np.exp(1j * math.pi * tau * m * m)
    return m, qpow


def _reduce(z, ctx: ModulusContext):
    """Split z = z_red + p + q*tau with z_red in the fundamental cell.

    Returns (z_red, p, q) as arrays broadcast like z.  The reduced point has
    lattice coordinates x in [-1/2, 1/2], y in [0, 1), which keeps the
    q-series uniformly convergent.
    """
    z = np.asarray(z, dtype=complex)
    y = z.imag / ctx.tau.imag
    x = z.real - y * ctx.tau.real
    q = np.floor(y)
    p = np.round(x)
    z_red = (x - p) + (y - q) * ctx.tau
    return z_red, p, q


def _series_sum(a: int, b: int, order: int, z_red, ctx: ModulusContext):
    """Truncated series for d^order/dz^order theta_ab at reduced points."""
    m, qpow = _series_data(ctx.tau, ctx.term_bound, a)
    z_red = np.asarray(z_red, dtype=complex)
    phase = np.exp(2j * math.pi * np.multiply.outer(z_red, m) + 1j * math.pi * b * m)
    coeff = qpow if order == 0 else qpow * (2j * math.pi * m) ** order
    return phase @ coeff


def _shift_factor(a: int, b: int, z_red, p, q, tau: complex):
    """Quasi-periodicity factor relating theta at z_red + p + q*tau to z_red."""
    return np.exp(
        1j * math.pi * (a * p - tau * q * q - b * q) - 2j * math.pi * q * z_red
    )


def _theta_any_order(char, order: int, z, ctx: ModulusContext):
    a, b = _check_char(char)
    z_red, p, q = _reduce(z, ctx)
    fac = _shift_factor(a, b, z_red, p, q, ctx.tau)
    if order == 0:
        out = fac * _series_sum(a, b, 0, z_red, ctx)
    else:
        # theta(Z) = C(z_red) * theta(z_red) with C' = -2*pi*i*q * C, so the
        # chain rule turns the derivative at Z into a binomial combination of
        # series derivatives at the reduced point.
        acc = np.zeros(np.shape(z_red), dtype=complex)
        for j in range(order + 1):
            acc = acc + (
                math.comb(order, j)
                * (-2j * math.pi * q) ** j
                * _series_sum(a, b, order - j, z_red, ctx)
            )
        out = fac * acc
    if np.ndim(z) == 0:
        return complex(out)
    return out


def theta(char, z, ctx: ModulusContext):
    """theta_ab(z; tau) for characteristic char = (a, b).

    Accepts scalar or array z; absolute accuracy ctx.tol after argument
    reduction into the fundamental cell.
    """
    return _theta_any_order(char, 0, z, ctx)


def theta_deriv(char, order: int, z, ctx: ModulusContext):
    """order-th z-derivative of theta_ab, order in {1, 2, 3}."""
    if order not in (1, 2, 3):
        raise ValueError(f"unsupported derivative order {order}; need 1, 2 or 3")
    return _theta_any_order(char, order, z, ctx)


@lru_cache(maxsize=1024)
def theta_zero(char, ctx: ModulusContext) -> complex:
    """theta_ab(0), cached per context."""
    return complex(theta(char, 0.0, ctx))


@lru_cache(maxsize=1024)
def theta11_prime0(ctx: ModulusContext) -> complex:
    """theta_11'(0), the residue normalizer for every w_a and for zeta/p."""
    return complex(_theta_any_order((1, 1), 1, 0.0, ctx))


@lru_cache(maxsize=1024)
def _laurent_c2(ctx: ModulusContext) -> complex:
    # Coefficient fixing zeta(u) = d/du log theta_11(u) - c2*u + O(u^3) so
    # that the 1/u Laurent term has no linear correction.
    d3 = complex(_theta_any_order((1, 1), 3, 0.0, ctx))
    return d3 / (3.0 * theta11_prime0(ctx))


def theta11_logderiv(z, ctx: ModulusContext):
    """theta_11'(z) / theta_11(z); simple pole of residue 1 on the lattice."""
    ctx.require_off_lattice(z, "theta11 log-derivative argument")
    return theta_deriv((1, 1), 1, z, ctx) / theta((1, 1), z, ctx)


def theta11_logderiv_prime(z, ctx: ModulusContext):
    """d/dz of theta_11'/theta_11 (equals c2 - weierstrass_p)."""
    ctx.require_off_lattice(z, "theta11 log-derivative argument")
    t0 = theta((1, 1), z, ctx)
    t1 = theta_deriv((1, 1), 1, z, ctx)
    t2 = theta_deriv((1, 1), 2, z, ctx)
    return t2 / t0 - (t1 / t0) ** 2


_W_CHAR = {1: (1, 0), 2: (0, 0), 3: (0, 1)}


def w_coeff(a: int, u, ctx: ModulusContext):
    """Structure function w_a(u) = theta_11'(0)/theta_ab(0) * theta_ab(u)/theta_11(u).

    a = 1, 2, 3 selects the even characteristic (1,0), (0,0), (0,1).  Each w_a
    is odd with a simple pole of residue 1 at every lattice point.
    """
    if a not in _W_CHAR:
        raise ValueError(f"w_coeff label must be 1, 2 or 3, got {a}")
    ctx.require_off_lattice(u, "w_coeff argument")
    ch = _W_CHAR[a]
    scale = theta11_prime0(ctx) / theta_zero(ch, ctx)
    return scale * theta(ch, u, ctx) / theta((1, 1), u, ctx)


def weierstrass_zeta(u, ctx: ModulusContext):
    """Weierstrass zeta for the lattice Z + Z*tau, normalized by zeta(u) ~ 1/u."""
    return theta11_logderiv(u, ctx) - _laurent_c2(ctx) * np.asarray(u, dtype=complex)


def weierstrass_p(u, ctx: ModulusContext):
    """Weierstrass p-function, p = -zeta'; Laurent p(u) = 1/u^2 + O(u^2)."""
    return _laurent_c2(ctx) - theta11_logderiv_prime(u, ctx)


_OMEGA_BAR = {1: 1, 2: 3, 3: 2}  # a -> bar(a) in the half-period labelling


def half_period_bar(a: int, ctx: ModulusContext) -> complex:
    """omega_{bar a}/2 with bar(1, 2, 3) = (1, 3, 2) and omega = (1, tau, 1+tau)."""
    if a not in _OMEGA_BAR:
        raise ValueError(f"half-period label must be 1, 2 or 3, got {a}")
    omega = {1: 1.0 + 0j, 2: ctx.tau, 3: 1.0 + ctx.tau}[_OMEGA_BAR[a]]
    return omega / 2.0


def branch_points(ctx: ModulusContext) -> tuple[complex, complex, complex]:
    """(e_1, e_2, e_3) with e_a = p(omega_{bar a}/2); they sum to zero."""
    return tuple(complex(weierstrass_p(half_period_bar(a, ctx), ctx)) for a in (1, 2, 3))


def zeta_shift_coeff(a: int, d, ctx: ModulusContext):
    """zeta(d + omega_{bar a}/2) - zeta(omega_{bar a}/2).

    The pair-coupling coefficient entering the boundary integral of motion;
    equals -integral of p from omega_{bar a}/2 to d + omega_{bar a}/2.
    """
    w = half_period_bar(a, ctx)
    ctx.require_off_lattice(np.asarray(d, dtype=complex) + w, "zeta shift argument")
    return weierstrass_zeta(np.asarray(d, dtype=complex) + w, ctx) - weierstrass_zeta(w, ctx)

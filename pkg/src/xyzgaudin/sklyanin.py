"""Finite-dimensional spin representations of the elliptic quadratic algebra.

The spin-ell representation space is the theta space

    { f : f(z+1) = f(-z) = f(z),  f(z+tau) = exp(-4*ell*pi*i*(2z+tau)) f(z) }

of dimension 2*ell + 1.  We span it with products of symmetric theta_10
pairs, f(z) = prod_j theta_10(z + c_j) * theta_10(z - c_j), with generic
seeded shifts c_j (2*ell factors per basis function), and realize the four
generators as difference operators

    (S^a f)(z) = [ s_a(z - ell*eta) f(z + eta)
                 - s_a(-z - ell*eta) f(z - eta) ] / theta_11(2z),

turned into (2*ell+1) x (2*ell+1) matrices by collocation: evaluate images at
the basis sample points and solve the gram system.  The solve is verified by
substitution at independent check points, which catches both ill-conditioned
bases and bookkeeping mistakes in the difference operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .elliptic import ModulusContext, theta, theta_zero, POLE_GUARD
from .errors import ConditionError, InterpolationError, PoleError

__all__ = [
    "ThetaBasis",
    "SklyaninRep",
    "build_basis",
    "apply_difference_operator",
    "rep_matrices",
    "check_quadratic_relations",
    "j_constants",
    "RelationReport",
]


def twice_ell_of(ell) -> int:
    """Validate a half-integer spin and return 2*ell as an exact integer."""
    two = 2 * Fraction(ell).limit_denominator(4)
    if two.denominator != 1 or two < 0 or abs(float(two) - 2 * float(ell)) > 1e-12:
        raise ValueError(f"spin must be a nonnegative half-integer, got {ell!r}")
    return int(two)


def _half_lattice_distance(z, ctx: ModulusContext) -> float:
    # zeros of theta_11(2z) sit on the half-lattice (Z + Z*tau)/2
    return ctx.lattice_distance(2.0 * np.asarray(z, dtype=complex)) / 2.0


@dataclass(frozen=True, eq=False)
class ThetaBasis:
    """Concrete basis of one spin-ell theta space.

    shifts[k] holds the 2*ell pair shifts of basis function k;
    gram[i, k] = f_k(sample_points[i]).  check_points are extra generic
    points reserved for verifying interpolation solves by substitution.
    """

    twice_ell: int
    ctx: ModulusContext
    shifts: tuple
    sample_points: tuple
    check_points: tuple
    gram: np.ndarray
    cond: float
    cond_bound: float
    scales: np.ndarray = field(repr=False, default=None)

    @property
    def dim(self) -> int:
        return self.twice_ell + 1

    @property
    def ell(self) -> Fraction:
        return Fraction(self.twice_ell, 2)

    def evaluate(self, k: int, z):
        """Basis function f_k at z (scalar or array)."""
        z = np.asarray(z, dtype=complex)
        out = np.ones(z.shape, dtype=complex) * self.scales[k]
        for c in self.shifts[k]:
            out = out * theta((1, 0), z + c, self.ctx) * theta((1, 0), z - c, self.ctx)
        return out

    def eval_matrix(self, zs) -> np.ndarray:
        """Matrix [i, k] = f_k(zs[i])."""
        zs = np.asarray(zs, dtype=complex)
        return np.stack([self.evaluate(k, zs) for k in range(self.dim)], axis=-1)

    def function(self, coords):
        """Callable for f = sum_k coords[k] f_k."""
        coords = np.asarray(coords, dtype=complex)

        def f(z):
            return self.eval_matrix(np.atleast_1d(np.asarray(z, dtype=complex))) @ coords

        return lambda z: (f(z)[0] if np.ndim(z) == 0 else f(z))

    def coords_of(self, func, what: str = "function", rtol: float = 1e-9) -> np.ndarray:
        """Coordinates of a function known to lie in the space, verified at
        the check points; raises InterpolationError on excess residual."""
        samples = np.asarray([func(z) for z in self.sample_points], dtype=complex)
        coords = np.linalg.solve(self.gram, samples)
        chk = np.asarray([func(z) for z in self.check_points], dtype=complex)
        rec = self.eval_matrix(np.asarray(self.check_points)) @ coords
        scale = max(1.0, float(np.max(np.abs(chk))))
        resid = float(np.max(np.abs(rec - chk))) / scale
        if resid > rtol:
            raise InterpolationError(
                f"{what} does not interpolate in the spin-{self.ell} theta space "
                f"(residual {resid:.2e} > {rtol:g})"
            )
        return coords


def build_basis(ell, ctx: ModulusContext, seed: int = 0, cond_bound: float = 1e6) -> ThetaBasis:
    """Seeded generic basis of the spin-ell theta space with a well-conditioned
    collocation gram matrix; deterministic for fixed (ell, ctx, seed)."""
    twice_ell = twice_ell_of(ell)
    dim = twice_ell + 1
    rng = np.random.default_rng(np.random.SeedSequence([seed, twice_ell, 0x7E7A]))
    tau = ctx.tau

    def draw_points(count, min_dist):
        pts = []
        tries = 0
        while len(pts) < count:
            tries += 1
            if tries > 4000:
                raise ConditionError("could not place well-separated sample points")
            z = rng.uniform(-0.45, 0.45) + rng.uniform(0.08, 0.92) * tau
            if _half_lattice_distance(z, ctx) <= 0.05:
                continue
            if any(abs(z - p) < min_dist for p in pts):
                continue
            pts.append(complex(z))
        return tuple(pts)

    best = None
    for _ in range(60):
        shifts = tuple(
            tuple(
                complex(rng.uniform(0.08, 0.42) + rng.uniform(0.08, 0.42) * tau)
                for _ in range(twice_ell)
            )
            for _ in range(dim)
        )
        sample_points = draw_points(dim, 0.12)
        check_points = draw_points(max(dim, 3), 0.1)

        raw = np.empty((dim, dim), dtype=complex)
        for k in range(dim):
            col = np.ones(dim, dtype=complex)
            for c in shifts[k]:
                zs = np.asarray(sample_points)
                col = col * theta((1, 0), zs + c, ctx) * theta((1, 0), zs - c, ctx)
            raw[:, k] = col
        # per-function scaling keeps the gram balanced across spins
        scales = 1.0 / np.max(np.abs(raw), axis=0)
        gram = raw * scales[None, :]
        cond = float(np.linalg.cond(gram))
        if best is None or cond < best[0]:
            best = (cond, shifts, sample_points, check_points, gram, scales)
        if cond < min(cond_bound, 1e3):
            break
    cond, shifts, sample_points, check_points, gram, scales = best
    if cond >= cond_bound:
        raise ConditionError(
            f"no basis with condition < {cond_bound:g} found (best {cond:.2e})"
        )
    return ThetaBasis(
        twice_ell=twice_ell,
        ctx=ctx,
        shifts=shifts,
        sample_points=sample_points,
        check_points=check_points,
        gram=gram,
        cond=cond,
        cond_bound=cond_bound,
        scales=scales,
    )


@dataclass(frozen=True, eq=False)
class SklyaninRep:
    """Spin-ell generator matrices S[a] (a = 0..3) over a fixed ThetaBasis."""

    twice_ell: int
    eta: complex
    basis: ThetaBasis
    S: np.ndarray  # shape (4, dim, dim)
    interp_residual: float

    @property
    def dim(self) -> int:
        return self.twice_ell + 1

    @property
    def ell(self) -> Fraction:
        return Fraction(self.twice_ell, 2)

    @property
    def ctx(self) -> ModulusContext:
        return self.basis.ctx


_S_CHAR = {0: (1, 1), 1: (1, 0), 2: (0, 0), 3: (0, 1)}


def _s_prefactor(a: int, z, eta: complex, ctx: ModulusContext):
    """s_a(z): the shift coefficients of the generator difference operators."""
    ch = _S_CHAR[a]
    out = theta(ch, eta, ctx) * theta(ch, 2.0 * np.asarray(z, dtype=complex), ctx)
    return 1j * out if a == 2 else out


def apply_difference_operator(a: int, f, rep: SklyaninRep):
    """Image of an evaluable function under generator a of the representation.

    Returns a callable; evaluation raises PoleError within POLE_GUARD of a
    zero of theta_11(2z)."""
    if a not in (0, 1, 2, 3):
        raise ValueError(f"generator index must be 0..3, got {a}")
    ctx = rep.ctx
    eta = rep.eta
    ell_eta = rep.twice_ell * eta / 2.0

    def image(z):
        z = np.asarray(z, dtype=complex)
        if _half_lattice_distance(z, ctx) < POLE_GUARD:
            raise PoleError("difference-operator evaluation at a zero of theta_11(2z)")
        num = _s_prefactor(a, z - ell_eta, eta, ctx) * np.asarray(f(z + eta)) - _s_prefactor(
            a, -z - ell_eta, eta, ctx
        ) * np.asarray(f(z - eta))
        out = num / theta((1, 1), 2.0 * z, ctx)
        return complex(out) if np.ndim(z) == 0 else out

    return image


def rep_matrices(ell, eta: complex, ctx: ModulusContext, basis: ThetaBasis | None = None,
                 seed: int = 0) -> SklyaninRep:
    """Collocation matrices of the four generators on the theta basis.

    The interpolation solve is validated by substitution at the basis check
    points; residual above 1e-9 (relative) raises InterpolationError.
    """
    if basis is None:
        basis = build_basis(ell, ctx, seed=seed)
    twice_ell = twice_ell_of(ell)
    if twice_ell != basis.twice_ell:
        raise ValueError("basis spin does not match requested spin")
    dim = basis.dim
    sp = np.asarray(basis.sample_points)
    cp = np.asarray(basis.check_points)

    stub = SklyaninRep(twice_ell=twice_ell, eta=complex(eta), basis=basis,
                       S=np.zeros((4, dim, dim), dtype=complex), interp_residual=0.0)
    mats = np.empty((4, dim, dim), dtype=complex)
    worst = 0.0
    chk_basis = basis.eval_matrix(cp)
    for a in range(4):
        img_samples = np.empty((dim, dim), dtype=complex)
        img_checks = np.empty((len(cp), dim), dtype=complex)
        for k in range(dim):
            g = apply_difference_operator(a, (lambda kk: lambda z: basis.evaluate(kk, z))(k), stub)
            img_samples[:, k] = g(sp)
            img_checks[:, k] = g(cp)
        M = np.linalg.solve(basis.gram, img_samples)
        mats[a] = M
        rec = chk_basis @ M
        scale = max(1.0, float(np.max(np.abs(img_checks))))
        worst = max(worst, float(np.max(np.abs(rec - img_checks))) / scale)
    if worst > 1e-9:
        raise InterpolationError(
            f"generator images leave the theta space (residual {worst:.2e}); "
            "eta may be degenerate for this basis"
        )
    return SklyaninRep(twice_ell=twice_ell, eta=complex(eta), basis=basis, S=mats,
                       interp_residual=worst)


@lru_cache(maxsize=512)
def j_constants(eta: complex, ctx: ModulusContext) -> tuple[complex, complex, complex]:
    """(J_12, J_23, J_31) structure constants from squared theta values at eta."""
    t00 = theta((0, 0), eta, ctx) ** 2
    t01 = theta((0, 1), eta, ctx) ** 2
    t10 = theta((1, 0), eta, ctx) ** 2
    t11 = theta((1, 1), eta, ctx) ** 2
    j12 = t01 * t11 / (t00 * t10)
    j23 = t10 * t11 / (t00 * t01)
    j31 = -t00 * t11 / (t01 * t10)
    return j12, j23, j31


@dataclass(frozen=True)
class RelationReport:
    residuals: dict
    max_residual: float
    j_values: tuple


def check_quadratic_relations(rep: SklyaninRep) -> RelationReport:
    """Spectral-norm residuals of the six quadratic generator relations.

    For every cyclic (alpha, beta, gamma):
        [S^alpha, S^0]  + i J_{beta gamma} {S^beta, S^gamma}  = 0
        [S^alpha, S^beta] - i {S^0, S^gamma}                  = 0

    The J constant carries the indices of the anticommutator pair; the other
    pairing leaves a residual of order J itself (checked numerically at
    spin 1, where the anticommutators no longer vanish identically).
    """
    S = rep.S
    js = j_constants(rep.eta, rep.ctx)
    jmap = {(1, 2): js[0], (2, 3): js[1], (3, 1): js[2]}
    residuals = {}
    for alpha, beta, gamma in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
        comm0 = S[alpha] @ S[0] - S[0] @ S[alpha]
        anti = S[beta] @ S[gamma] + S[gamma] @ S[beta]
        r1 = np.linalg.norm(comm0 + 1j * jmap[(beta, gamma)] * anti, 2)
        commab = S[alpha] @ S[beta] - S[beta] @ S[alpha]
        anti0 = S[0] @ S[gamma] + S[gamma] @ S[0]
        r2 = np.linalg.norm(commab - 1j * anti0, 2)
        residuals[f"[S{alpha},S0] vs J*{{S{beta},S{gamma}}}"] = float(r1)
        residuals[f"[S{alpha},S{beta}] vs {{S0,S{gamma}}}"] = float(r2)
    return RelationReport(
        residuals=residuals,
        max_residual=max(residuals.values()),
        j_values=js,
    )

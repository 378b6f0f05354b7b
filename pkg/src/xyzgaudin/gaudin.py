"""Quasiclassical chain: classical spin matrices, the linearized Lax operators
and their generating object, and the commuting Hamiltonian family.

The generating operator is

    tau_hat(u) = (1/2) tr_aux [ T_cl(u)^2 ],
    T_cl(u)    = sum_n sum_a w_a(u - z_n) S_n^a (x) sigma^a,

whose pole expansion is

    tau_hat(u) = sum_n p(u - z_n) ell_n (ell_n + 1)
               + sum_n H_n zeta(u - z_n) + H_0.

The 1/2 in front of the auxiliary trace is forced by that expansion: the
double pole of tr T_cl^2 at z_n carries coefficient 2*ell(ell+1) while the
residue carries 2*H_n, so only the halved trace reproduces the displayed
p/zeta coefficients simultaneously.  The same normalization makes

    t_hat(u) - Delta(u) - 1 = 4 eta^2 tau_hat(u) + O(eta^3)

hold for the finite-anisotropy chain (note t_hat -> 2 and Delta -> 1 as
eta -> 0, which fixes where the constant sits).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np

from ._expand import DEFAULT_ETA_LADDER, leading_coefficient
from ._linalg import kron_list, opnorm
from .elliptic import (
    ModulusContext,
    branch_points,
    theta11_prime0,
    w_coeff,
    weierstrass_p,
    weierstrass_zeta,
    zeta_shift_coeff,
)
from .errors import ConfigError, ConvergenceError
from .lattice import SIGMA, ChainSpec, OperatorMatrix, MonodromyBlocks
from .sklyanin import ThetaBasis, rep_matrices, twice_ell_of

__all__ = [
    "GaudinSpec",
    "ClassicalSpin",
    "classical_spin",
    "theta_basis_spin",
    "classical_L",
    "classical_r",
    "classical_T",
    "tau_hat",
    "hamiltonian_n",
    "hamiltonian_0",
    "chain_spec",
]


@dataclass(frozen=True, eq=False)
class GaudinSpec:
    """Quasiclassical chain data: per-site (2*ell_n, z_n) plus the modulus."""

    sites: tuple
    ctx: ModulusContext
    dim_cap: int = 4096

    def __post_init__(self):
        sites = tuple((int(t), complex(z)) for t, z in self.sites)
        object.__setattr__(self, "sites", sites)
        if len(sites) < 1:
            raise ConfigError("chain needs at least one site")
        zs = [z for _, z in sites]
        for i in range(len(zs)):
            for j in range(i + 1, len(zs)):
                if abs(zs[i] - zs[j]) < 1e-12:
                    raise ConfigError("site shifts must be distinct")
        if self.hilbert_dim > self.dim_cap:
            raise ConfigError(
                f"Hilbert dimension {self.hilbert_dim} exceeds cap {self.dim_cap}"
            )

    @classmethod
    def from_spins(cls, spins, shifts, ctx, dim_cap: int = 4096) -> "GaudinSpec":
        sites = tuple((twice_ell_of(s), complex(z)) for s, z in zip(spins, shifts))
        return cls(sites=sites, ctx=ctx, dim_cap=dim_cap)

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def site_dims(self) -> tuple:
        return tuple(t + 1 for t, _ in self.sites)

    @property
    def hilbert_dim(self) -> int:
        return int(reduce(lambda x, y: x * y, self.site_dims, 1))

    @property
    def shifts(self) -> tuple:
        return tuple(z for _, z in self.sites)

    @property
    def total_spin(self) -> Fraction:
        return Fraction(sum(t for t, _ in self.sites), 2)

    def embed(self, mat: np.ndarray, n: int) -> np.ndarray:
        dims = self.site_dims
        left = int(np.prod(dims[n:], dtype=np.int64)) if n < self.n_sites else 1
        right = int(np.prod(dims[: n - 1], dtype=np.int64)) if n > 1 else 1
        return kron_list([np.eye(left, dtype=complex), mat, np.eye(right, dtype=complex)])


def chain_spec(spec: GaudinSpec, eta: complex) -> ChainSpec:
    """The finite-anisotropy chain sharing this spec's sites and modulus."""
    return ChainSpec(sites=spec.sites, eta=eta, ctx=spec.ctx, dim_cap=spec.dim_cap)


@dataclass(frozen=True, eq=False)
class ClassicalSpin:
    """sl(2) generator triple with [S^a, S^b] = i S^c for cyclic (a, b, c)."""

    twice_ell: int
    S: np.ndarray  # shape (3, dim, dim); index 0 is S^1

    @property
    def dim(self) -> int:
        return self.twice_ell + 1

    @property
    def ell(self) -> Fraction:
        return Fraction(self.twice_ell, 2)

    def commutator_residual(self) -> float:
        out = 0.0
        for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            out = max(out, opnorm(self.S[a] @ self.S[b] - self.S[b] @ self.S[a] - 1j * self.S[c]))
        return out

    def casimir(self) -> np.ndarray:
        return sum(self.S[a] @ self.S[a] for a in range(3))


def classical_spin(ell) -> ClassicalSpin:
    """Standard hermitian spin matrices; S^3 diagonal with entries ell..-ell."""
    twice_ell = twice_ell_of(ell)
    d = twice_ell + 1
    ellf = twice_ell / 2.0
    m = ellf - np.arange(d)
    sz = np.diag(m.astype(complex))
    raise_off = np.sqrt(ellf * (ellf + 1) - m[1:] * (m[1:] + 1)).astype(complex)
    sp = np.diag(raise_off, 1)
    sm = sp.conj().T
    sx = (sp + sm) / 2.0
    sy = (sp - sm) / 2j
    return ClassicalSpin(twice_ell=twice_ell, S=np.stack([sx, sy, sz]))


def theta_basis_spin(
    ell,
    ctx: ModulusContext,
    basis: ThetaBasis,
    eta_ladder=DEFAULT_ETA_LADDER,
    stab_tol: float = 1e-5,
) -> ClassicalSpin:
    """Classical spin triple expressed in a theta-interpolation basis.

    Extracted as the eta -> 0 limit of the generator matrices normalized by
    4 * eta * theta_11'(0); the representation matrices are odd in eta, so the
    scaled values are fitted in eta^2.  Validated by the sl(2) commutators and
    the S^3 spectrum before returning, since every finite-anisotropy versus
    classical comparison leans on this identification.
    """
    twice_ell = twice_ell_of(ell)
    norm = 4.0 * theta11_prime0(ctx)
    mats = []
    for eta in eta_ladder:
        rep = rep_matrices(ell, eta, ctx, basis=basis)
        mats.append(rep.S[1:4] / (norm * eta))
    mats = np.asarray(mats)
    sq = np.asarray(eta_ladder) ** 2
    limit, spread = leading_coefficient(sq, mats, power=0, orders=(1, 2))
    if spread > stab_tol:
        raise ConvergenceError(
            f"theta-basis spin extraction unstable across fit orders ({spread:.2e})"
        )
    spin = ClassicalSpin(twice_ell=twice_ell, S=limit)
    if spin.commutator_residual() > 1e-7:
        raise ConvergenceError(
            f"extracted spin triple violates sl(2) ({spin.commutator_residual():.2e})"
        )
    spec3 = np.sort(np.linalg.eigvals(limit[2]).real)
    want = np.arange(-twice_ell / 2.0, twice_ell / 2.0 + 0.5)
    if np.max(np.abs(spec3 - want)) > 1e-6:
        raise ConvergenceError("extracted S^3 spectrum is not {-ell..ell}")
    return spin


def _site_spins(spec: GaudinSpec, spins) -> list:
    if spins is None:
        return [classical_spin(Fraction(t, 2)) for t, _ in spec.sites]
    spins = list(spins)
    if len(spins) != spec.n_sites:
        raise ValueError("one ClassicalSpin per site required")
    for (t, _), s in zip(spec.sites, spins):
        if s.twice_ell != t:
            raise ValueError("classical spin does not match site spin")
    return spins


def _embedded_spins(spec: GaudinSpec, spins) -> np.ndarray:
    """S[n-1, a] = site-n generator a embedded in the chain."""
    site = _site_spins(spec, spins)
    d = spec.hilbert_dim
    out = np.empty((spec.n_sites, 3, d, d), dtype=complex)
    for n in range(1, spec.n_sites + 1):
        for a in range(3):
            out[n - 1, a] = spec.embed(site[n - 1].S[a], n)
    return out


def classical_L(n: int, u: complex, spec: GaudinSpec, spins=None) -> MonodromyBlocks:
    """Linearized Lax operator at site n: sum_a w_a(u) S_n^a (x) sigma^a."""
    spec.ctx.require_off_lattice(u, "classical Lax argument")
    site = _site_spins(spec, spins)[n - 1]
    d = spec.hilbert_dim
    arr = np.zeros((2, 2, d, d), dtype=complex)
    for a in (1, 2, 3):
        wa = w_coeff(a, u, spec.ctx)
        emb = spec.embed(site.S[a - 1], n)
        for i in range(2):
            for j in range(2):
                s = SIGMA[a, i, j]
                if s != 0:
                    arr[i, j] += wa * s * emb
    return MonodromyBlocks.from_array(arr)


def classical_r(u: complex, ctx: ModulusContext) -> OperatorMatrix:
    """Classical r-matrix -1/2 sum_a w_a(u) sigma^a (x) sigma^a on aux (x) aux."""
    ctx.require_off_lattice(u, "classical r-matrix argument")
    out = np.zeros((4, 4), dtype=complex)
    for a in (1, 2, 3):
        out += w_coeff(a, u, ctx) * np.kron(SIGMA[a], SIGMA[a])
    return OperatorMatrix(-0.5 * out, "aux2")


def _classical_T_array(u: complex, spec: GaudinSpec, spins=None) -> np.ndarray:
    site = _site_spins(spec, spins)
    d = spec.hilbert_dim
    arr = np.zeros((2, 2, d, d), dtype=complex)
    for n, (_, z) in enumerate(spec.sites, start=1):
        spec.ctx.require_off_lattice(u - z, "classical monodromy argument u - z_n")
        for a in (1, 2, 3):
            wa = w_coeff(a, u - z, spec.ctx)
            emb = spec.embed(site[n - 1].S[a - 1], n)
            for i in range(2):
                for j in range(2):
                    s = SIGMA[a, i, j]
                    if s != 0:
                        arr[i, j] += wa * s * emb
    return arr


def classical_T(u: complex, spec: GaudinSpec, spins=None) -> MonodromyBlocks:
    """Sum of the site Lax operators at shifted arguments."""
    return MonodromyBlocks.from_array(_classical_T_array(u, spec, spins))


def tau_hat(u: complex, spec: GaudinSpec, spins=None) -> OperatorMatrix:
    """Generating operator (1/2) tr_aux T_cl(u)^2 of the commuting family."""
    t = _classical_T_array(u, spec, spins)
    sq = np.einsum("ikab,kibc->ac", t, t)
    return OperatorMatrix(0.5 * sq, "chain")


def hamiltonian_n(n: int, spec: GaudinSpec, spins=None) -> OperatorMatrix:
    """Residue Hamiltonian H_n = 2 sum_{m != n} sum_a w_a(z_n - z_m) S_n^a S_m^a."""
    if spec.n_sites < 2:
        raise ConfigError("pair Hamiltonians need at least two sites")
    emb = _embedded_spins(spec, spins)
    d = spec.hilbert_dim
    zs = spec.shifts
    out = np.zeros((d, d), dtype=complex)
    for m in range(1, spec.n_sites + 1):
        if m == n:
            continue
        for a in (1, 2, 3):
            wa = w_coeff(a, zs[n - 1] - zs[m - 1], spec.ctx)
            out += 2.0 * wa * (emb[n - 1, a - 1] @ emb[m - 1, a - 1])
    return OperatorMatrix(out, "chain")


def hamiltonian_0(spec: GaudinSpec, spins=None) -> OperatorMatrix:
    """Boundary integral of motion, zeta-difference form:

    H_0 = sum_n sum_a ( -e_a (S_n^a)^2
          + sum_{m != n} w_a(z_n - z_m)
            [zeta(z_n - z_m + w_bar_a/2) - zeta(w_bar_a/2)] S_n^a S_m^a ).
    """
    emb = _embedded_spins(spec, spins)
    es = branch_points(spec.ctx)
    d = spec.hilbert_dim
    zs = spec.shifts
    out = np.zeros((d, d), dtype=complex)
    for n in range(1, spec.n_sites + 1):
        for a in (1, 2, 3):
            sn = emb[n - 1, a - 1]
            out -= es[a - 1] * (sn @ sn)
            for m in range(1, spec.n_sites + 1):
                if m == n:
                    continue
                dnm = zs[n - 1] - zs[m - 1]
                coeff = w_coeff(a, dnm, spec.ctx) * zeta_shift_coeff(a, dnm, spec.ctx)
                out += coeff * (sn @ emb[m - 1, a - 1])
    return OperatorMatrix(out, "chain")


def tau_decomposition(u: complex, spec: GaudinSpec, spins=None) -> OperatorMatrix:
    """Right-hand side of the pole expansion of tau_hat, assembled from the
    Hamiltonians; used to cross-check tau_hat itself."""
    d = spec.hilbert_dim
    out = np.zeros((d, d), dtype=complex)
    for n, (twice_ell, z) in enumerate(spec.sites, start=1):
        ell = twice_ell / 2.0
        out += weierstrass_p(u - z, spec.ctx) * ell * (ell + 1) * np.eye(d)
        if spec.n_sites >= 2:
            out += weierstrass_zeta(u - z, spec.ctx) * hamiltonian_n(n, spec, spins).entries
    out += hamiltonian_0(spec, spins).entries
    return OperatorMatrix(out, "chain")

"""Finite-anisotropy chain operators: Baxter R-matrix, site L-operators,
monodromy and transfer matrices, and the quantum determinant.

Aux-space bookkeeping: a 2x2 operator-valued matrix is stored as a complex
array of shape (2, 2, D, D) with D the chain Hilbert dimension.  The chain
Hilbert space is the Kronecker product of the site spaces ordered with site N
leftmost, so that state tensor products read  psi_N (x) ... (x) psi_1  and the
monodromy is the block product L_N(u - z_N) ... L_1(u - z_1) with site 1
acting first.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from ._linalg import block_mul, kron_list
from .elliptic import ModulusContext, theta
from .errors import ConfigError, PoleError
from .sklyanin import SklyaninRep, ThetaBasis, build_basis, rep_matrices, twice_ell_of

__all__ = [
    "SIGMA",
    "P_MINUS",
    "AuxConstants",
    "OperatorMatrix",
    "MonodromyBlocks",
    "ChainSpec",
    "build_reps",
    "weight_L",
    "r_matrix",
    "site_l_operator",
    "monodromy",
    "transfer",
    "quantum_determinant",
    "delta_pm",
]

# Pauli basis sigma^0..sigma^3 of the 2-dim auxiliary space.
SIGMA = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

_SWAP = np.zeros((4, 4), dtype=complex)
for _i in range(2):
    for _k in range(2):
        _SWAP[2 * _i + _k, 2 * _k + _i] = 1.0

# Projector onto antisymmetric tensors of aux (x) aux; trace 1.
P_MINUS = (np.eye(4, dtype=complex) - _SWAP) / 2.0


@dataclass(frozen=True)
class AuxConstants:
    """The Pauli family and the two-aux-space antisymmetrizer."""

    sigma: np.ndarray = None
    p_minus: np.ndarray = None

    def __post_init__(self):
        if self.sigma is None:
            object.__setattr__(self, "sigma", SIGMA.copy())
        if self.p_minus is None:
            object.__setattr__(self, "p_minus", P_MINUS.copy())


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense complex operator tagged with the space it acts on."""

    entries: np.ndarray
    space_tag: str = "chain"

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError(f"operator entries must be square, got shape {e.shape}")
        if not np.all(np.isfinite(e)):
            raise ValueError("operator entries must be finite")
        object.__setattr__(self, "entries", e)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class MonodromyBlocks:
    """Auxiliary-space blocks (A, B, C, D), each an operator on the chain."""

    a: OperatorMatrix
    b: OperatorMatrix
    c: OperatorMatrix
    d: OperatorMatrix

    @classmethod
    def from_array(cls, arr: np.ndarray, tag: str = "chain") -> "MonodromyBlocks":
        return cls(
            a=OperatorMatrix(arr[0, 0], tag),
            b=OperatorMatrix(arr[0, 1], tag),
            c=OperatorMatrix(arr[1, 0], tag),
            d=OperatorMatrix(arr[1, 1], tag),
        )

    @property
    def array(self) -> np.ndarray:
        return np.stack(
            [
                np.stack([self.a.entries, self.b.entries]),
                np.stack([self.c.entries, self.d.entries]),
            ]
        )


@dataclass(frozen=True, eq=False)
class ChainSpec:
    """Inhomogeneous chain data: per-site (2*ell_n, z_n), anisotropy, modulus."""

    sites: tuple  # ((twice_ell, z), ...)
    eta: complex
    ctx: ModulusContext
    dim_cap: int = 4096

    def __post_init__(self):
        sites = tuple((int(t), complex(z)) for t, z in self.sites)
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "eta", complex(self.eta))
        if len(sites) < 1:
            raise ConfigError("chain needs at least one site")
        if any(t < 0 for t, _ in sites):
            raise ConfigError("spins must be nonnegative half-integers (2*ell >= 0)")
        zs = [z for _, z in sites]
        for i in range(len(zs)):
            for j in range(i + 1, len(zs)):
                if abs(zs[i] - zs[j]) < 1e-12:
                    raise ConfigError(f"site shifts must be distinct, got z_{i+1} = z_{j+1}")
        if self.hilbert_dim > self.dim_cap:
            raise ConfigError(
                f"Hilbert dimension {self.hilbert_dim} exceeds cap {self.dim_cap}"
            )

    @classmethod
    def from_spins(cls, spins, shifts, eta, ctx, dim_cap: int = 4096) -> "ChainSpec":
        """Build from half-integer spins (e.g. [1/2, 1]) and shift list."""
        if len(spins) != len(shifts):
            raise ConfigError("spins and shifts must have equal length")
        sites = tuple((twice_ell_of(s), complex(z)) for s, z in zip(spins, shifts))
        return cls(sites=sites, eta=eta, ctx=ctx, dim_cap=dim_cap)

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
    def twice_spins(self) -> tuple:
        return tuple(t for t, _ in self.sites)

    def embed(self, mat: np.ndarray, n: int) -> np.ndarray:
        """Embed a site-n operator into the chain (site N leftmost)."""
        dims = self.site_dims
        if not 1 <= n <= self.n_sites:
            raise ValueError(f"site index {n} out of range 1..{self.n_sites}")
        if mat.shape != (dims[n - 1], dims[n - 1]):
            raise ValueError("operator dimension does not match site")
        left = int(np.prod(dims[n:], dtype=np.int64)) if n < self.n_sites else 1
        right = int(np.prod(dims[: n - 1], dtype=np.int64)) if n > 1 else 1
        return kron_list([np.eye(left, dtype=complex), mat, np.eye(right, dtype=complex)])


def build_reps(spec: ChainSpec, seed: int = 0, bases=None) -> tuple:
    """Per-site generator matrices.  Passing explicit bases keeps them fixed
    across anisotropy sweeps, which every quasiclassical comparison needs."""
    reps = []
    for n, (twice_ell, _) in enumerate(spec.sites, start=1):
        if bases is not None:
            basis = bases[n - 1]
        else:
            basis = build_basis(twice_ell / 2.0, spec.ctx, seed=seed * 97 + n)
        reps.append(rep_matrices(twice_ell / 2.0, spec.eta, spec.ctx, basis=basis))
    return tuple(reps)


def _check_reps(spec: ChainSpec, reps) -> None:
    if len(reps) != spec.n_sites:
        raise ValueError("one representation per site required")
    for (twice_ell, _), rep in zip(spec.sites, reps):
        if rep.twice_ell != twice_ell:
            raise ValueError("representation spin does not match site spin")
        if abs(rep.eta - spec.eta) > 1e-13:
            raise ValueError("representation anisotropy does not match chain")


_W_CHAR = {1: (1, 0), 2: (0, 0), 3: (0, 1)}


def weight_L(a: int, u: complex, spec: ChainSpec) -> complex:
    """L-operator weight W_a^L(u); W_0^L is u-independent."""
    ctx = spec.ctx
    eta = spec.eta
    ctx.require_off_lattice(eta, "anisotropy eta")
    if a == 0:
        return 1.0 / (2.0 * theta((1, 1), eta, ctx))
    if a not in _W_CHAR:
        raise ValueError(f"weight label must be 0..3, got {a}")
    ctx.require_off_lattice(u, "spectral parameter")
    ch = _W_CHAR[a]
    return theta(ch, u, ctx) / (2.0 * theta((1, 1), u, ctx) * theta(ch, eta, ctx))


def r_matrix(u: complex, spec: ChainSpec) -> OperatorMatrix:
    """Baxter R-matrix on aux (x) aux, normalized so the sigma^0 weight is 1."""
    w0 = weight_L(0, u + spec.eta, spec)
    out = np.zeros((4, 4), dtype=complex)
    for a in range(4):
        wa = weight_L(a, u + spec.eta, spec) / w0
        out += wa * np.kron(SIGMA[a], SIGMA[a])
    return OperatorMatrix(out, "aux2")


def _site_l_array(n: int, u: complex, spec: ChainSpec, reps) -> np.ndarray:
    """(2, 2, d_n, d_n) blocks of the local L-operator at site n."""
    rep = reps[n - 1]
    d = rep.dim
    out = np.zeros((2, 2, d, d), dtype=complex)
    for a in range(4):
        wa = weight_L(a, u, spec)
        for i in range(2):
            for j in range(2):
                s = SIGMA[a, i, j]
                if s != 0:
                    out[i, j] += wa * s * rep.S[a]
    return out


def site_l_operator(n: int, u: complex, spec: ChainSpec, reps) -> MonodromyBlocks:
    """L_n(u) embedded in the chain: blocks act on the full Hilbert space."""
    _check_reps(spec, reps)
    local = _site_l_array(n, u, spec, reps)
    emb = np.empty((2, 2, spec.hilbert_dim, spec.hilbert_dim), dtype=complex)
    for i in range(2):
        for j in range(2):
            emb[i, j] = spec.embed(local[i, j], n)
    return MonodromyBlocks.from_array(emb)


def _monodromy_array(u: complex, spec: ChainSpec, reps) -> np.ndarray:
    """(2, 2, D, D) blocks of T(u) = L_N(u - z_N) ... L_1(u - z_1)."""
    for _, z in spec.sites:
        spec.ctx.require_off_lattice(u - z, "monodromy argument u - z_n")
    n = spec.n_sites
    out = None
    for k in range(n, 0, -1):
        local = _site_l_array(k, u - spec.sites[k - 1][1], spec, reps)
        emb = np.empty((2, 2, spec.hilbert_dim, spec.hilbert_dim), dtype=complex)
        for i in range(2):
            for j in range(2):
                emb[i, j] = spec.embed(local[i, j], k)
        out = emb if out is None else block_mul(out, emb)
    return out


def monodromy(u: complex, spec: ChainSpec, reps) -> MonodromyBlocks:
    """Ordered product of site L-operators, exposed as (A, B, C, D) blocks."""
    _check_reps(spec, reps)
    return MonodromyBlocks.from_array(_monodromy_array(u, spec, reps))


def transfer(u: complex, spec: ChainSpec, reps) -> OperatorMatrix:
    """Transfer matrix: auxiliary trace A(u) + D(u) of the monodromy."""
    _check_reps(spec, reps)
    t = _monodromy_array(u, spec, reps)
    return OperatorMatrix(t[0, 0] + t[1, 1], "chain")


def quantum_determinant(u: complex, spec: ChainSpec, reps) -> OperatorMatrix:
    """Antisymmetrized two-aux-space trace of T(u - eta) T(u + eta).

    Central: acts as the scalar delta_-(u - eta) * delta_+(u + eta).
    """
    _check_reps(spec, reps)
    t1 = _monodromy_array(u - spec.eta, spec, reps)
    t2 = _monodromy_array(u + spec.eta, spec, reps)
    dim = spec.hilbert_dim
    out = np.zeros((dim, dim), dtype=complex)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    w = P_MINUS[2 * j + l, 2 * i + k]
                    if w != 0:
                        out += w * (t1[i, j] @ t2[k, l])
    return OperatorMatrix(out, "chain")


def delta_pm(sign: int, u: complex, spec: ChainSpec) -> complex:
    """The scalar products delta_+ / delta_- of theta ratios over the sites."""
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    ctx = spec.ctx
    out = 1.0 + 0j
    for twice_ell, z in spec.sites:
        ctx.require_off_lattice(u - z, "delta_pm argument u - z_n")
        num = theta((1, 1), u - z + sign * twice_ell * spec.eta, ctx)
        den = theta((1, 1), u - z, ctx)
        out *= num / den
    return complex(out)

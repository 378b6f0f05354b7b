"""Dense linear-algebra helpers: tensor embeddings, 2x2 operator-valued block
algebra, and simultaneous diagonalization of commuting families."""

from __future__ import annotations

import numpy as np

from .errors import ConditionError


def kron_list(mats) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def block_mul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Product of 2x2 operator-valued matrices stored as (2, 2, D, D)."""
    return np.einsum("ikab,kjbc->ijac", x, y)


def blocks_to_full(blocks: np.ndarray) -> np.ndarray:
    """(2, 2, D, D) blocks to the (2D, 2D) matrix on aux (x) quantum space."""
    d = blocks.shape[-1]
    out = np.empty((2 * d, 2 * d), dtype=complex)
    for i in range(2):
        for j in range(2):
            out[i * d : (i + 1) * d, j * d : (j + 1) * d] = blocks[i, j]
    return out


def comm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def opnorm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, 2))


def vector_angle(x: np.ndarray, y: np.ndarray) -> float:
    """Angle between complex ray directions (phase-insensitive)."""
    nx = np.linalg.norm(x)
    ny = np.linalg.norm(y)
    if nx == 0 or ny == 0:
        return float("nan")
    c = abs(np.vdot(x, y)) / (nx * ny)
    return float(np.arccos(min(1.0, c)))


def offdiag_residual(a: np.ndarray, v: np.ndarray, vinv: np.ndarray) -> float:
    m = vinv @ a @ v
    off = m - np.diag(np.diag(m))
    scale = max(1.0, float(np.max(np.abs(np.diag(m)))))
    return float(np.max(np.abs(off))) / scale


def commuting_eigenbasis(ops, seed: int = 0, tol: float = 1e-7):
    """Common eigenbasis of a commuting family of diagonalizable matrices.

    Diagonalizes a random linear combination (which generically splits every
    degeneracy the family can resolve) and verifies that each member becomes
    diagonal in that basis.  Returns (V, Vinv, evals) with evals[k, s] the
    eigenvalue of ops[k] in slot s.
    """
    ops = [np.asarray(op) for op in ops]
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x51B0]))
    best = None
    for _ in range(8):
        coeff = rng.normal(size=len(ops)) + 1j * rng.normal(size=len(ops))
        combo = sum(c * op for c, op in zip(coeff, ops))
        _, v = np.linalg.eig(combo)
        try:
            vinv = np.linalg.inv(v)
        except np.linalg.LinAlgError:
            continue
        resid = max(offdiag_residual(op, v, vinv) for op in ops)
        if best is None or resid < best[0]:
            best = (resid, v, vinv)
        if resid < tol:
            break
    if best is None or best[0] > tol:
        raise ConditionError(
            f"no common eigenbasis found (best off-diagonal residual "
            f"{best[0] if best else float('inf'):.2e})"
        )
    _, v, vinv = best
    evals = np.stack([np.diag(vinv @ op @ v) for op in ops])
    return v, vinv, evals

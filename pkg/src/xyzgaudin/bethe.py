"""Bethe equations of the finite-anisotropy chain and its quasiclassical
limit: residuals, damped-Newton multistart solvers with homotopy seeding,
eigenvalue formulas, and matching against exact diagonalization.

Quasiclassical root conditions, component j:

    sum_n ell_n r(w_j - z_n) + pi*i*nu - sum_{k != j} r(w_j - w_k) = 0,

with r the log-derivative of theta_11.  The finite-anisotropy system is the
ratio equation delta_+(w_j)/delta_-(w_j) = exp(-4*pi*i*nu*eta) *
prod_{k != j} theta_11(w_j - w_k + 2 eta)/theta_11(w_j - w_k - 2 eta); the
solver iterates its branch-reduced logarithm (whose Jacobian is a sum of
log-derivative differences) and reports the plain two-sides difference
normalized by the right side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._linalg import commuting_eigenbasis
from .elliptic import theta, theta_deriv, theta11_logderiv, theta11_logderiv_prime
from .errors import ConfigError, ConvergenceError
from .gaudin import GaudinSpec, tau_hat
from .lattice import ChainSpec, delta_pm, transfer

__all__ = [
    "BetheSolution",
    "probe_points",
    "gaudin_residual",
    "solve_gaudin",
    "gaudin_eigenvalue",
    "gaudin_functional_residual",
    "xyz_residual",
    "solve_xyz",
    "xyz_eigenvalue",
    "xyz_eigenvalue_check",
    "EigenCurves",
    "gaudin_eigencurves",
    "xyz_eigencurves",
    "match_curve",
]

COLLISION_TOL = 1e-6


def _spec_ctx(spec):
    return spec.ctx


def _integer_total_spin(spec) -> int:
    total = sum(t for t, _ in spec.sites)
    if total % 2 != 0:
        raise ConfigError(
            f"total spin {total}/2 is not an integer; the root count M is undefined"
        )
    return total // 2


def probe_points(spec, count: int, seed: int = 0, exclude=(), min_dist: float = 0.12):
    """Seeded generic probe points in the fundamental cell, away from the
    lattice, the site shifts, and any extra excluded points."""
    ctx = _spec_ctx(spec)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x9B0B]))
    avoid = list(spec.shifts) + list(exclude)
    pts = []
    tries = 0
    while len(pts) < count:
        tries += 1
        if tries > 20000:
            raise ConvergenceError("probe sampling failed; excluded region too large")
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.05, 0.95) * ctx.tau.imag)
        if ctx.lattice_distance(z) < min_dist:
            continue
        if any(ctx.lattice_distance(z - a) < min_dist for a in avoid):
            continue
        pts.append(z)
    return np.asarray(pts)


# ---------------------------------------------------------------------------
# quasiclassical (eta -> 0) system
# ---------------------------------------------------------------------------


def gaudin_residual(roots, nu: int, spec: GaudinSpec) -> np.ndarray:
    """Residual vector of the quasiclassical Bethe system."""
    ctx = spec.ctx
    roots = np.asarray(roots, dtype=complex)
    out = np.empty(len(roots), dtype=complex)
    for j, w in enumerate(roots):
        acc = 1j * math.pi * nu
        for twice_ell, z in spec.sites:
            acc += 0.5 * twice_ell * theta11_logderiv(w - z, ctx)
        for k, wk in enumerate(roots):
            if k != j:
                acc -= theta11_logderiv(w - wk, ctx)
        out[j] = acc
    return out


def _gaudin_jacobian(roots, spec: GaudinSpec) -> np.ndarray:
    ctx = spec.ctx
    m = len(roots)
    jac = np.zeros((m, m), dtype=complex)
    for j, w in enumerate(roots):
        for twice_ell, z in spec.sites:
            jac[j, j] += 0.5 * twice_ell * theta11_logderiv_prime(w - z, ctx)
        for k, wk in enumerate(roots):
            if k != j:
                d = theta11_logderiv_prime(w - wk, ctx)
                jac[j, j] -= d
                jac[j, k] += d
    return jac


@dataclass(frozen=True)
class BetheSolution:
    """Verified root set for one winding integer."""

    nu: int
    roots: tuple
    model: str  # "gaudin" | "xyz"
    residual: float
    jacobian_cond: float
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def m(self) -> int:
        return len(self.roots)


def _reduce_to_cell(w: complex, ctx) -> complex:
    x, y = ctx.lattice_coords(w)
    return (x - math.floor(x + 0.5)) + (y - math.floor(y)) * ctx.tau


def _same_solution(a, b, ctx, tol: float = 1e-6) -> bool:
    """Equal root multisets modulo permutations and lattice shifts."""
    if len(a) != len(b):
        return False
    used = [False] * len(b)
    for wa in a:
        hit = False
        for i, wb in enumerate(b):
            if not used[i] and ctx.lattice_distance(wa - wb) < tol:
                used[i] = True
                hit = True
                break
        if not hit:
            return False
    return True


def _collision_free(roots, spec, tol: float = COLLISION_TOL) -> bool:
    ctx = spec.ctx
    for j, w in enumerate(roots):
        if ctx.lattice_distance(w) < 10 * tol:
            return False
        for z in spec.shifts:
            if ctx.lattice_distance(w - z) < tol:
                return False
        for k in range(j + 1, len(roots)):
            if ctx.lattice_distance(w - roots[k]) < tol:
                return False
    return True


def _newton(residual_fn, jacobian_fn, w0, tol: float, max_iter: int):
    """Damped complex Newton; returns (roots, final_norm, cond) or None."""
    w = np.asarray(w0, dtype=complex).copy()
    fnorm = None
    cond = np.inf
    for _ in range(max_iter):
        try:
            f = residual_fn(w)
        except Exception:
            return None
        fnorm = float(np.max(np.abs(f)))
        if fnorm < tol:
            try:
                cond = float(np.linalg.cond(jacobian_fn(w)))
            except Exception:
                cond = np.inf
            return w, fnorm, cond
        try:
            jac = jacobian_fn(w)
            step = np.linalg.solve(jac, -f)
        except Exception:
            return None
        if not np.all(np.isfinite(step)):
            return None
        lam = 1.0
        for _ in range(40):
            try:
                fnew = residual_fn(w + lam * step)
                if float(np.max(np.abs(fnew))) < fnorm:
                    break
            except Exception:
                pass
            lam *= 0.5
        else:
            return None
        w = w + lam * step
    return None


def _random_starts(spec, m: int, starts: int, seed: int):
    ctx = spec.ctx
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xBE7E, m]))
    out = []
    guard = 0
    while len(out) < starts and guard < 50 * starts + 1000:
        guard += 1
        w = rng.uniform(-0.5, 0.5, m) + 1j * rng.uniform(0.05, 0.95, m) * ctx.tau.imag
        if _collision_free(w, spec, 0.05):
            out.append(w)
    return out


def solve_gaudin(
    spec: GaudinSpec,
    nu: int,
    m: int | None = None,
    starts: int = 64,
    seed: int = 0,
    tol: float = 1e-10,
    max_iter: int = 60,
) -> list[BetheSolution]:
    """Multistart Newton on the quasiclassical system; solutions deduplicated
    modulo root permutations and lattice shifts, each re-verified by a fresh
    residual evaluation."""
    m_expected = _integer_total_spin(spec)
    if m is None:
        m = m_expected
    if m != m_expected:
        raise ConfigError(f"root count must equal total spin {m_expected}, got {m}")

    found: list[BetheSolution] = []
    for w0 in _random_starts(spec, m, starts, seed):
        hit = _newton(
            lambda w: gaudin_residual(w, nu, spec),
            lambda w: _gaudin_jacobian(w, spec),
            w0,
            tol,
            max_iter,
        )
        if hit is None:
            continue
        roots, _, cond = hit
        if not _collision_free(roots, spec):
            continue
        resid = float(np.max(np.abs(gaudin_residual(roots, nu, spec))))
        if resid > tol:
            continue
        canon = tuple(_reduce_to_cell(w, spec.ctx) for w in roots)
        if any(_same_solution(canon, s.roots, spec.ctx) for s in found):
            continue
        found.append(
            BetheSolution(
                nu=nu,
                roots=canon,
                model="gaudin",
                residual=resid,
                jacobian_cond=cond,
                meta={"seed": seed},
            )
        )
    found.sort(key=lambda s: (round(s.roots[0].real, 8), round(s.roots[0].imag, 8)))
    return found


def _z_fn(u, spec, order: int = 0):
    ctx = spec.ctx
    f = theta11_logderiv if order == 0 else theta11_logderiv_prime
    return sum(0.5 * t * f(u - z, ctx) for t, z in spec.sites)


def gaudin_eigenvalue(u: complex, sol: BetheSolution, spec: GaudinSpec) -> complex:
    """Eigenvalue tau(u) = (chi - Z)^2 + (chi - Z)' of the generating operator,
    with chi the log-derivative of the root function q."""
    ctx = spec.ctx
    chi = -1j * math.pi * sol.nu + sum(theta11_logderiv(u - w, ctx) for w in sol.roots)
    chi_p = sum(theta11_logderiv_prime(u - w, ctx) for w in sol.roots)
    z = _z_fn(u, spec, 0)
    z_p = _z_fn(u, spec, 1)
    return complex((chi - z) ** 2 + (chi_p - z_p))


def _q_and_derivs(u: complex, sol: BetheSolution, ctx):
    """q, q', q'' by explicit product differentiation (no log-derivative
    shortcuts), so functional-equation checks run on an independent path."""
    nu = sol.nu
    ws = sol.roots
    t0 = np.array([theta((1, 1), u - w, ctx) for w in ws])
    t1 = np.array([theta_deriv((1, 1), 1, u - w, ctx) for w in ws])
    t2 = np.array([theta_deriv((1, 1), 2, u - w, ctx) for w in ws])
    e = np.exp(-1j * math.pi * nu * u)
    prod_all = np.prod(t0)
    q = e * prod_all

    def prod_except(j):
        out = 1.0 + 0j
        for k in range(len(ws)):
            if k != j:
                out *= t0[k]
        return out

    def prod_except2(j, k):
        out = 1.0 + 0j
        for i in range(len(ws)):
            if i != j and i != k:
                out *= t0[i]
        return out

    s1 = sum(t1[j] * prod_except(j) for j in range(len(ws)))
    qp = e * (-1j * math.pi * nu * prod_all + s1)
    s2 = sum(t2[j] * prod_except(j) for j in range(len(ws)))
    s11 = sum(
        t1[j] * t1[k] * prod_except2(j, k)
        for j in range(len(ws))
        for k in range(len(ws))
        if j != k
    )
    qpp = e * (
        (-1j * math.pi * nu) ** 2 * prod_all
        - 2j * math.pi * nu * s1
        + s2
        + s11
    )
    return q, qp, qpp


def gaudin_functional_residual(u: complex, sol: BetheSolution, spec: GaudinSpec) -> float:
    """Relative residual of q'' - 2 Z q' + (Z^2 - Z') q = tau q at u."""
    q, qp, qpp = _q_and_derivs(u, sol, spec.ctx)
    z = _z_fn(u, spec, 0)
    zp = _z_fn(u, spec, 1)
    tau = gaudin_eigenvalue(u, sol, spec)
    lhs = qpp - 2 * z * qp + (z * z - zp) * q
    return abs(lhs - tau * q) / max(1.0, abs(tau * q))


# ---------------------------------------------------------------------------
# finite-anisotropy system
# ---------------------------------------------------------------------------


def xyz_residual(roots, nu: int, spec: ChainSpec) -> np.ndarray:
    """Two-sides difference of the ratio equations, normalized by the right
    side; component j compares delta_+/delta_- at w_j with the root product."""
    ctx = spec.ctx
    eta = spec.eta
    roots = np.asarray(roots, dtype=complex)
    out = np.empty(len(roots), dtype=complex)
    for j, w in enumerate(roots):
        lhs = delta_pm(+1, w, spec) / delta_pm(-1, w, spec)
        rhs = np.exp(-4j * math.pi * nu * eta)
        for k, wk in enumerate(roots):
            if k != j:
                rhs *= theta((1, 1), w - wk + 2 * eta, ctx) / theta(
                    (1, 1), w - wk - 2 * eta, ctx
                )
        out[j] = (lhs - rhs) / abs(rhs)
    return out


def _xyz_log_residual(roots, nu: int, spec: ChainSpec) -> np.ndarray:
    """Branch-reduced logarithm of the ratio equations (Newton target)."""
    ctx = spec.ctx
    eta = spec.eta
    roots = np.asarray(roots, dtype=complex)
    out = np.empty(len(roots), dtype=complex)
    for j, w in enumerate(roots):
        acc = 4j * math.pi * nu * eta
        for twice_ell, z in spec.sites:
            acc += np.log(theta((1, 1), w - z + twice_ell * eta, ctx)) - np.log(
                theta((1, 1), w - z - twice_ell * eta, ctx)
            )
        for k, wk in enumerate(roots):
            if k != j:
                acc -= np.log(theta((1, 1), w - wk + 2 * eta, ctx)) - np.log(
                    theta((1, 1), w - wk - 2 * eta, ctx)
                )
        # the equation lives on the cylinder: fold the imaginary part
        acc = acc.real + 1j * (np.angle(np.exp(1j * acc.imag)))
        out[j] = acc
    return out


def _xyz_log_jacobian(roots, spec: ChainSpec) -> np.ndarray:
    ctx = spec.ctx
    eta = spec.eta
    m = len(roots)
    jac = np.zeros((m, m), dtype=complex)
    for j, w in enumerate(roots):
        for twice_ell, z in spec.sites:
            jac[j, j] += theta11_logderiv(w - z + twice_ell * eta, ctx) - theta11_logderiv(
                w - z - twice_ell * eta, ctx
            )
        for k, wk in enumerate(roots):
            if k != j:
                d = theta11_logderiv(w - wk + 2 * eta, ctx) - theta11_logderiv(
                    w - wk - 2 * eta, ctx
                )
                jac[j, j] -= d
                jac[j, k] += d
    return jac


def _xyz_collision_free(roots, spec: ChainSpec) -> bool:
    # also keep the shifted arguments w - z_n +/- 2*ell*eta and w - w_k -/+ 2*eta
    # away from lattice zeros, where the log residual degenerates
    ctx = spec.ctx
    if not _collision_free(roots, spec):
        return False
    eta = spec.eta
    for j, w in enumerate(roots):
        for twice_ell, z in spec.sites:
            for s in (+1, -1):
                if ctx.lattice_distance(w - z + s * twice_ell * eta) < COLLISION_TOL:
                    return False
        for k, wk in enumerate(roots):
            if k != j and ctx.lattice_distance(w - wk + 2 * eta) < COLLISION_TOL:
                return False
    return True


def solve_xyz(
    spec: ChainSpec,
    nu: int,
    m: int | None = None,
    seeds_from_gaudin=None,
    starts: int = 64,
    seed: int = 0,
    tol: float = 1e-10,
    max_iter: int = 60,
    homotopy_steps: int = 8,
) -> list[BetheSolution]:
    """Finite-anisotropy root sets: homotopy continuation from quasiclassical
    seeds (anisotropy ramped linearly from zero) plus random multistart."""
    m_expected = _integer_total_spin(spec)
    if m is None:
        m = m_expected
    if m != m_expected:
        raise ConfigError(f"root count must equal total spin {m_expected}, got {m}")

    eta_target = spec.eta
    candidates = []

    if seeds_from_gaudin:
        for gsol in seeds_from_gaudin:
            w = np.asarray(gsol.roots, dtype=complex)
            ok = True
            for step in range(1, homotopy_steps + 1):
                eta_k = eta_target * step / homotopy_steps
                spec_k = ChainSpec(sites=spec.sites, eta=eta_k, ctx=spec.ctx,
                                   dim_cap=spec.dim_cap)
                hit = _newton(
                    lambda ww: _xyz_log_residual(ww, nu, spec_k),
                    lambda ww: _xyz_log_jacobian(ww, spec_k),
                    w,
                    tol * 100 if step < homotopy_steps else tol,
                    max_iter,
                )
                if hit is None:
                    ok = False
                    break
                w = hit[0]
            if ok:
                candidates.append(w)

    candidates.extend(_random_starts(spec, m, starts, seed))

    found: list[BetheSolution] = []
    for w0 in candidates:
        hit = _newton(
            lambda w: _xyz_log_residual(w, nu, spec),
            lambda w: _xyz_log_jacobian(w, spec),
            np.asarray(w0, dtype=complex),
            tol,
            max_iter,
        )
        if hit is None:
            continue
        roots, _, cond = hit
        if not _xyz_collision_free(roots, spec):
            continue
        resid = float(np.max(np.abs(xyz_residual(roots, nu, spec))))
        if resid > 1e3 * tol:
            continue
        canon = tuple(_reduce_to_cell(w, spec.ctx) for w in roots)
        if any(_same_solution(canon, s.roots, spec.ctx) for s in found):
            continue
        found.append(
            BetheSolution(
                nu=nu,
                roots=canon,
                model="xyz",
                residual=resid,
                jacobian_cond=cond,
                meta={"seed": seed},
            )
        )
    found.sort(key=lambda s: (round(s.roots[0].real, 8), round(s.roots[0].imag, 8)))
    return found


def _q_of(u: complex, sol: BetheSolution, ctx) -> complex:
    out = np.exp(-1j * math.pi * sol.nu * u)
    for w in sol.roots:
        out *= theta((1, 1), u - w, ctx)
    return complex(out)


def xyz_eigenvalue(u: complex, sol: BetheSolution, spec: ChainSpec) -> complex:
    """Transfer eigenvalue from the two-term functional relation:
    t(u) = [delta_+(u) q(u - 2 eta) + delta_-(u) q(u + 2 eta)] / q(u)."""
    eta = spec.eta
    q0 = _q_of(u, sol, spec.ctx)
    if abs(q0) < 1e-13:
        raise ConvergenceError("q(u) vanishes at the probe; move the probe")
    return complex(
        (
            delta_pm(+1, u, spec) * _q_of(u - 2 * eta, sol, spec.ctx)
            + delta_pm(-1, u, spec) * _q_of(u + 2 * eta, sol, spec.ctx)
        )
        / q0
    )


def xyz_eigenvalue_check(u: complex, sol: BetheSolution, spec: ChainSpec, reps,
                         slots=None) -> float:
    """Minimum over transfer eigenvalue slots of the functional-relation
    residual |t_slot(u) q(u) - delta_+(u) q(u-2eta) - delta_-(u) q(u+2eta)|,
    normalized by the combination scale.  A verified solution must produce a
    matching slot below tolerance; failure flags a spurious root set."""
    eta = spec.eta
    if slots is None:
        slots = np.linalg.eigvals(transfer(u, spec, reps).entries)
    q0 = _q_of(u, sol, spec.ctx)
    qm = _q_of(u - 2 * eta, sol, spec.ctx)
    qp = _q_of(u + 2 * eta, sol, spec.ctx)
    rhs = delta_pm(+1, u, spec) * qm + delta_pm(-1, u, spec) * qp
    scale = max(1.0, abs(rhs), float(np.max(np.abs(slots))) * abs(q0))
    return float(min(abs(t * q0 - rhs) for t in slots) / scale)


# ---------------------------------------------------------------------------
# diagonalization cross-checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EigenCurves:
    """Joint eigenvalue table of a commuting operator family sampled at
    probes: curves[s, i] is slot s at probe i."""

    probes: np.ndarray
    curves: np.ndarray
    basis: np.ndarray
    basis_inv: np.ndarray

    @property
    def n_slots(self) -> int:
        return self.curves.shape[0]

    def eigenvector(self, slot: int) -> np.ndarray:
        v = self.basis[:, slot]
        return v / np.linalg.norm(v)


def gaudin_eigencurves(spec: GaudinSpec, probes, spins=None, seed: int = 0) -> EigenCurves:
    ops = [tau_hat(u, spec, spins).entries for u in probes]
    v, vinv, evals = commuting_eigenbasis(ops, seed=seed)
    return EigenCurves(probes=np.asarray(probes), curves=evals.T.copy(), basis=v,
                       basis_inv=vinv)


def xyz_eigencurves(spec: ChainSpec, reps, probes, seed: int = 0) -> EigenCurves:
    ops = [transfer(u, spec, reps).entries for u in probes]
    v, vinv, evals = commuting_eigenbasis(ops, seed=seed)
    return EigenCurves(probes=np.asarray(probes), curves=evals.T.copy(), basis=v,
                       basis_inv=vinv)


def match_curve(values, curves: EigenCurves, tol: float = 1e-8):
    """Slot whose eigenvalue curve agrees with `values` at every probe, or
    None; `values` aligned with curves.probes."""
    values = np.asarray(values)
    scale = np.maximum(1.0, np.abs(curves.curves).max(axis=0))
    best_slot, best_err = None, np.inf
    for s in range(curves.n_slots):
        err = float(np.max(np.abs(curves.curves[s] - values) / scale))
        if err < best_err:
            best_slot, best_err = s, err
    if best_err < tol:
        return best_slot, best_err
    return None, best_err

"""Luxemburg-norm minimization over upward-closed constraint polyhedra.

Both constrained minimizations in this package (pairwise gradient
constraints and ball-average constraints) share one structure: nonnegative
constraint coefficients, so the feasible set is closed under coordinate
increases, feasibility is restorable by monotone half-space corrections, and
the modular is separable and strictly convex for p- > 1.

The norm is found by bisection on the level lam, deciding each level through
the inner problem

    feasible(lam)  <=>  min { modular(x / lam) : x in polyhedron } <= 1,

solved by cyclic dual-coordinate ascent (Hildreth's scheme generalized to
p(.) exponents).  The dual value certifies "infeasible" (lower bound > 1)
and any restored primal certifies "feasible" (modular <= 1), so bisection
branches are certified whenever the inner loop converges.  For p- = 1 the
primal is not strictly convex and a projected-descent fallback is used;
optimality is then best-effort (feasible answers only).

The returned iterate is always genuinely feasible and the reported norm is
its measured Luxemburg norm.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as kern
from .lebesgue import _modular_raw, _vlp_norm_raw


@dataclass
class PolyhedronSolve:
    x: np.ndarray
    norm: float
    bisections: int
    converged: bool


def _psi_vec(a: np.ndarray, w: np.ndarray, pv: np.ndarray, lam: float) -> np.ndarray:
    """Vectorized argmin_{t>=0} w (t/lam)**p - a t (the dual-to-primal map)."""
    out = np.zeros_like(a)
    pos = a > 0.0
    if np.any(pos):
        with np.errstate(over="ignore"):
            arg = np.log(a[pos] * lam / (w[pos] * pv[pos])) / (pv[pos] - 1.0)
            out[pos] = np.where(arg > 690.0, 1e300, lam * np.exp(np.minimum(arg, 690.0)))
    return out


class PairSystem:
    """g >= 0 and g_i + g_j >= c over an explicit pair list."""

    def __init__(self, n, ii, jj, cc, w, pv):
        self.n = n
        self.ii, self.jj, self.cc = ii, jj, cc
        self.w, self.pv = w, pv
        self.ptol = 1e-12 * max(1.0, float(np.max(cc)) if cc.size else 1.0)
        cmat = np.zeros((n, n))
        cmat[ii, jj] = cc
        cmat[jj, ii] = cc
        self.cmat = cmat

    def project(self, x: np.ndarray) -> float:
        return kern.pair_project(x, self.ii, self.jj, self.cc, self.ptol, 64)

    def tighten(self, x: np.ndarray) -> None:
        # each coordinate drops to the least value keeping every constraint
        # satisfied given the others
        for _ in range(3):
            changed = 0.0
            for i in range(self.n):
                floor_i = max(0.0, float(np.max(self.cmat[i] - x)))
                if floor_i < x[i]:
                    changed = max(changed, x[i] - floor_i)
                    x[i] = floor_i
            if changed <= self.ptol:
                break

    def exchange(self, x: np.ndarray, lam: float) -> float:
        return kern.pair_exchange(
            x, self.ii, self.jj, self.cc, self.cmat, self.w, self.pv, lam
        )

    def new_dual(self):
        return np.zeros(self.cc.size), np.zeros(self.n)

    def dual_sweep(self, mu, a, x, lam) -> float:
        return kern.pair_dual_sweep(
            mu, a, x, self.ii, self.jj, self.cc, self.w, self.pv, lam
        )

    def dual_value(self, mu, a, x, lam) -> float:
        phi = float(np.sum(self.w * (x / lam) ** self.pv))
        return phi - float(a @ x) + float(mu @ self.cc)

    def primal_from_dual(self, a, lam) -> np.ndarray:
        return _psi_vec(a, self.w, self.pv, lam)


class BallSystem:
    """psi >= 0 and CSR-encoded weighted averages avg_B psi >= rhs_B."""

    def __init__(self, n, indptr, indices, coefs, rhs, nrm2, w, pv):
        self.n = n
        self.indptr, self.indices, self.coefs = indptr, indices, coefs
        self.rhs, self.nrm2 = rhs, nrm2
        self.w, self.pv = w, pv
        self.ptol = 1e-12 * max(1.0, float(np.max(rhs)) if rhs.size else 1.0)
        row_of = np.repeat(np.arange(rhs.size), np.diff(indptr))
        order = np.argsort(indices, kind="stable")
        bounds = np.searchsorted(indices[order], np.arange(n + 1))
        self._by_var = [
            (row_of[order[bounds[i] : bounds[i + 1]]], coefs[order[bounds[i] : bounds[i + 1]]])
            for i in range(n)
        ]

    def residuals(self, x: np.ndarray) -> np.ndarray:
        dots = np.add.reduceat(self.coefs * x[self.indices], self.indptr[:-1])
        return dots - self.rhs

    def project(self, x: np.ndarray) -> float:
        return kern.ball_project(
            x, self.indptr, self.indices, self.coefs, self.rhs, self.nrm2, self.ptol, 64
        )

    def tighten(self, x: np.ndarray) -> None:
        for _ in range(2):
            sigma = self.residuals(x)
            changed = 0.0
            for i in range(self.n):
                rows_i, coef_i = self._by_var[i]
                if rows_i.size == 0:
                    drop = x[i]
                else:
                    drop = min(x[i], float(np.min(sigma[rows_i] / coef_i)))
                if drop > 0.0:
                    x[i] -= drop
                    sigma[rows_i] -= coef_i * drop
                    changed = max(changed, drop)
            if changed <= self.ptol:
                break

    exchange = None

    def new_dual(self):
        return np.zeros(self.rhs.size), np.zeros(self.n)

    def dual_sweep(self, mu, a, x, lam) -> float:
        return kern.ball_dual_sweep(
            mu, a, x, self.indptr, self.indices, self.coefs, self.rhs, self.w, self.pv, lam
        )

    def dual_value(self, mu, a, x, lam) -> float:
        phi = float(np.sum(self.w * (x / lam) ** self.pv))
        return phi - float(a @ x) + float(mu @ self.rhs)

    def primal_from_dual(self, a, lam) -> np.ndarray:
        return _psi_vec(a, self.w, self.pv, lam)


def _polish(w, pv, x, norm, system, ntol) -> float:
    """Alternate tighten/exchange moves until the norm stops improving."""
    for _ in range(8):
        if system.exchange is not None and norm > 0:
            system.exchange(x, norm)
            system.project(x)
        system.tighten(x)
        new = _vlp_norm_raw(w, pv, x, ntol)
        if new >= norm * (1.0 - 1e-13):
            return min(new, norm)
        norm = new
    return norm


def _decide_level_dual(w, pv, lam, system, mu, a, sweep_cap):
    """Certified feasibility of level lam via dual ascent.

    Returns (+1, feasible point), (-1, None) for certified infeasible, or
    (0, best restored point or None) when undecided at the sweep cap."""
    x = system.primal_from_dual(a, lam)
    best = None
    for sweep in range(sweep_cap):
        delta = system.dual_sweep(mu, a, x, lam)
        dval = system.dual_value(mu, a, x, lam)
        if np.isfinite(dval) and dval > 1.0 + 1e-15:
            return -1, None
        converged = delta <= 1e-13 * max(1.0, float(np.max(mu)) if mu.size else 0.0)
        if sweep % 2 == 1 or converged or sweep == sweep_cap - 1:
            y = x.copy()
            system.project(y)
            if _modular_raw(w, pv, y, lam) <= 1.0:
                return 1, y
            best = y
        if converged:
            return 0, best
    return 0, best


def _decide_level_pgd(w, pv, lam, x, system, cap):
    """Projected-descent fallback for p- = 1 (feasible answers only)."""
    m = _modular_raw(w, pv, x, lam)
    if m <= 1.0:
        return 1, x
    if float(np.max(x)) == 0.0:
        return -1, x
    grad = w * pv * (x / lam) ** (pv - 1.0) / lam
    eta = 0.25 * float(np.max(x)) / max(float(np.max(grad)), 1e-300)
    fails = 0
    for _ in range(cap):
        y = x - eta * grad
        np.maximum(y, 0.0, out=y)
        system.project(y)
        my = _modular_raw(w, pv, y, lam)
        if my < m * (1.0 - 1e-14):
            x, m = y, my
            if m <= 1.0:
                return 1, x
            grad = w * pv * (x / lam) ** (pv - 1.0) / lam
            eta *= 1.3
            fails = 0
        else:
            eta *= 0.4
            fails += 1
            if fails > 50:
                break
    return 0, x


def luxemburg_min(
    w: np.ndarray,
    pv: np.ndarray,
    seeds,
    system,
    tol: float,
    inner_cap: int = 400,
    bisect_cap: int = 200,
    lower_bound: float = 0.0,
) -> PolyhedronSolve:
    """Minimize the Luxemburg norm over the system's polyhedron, to rel. tol.

    ``seeds`` are candidate starting points; each is restored to feasibility
    and tightened, and the best bounds the search from above, so the result
    never exceeds the best seed's norm.  ``lower_bound`` may carry a proven
    lower bound for the optimal norm."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    ntol = min(tol * 0.1, 1e-10)
    witness = None
    wnorm = np.inf
    for seed in seeds:
        x = np.array(seed, dtype=np.float64, copy=True)
        np.maximum(x, 0.0, out=x)
        system.project(x)
        system.tighten(x)
        nx = _vlp_norm_raw(w, pv, x, ntol)
        if nx < wnorm:
            witness, wnorm = x, nx
    if witness is None:
        raise ValueError("at least one seed is required")
    if wnorm == 0.0:
        return PolyhedronSolve(witness, 0.0, 0, True)
    wnorm = _polish(w, pv, witness, wnorm, system, ntol)
    use_dual = float(np.min(pv)) > 1.0
    if use_dual:
        mu, a = system.new_dual()
    lo = min(lower_bound, wnorm)
    ub = wnorm
    its = 0
    while (ub - lo) > tol * ub and its < bisect_cap:
        its += 1
        mid = 0.5 * (lo + ub)
        if use_dual:
            status, y = _decide_level_dual(w, pv, mid, system, mu, a, inner_cap)
        else:
            status, y = _decide_level_pgd(w, pv, mid, witness.copy(), system, inner_cap)
        if status == 1:
            system.tighten(y)
            ny = _vlp_norm_raw(w, pv, y, ntol)
            ny = _polish(w, pv, y, ny, system, ntol)
            if ny < wnorm:
                witness, wnorm = y, ny
            ub = min(mid, wnorm)
        else:
            if status == 0 and y is not None:
                # undecided: the restored iterate may still improve the witness
                system.tighten(y)
                ny = _vlp_norm_raw(w, pv, y, ntol)
                if ny < wnorm:
                    witness, wnorm = y, ny
                    ub = min(ub, wnorm)
            lo = mid
    wnorm = _polish(w, pv, witness, wnorm, system, ntol)
    return PolyhedronSolve(witness, wnorm, its, (ub - lo) <= tol * ub)

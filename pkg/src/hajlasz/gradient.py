"""Fractional pointwise gradients and the smoothness norm built on them.

A nonnegative field g is an s-order gradient of f when
|f(x) - f(y)| <= dist(x, y)**s * (g(x) + g(y)) for every pair; on a finite
space with strictly positive weights "almost every pair" means every pair.
The pairwise bound c_xy = |f(x) - f(y)| / dist(x, y)**s is precomputed as a
symmetric matrix; pairs with equal f-values impose no constraint.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._solver import PairSystem, luxemburg_min
from .exponent import ExponentField
from .lebesgue import FunctionField, vlp_norm
from .space import FiniteSpace

__all__ = [
    "GradientCertificate",
    "SolverError",
    "is_gradient",
    "canonical_gradient",
    "minimal_gradient",
    "sobolev_norm",
]

FEAS_TOL = 1e-12


@dataclass(frozen=True)
class GradientCertificate:
    """Candidate gradient with its validity verdict, worst slack, and norm.

    ``slack`` is the minimum over pairs of g(x) + g(y) - c_xy (0.0 when the
    space has a single point); ``norm`` is the variable Lebesgue norm of g,
    NaN when no exponent field was supplied to fill it.
    """

    g: FunctionField
    valid: bool
    slack: float
    norm: float


class SolverError(RuntimeError):
    """Norm minimization failed to converge; carries the best feasible iterate."""

    def __init__(self, message: str, best: GradientCertificate | None = None):
        super().__init__(message)
        self.best = best


def _pair_bounds(space: FiniteSpace, f: FunctionField, s: float) -> np.ndarray:
    """Symmetric matrix c_xy = |f(x)-f(y)| / dist(x,y)**s, zero diagonal."""
    n = space.n
    c = np.zeros((n, n))
    if n > 1:
        off = ~np.eye(n, dtype=bool)
        c[off] = np.abs(f.values[:, None] - f.values[None, :])[off] / space.dist[off] ** s
    return c


def _constraints(cmat: np.ndarray):
    ii, jj = np.triu_indices(cmat.shape[0], k=1)
    cc = cmat[ii, jj]
    keep = cc > 0.0
    return ii[keep].astype(np.intp), jj[keep].astype(np.intp), cc[keep]


def is_gradient(
    space: FiniteSpace,
    f: FunctionField,
    g: FunctionField,
    s: float,
    p: ExponentField | None = None,
    tol: float = 1e-10,
) -> GradientCertificate:
    """Check the pairwise gradient inequality exactly and fill the slack.

    valid <=> slack >= -1e-12 and g >= 0 entrywise.  The norm field is
    populated when an exponent field is given.
    """
    if f.n != space.n or g.n != space.n:
        raise ValueError("field not aligned with space")
    if not s > 0:
        raise ValueError("s must be positive")
    cmat = _pair_bounds(space, f, s)
    slack = _slack_of(cmat, g)
    valid = bool(slack >= -FEAS_TOL and np.all(g.values >= 0.0))
    norm = vlp_norm(space, p, g, tol) if p is not None else float("nan")
    return GradientCertificate(g=g, valid=valid, slack=slack, norm=norm)


def canonical_gradient(space: FiniteSpace, f: FunctionField, s: float) -> FunctionField:
    """g0(x) = max_y c_xy / 2: always a valid gradient, never the zero field
    unless f is constant."""
    if f.n != space.n:
        raise ValueError("function field not aligned with space")
    if not s > 0:
        raise ValueError("s must be positive")
    if space.n == 1:
        return FunctionField(np.zeros(1))
    cmat = _pair_bounds(space, f, s)
    return FunctionField(0.5 * np.max(cmat, axis=1))


def minimal_gradient(
    space: FiniteSpace,
    p: ExponentField,
    f: FunctionField,
    s: float,
    tol: float = 1e-6,
    seeds: list[FunctionField] | None = None,
    inner_cap: int = 400,
    bisect_cap: int = 200,
) -> GradientCertificate:
    """Gradient of (approximately) least variable Lebesgue norm.

    Outer bisection on the norm level; each level is decided by cyclic
    dual-coordinate ascent on the modular over the constraint polyhedron
    (certified bounds from both sides when p- > 1).  The canonical gradient
    (and any extra ``seeds``, each restored to feasibility) bound the search
    from above, so the returned certificate is always valid and its norm
    never exceeds the best seed's.  Raises SolverError (carrying the best
    feasible certificate) if the bisection budget is exhausted before
    reaching ``tol``.
    """
    if p.n != space.n or f.n != space.n:
        raise ValueError("field not aligned with space")
    if not s > 0:
        raise ValueError("s must be positive")
    if not tol > 0:
        raise ValueError("tol must be positive")
    n = space.n
    cmat = _pair_bounds(space, f, s)
    ii, jj, cc = _constraints(cmat)
    if cc.size == 0:
        zero = FunctionField(np.zeros(n))
        return GradientCertificate(g=zero, valid=True, slack=_slack_of(cmat, zero), norm=0.0)

    system = PairSystem(n, ii, jj, cc, space.weight, p.values)
    seed_arrays = [canonical_gradient(space, f, s).values]
    for extra in seeds or []:
        if extra.n != n:
            raise ValueError("seed not aligned with space")
        seed_arrays.append(extra.values)

    # Any feasible g has g_i <= lam * w_i**(-1/p_i), giving a proven lower
    # bound on the achievable norm level per constraint.
    wcap = space.weight ** (-1.0 / p.values)
    lb = float(np.max(cc / (wcap[ii] + wcap[jj])))

    res = luxemburg_min(
        space.weight,
        p.values,
        seed_arrays,
        system,
        tol,
        inner_cap=inner_cap,
        bisect_cap=bisect_cap,
        lower_bound=lb,
    )
    g = FunctionField(res.x)
    cert = GradientCertificate(
        g=g, valid=True, slack=_slack_of(cmat, g), norm=res.norm
    )
    if not res.converged:
        raise SolverError(
            f"minimal_gradient did not converge in {res.bisections} bisections", cert
        )
    return cert


def _slack_of(cmat: np.ndarray, g: FunctionField) -> float:
    n = cmat.shape[0]
    if n < 2:
        return 0.0
    iu = np.triu_indices(n, k=1)
    return float(np.min(g.values[iu[0]] + g.values[iu[1]] - cmat[iu]))


def sobolev_norm(
    space: FiniteSpace,
    p: ExponentField,
    f: FunctionField,
    s: float,
    tol: float = 1e-6,
    seeds: list[FunctionField] | None = None,
) -> float:
    """||f||_{p(.)} plus the minimal gradient norm."""
    base = vlp_norm(space, p, f, min(tol * 0.1, 1e-10))
    return base + minimal_gradient(space, p, f, s, tol, seeds=seeds).norm

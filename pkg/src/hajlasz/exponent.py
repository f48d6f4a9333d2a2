"""Variable exponent fields p(.) and measured log-Holder constants.

On a finite space every exponent field is log-Holder continuous with some
finite constant, so the module measures constants instead of classifying:
small C_log relative to p+ - p- is the qualitative regime in which the
maximal-operator machinery behaves like the constant-exponent case.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .space import FiniteSpace

__all__ = ["ExponentField", "exponent_range", "log_holder_estimate", "optimal_p_inf"]


@dataclass(frozen=True)
class ExponentField:
    """Per-point exponent values in [1, inf) plus a basepoint index."""

    values: np.ndarray
    basepoint: int = 0

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=np.float64, copy=True)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("exponent values must be a nonempty vector")
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite exponent value")
        if np.any(v < 1.0):
            raise ValueError("exponent value below 1")
        if not 0 <= self.basepoint < v.size:
            raise ValueError("basepoint out of range")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def p_minus(self) -> float:
        return float(np.min(self.values))

    @property
    def p_plus(self) -> float:
        return float(np.max(self.values))


def exponent_range(p: ExponentField) -> tuple[float, float]:
    """(p-, p+): exact min and max of the field."""
    return p.p_minus, p.p_plus


def _check_aligned(space: FiniteSpace, p: ExponentField) -> None:
    if p.n != space.n:
        raise ValueError("exponent field not aligned with space")


def log_holder_estimate(
    space: FiniteSpace, p: ExponentField, p_inf: float | None = None
) -> tuple[float, float]:
    """Measured log-Holder constants (C_log, C_inf).

    C_log = max over pairs x != y of |p(x)-p(y)| * log(e + 1/dist(x,y));
    C_inf = max over x of |p(x)-p_inf| * log(e + dist(x, basepoint)).
    ``p_inf`` defaults to the value at the basepoint.
    """
    _check_aligned(space, p)
    v = p.values
    if p_inf is None:
        p_inf = float(v[p.basepoint])
    n = space.n
    c_log = 0.0
    if n > 1:
        iu = np.triu_indices(n, k=1)
        d = space.dist[iu]
        gaps = np.abs(v[iu[0]] - v[iu[1]])
        c_log = float(np.max(gaps * np.log(np.e + 1.0 / d)))
    c_inf = float(np.max(np.abs(v - p_inf) * np.log(np.e + space.dist[:, p.basepoint])))
    return c_log, c_inf


def optimal_p_inf(space: FiniteSpace, p: ExponentField) -> tuple[float, float]:
    """The p_inf minimizing C_inf, with the attained C_inf.

    C_inf(v) = max_x L_x * |p(x) - v| with L_x = log(e + dist(x, basepoint))
    is piecewise linear and convex in v; golden-section over [p-, p+] finds
    the minimizer to machine precision.
    """
    _check_aligned(space, p)
    L = np.log(np.e + space.dist[:, p.basepoint])
    vals = p.values

    def cost(v: float) -> float:
        return float(np.max(L * np.abs(vals - v)))

    lo, hi = p.p_minus, p.p_plus
    if hi - lo == 0:
        return lo, 0.0
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = cost(c), cost(d)
    for _ in range(200):
        if b - a <= 1e-14 * max(1.0, abs(hi)):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = cost(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = cost(d)
    v_star = 0.5 * (a + b)
    return float(v_star), cost(v_star)

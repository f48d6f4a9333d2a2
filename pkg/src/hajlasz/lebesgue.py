"""Variable-exponent modular and Luxemburg norm on finite spaces.

The modular rho(f, lam) = sum_i w_i (|f_i|/lam)**p_i is continuous and
strictly decreasing in lam whenever f is not identically zero, so the
Luxemburg norm (the infimum of lam with modular <= 1) is the unique root of
modular(f, lam) = 1 and is computed by bracketed bisection.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exponent import ExponentField
from .space import FiniteSpace

__all__ = [
    "FunctionField",
    "modular",
    "vlp_norm",
    "check_power_identity",
    "check_embedding",
]


@dataclass(frozen=True)
class FunctionField:
    """Per-point real values aligned with a FiniteSpace."""

    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=np.float64, copy=True)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("function values must be a nonempty vector")
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite function value")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size


def _aligned(space: FiniteSpace, *fields) -> None:
    for fld in fields:
        if fld.n != space.n:
            raise ValueError("field not aligned with space")


def _modular_raw(w: np.ndarray, pv: np.ndarray, absf: np.ndarray, lam: float) -> float:
    return float(np.sum(w * (absf / lam) ** pv))


def _vlp_norm_raw(w: np.ndarray, pv: np.ndarray, absf: np.ndarray, tol: float) -> float:
    amax = float(np.max(absf))
    if amax == 0.0:
        return 0.0
    # Bracket the root of modular(lam) = 1.  Starting at max|f| keeps every
    # base |f_i|/lam <= 1 while growing hi; shrinking lo multiplies the
    # modular by at most 2**p+ per step past the last sub-1 value, so no
    # overflow occurs before the bracket closes.
    hi = amax
    while _modular_raw(w, pv, absf, hi) > 1.0:
        hi *= 2.0
    lo = hi / 2.0
    while _modular_raw(w, pv, absf, lo) < 1.0:
        hi = lo
        lo *= 0.5
    mid = 0.5 * (lo + hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        m = _modular_raw(w, pv, absf, mid)
        if m > 1.0:
            lo = mid
        else:
            hi = mid
        if (hi - lo) <= 0.25 * tol * hi and abs(m - 1.0) <= tol:
            break
    return mid


def modular(space: FiniteSpace, p: ExponentField, f: FunctionField, lam: float) -> float:
    """sum_i weight_i * (|f_i|/lam)**p_i for lam > 0."""
    _aligned(space, p, f)
    if not lam > 0:
        raise ValueError("lambda must be positive")
    return _modular_raw(space.weight, p.values, np.abs(f.values), lam)


def vlp_norm(space: FiniteSpace, p: ExponentField, f: FunctionField, tol: float = 1e-10) -> float:
    """Luxemburg norm of f: the lam > 0 with modular(f, lam) = 1; 0 for f = 0.

    Contract: the returned lam* satisfies modular(f, lam*(1+tol)) <= 1 and the
    final bisection bracket has relative width <= tol.
    """
    _aligned(space, p, f)
    if not tol > 0:
        raise ValueError("tol must be positive")
    return _vlp_norm_raw(space.weight, p.values, np.abs(f.values), tol)


def check_power_identity(
    space: FiniteSpace,
    p: ExponentField,
    f: FunctionField,
    s: float,
    tol: float = 1e-10,
) -> tuple[float, float]:
    """Both sides of || |f|^s ||_{p(.)} = ||f||_{s p(.)}^s, by independent solves.

    Requires s * p- >= 1 so the rescaled exponent stays admissible.  The two
    sides are computed through separate bisections; the caller asserts
    |lhs - rhs| <= tol_check * rhs.
    """
    _aligned(space, p, f)
    if s * p.p_minus < 1.0:
        raise ValueError("s * p_minus must be >= 1")
    lhs = vlp_norm(space, p, FunctionField(np.abs(f.values) ** s), tol)
    rhs = vlp_norm(space, ExponentField(s * p.values, p.basepoint), f, tol) ** s
    return lhs, rhs


def check_embedding(
    space: FiniteSpace,
    p: ExponentField,
    q: ExponentField,
    u: FunctionField,
    tol: float = 1e-10,
) -> tuple[float, float]:
    """(||u||_{p(.)}, ||u||_{q(.)}) for pointwise p <= q.

    The constant-free comparison lhs <= rhs is the mu(X) <= 1 regime (it is
    exact for constant exponents on probability measures by Jensen); for
    variable exponents it can fail by a bounded factor, so this returns the
    pair and leaves any assertion to the caller.
    """
    _aligned(space, p, q, u)
    if np.any(p.values > q.values):
        raise ValueError("embedding requires p <= q pointwise")
    return vlp_norm(space, p, u, tol), vlp_norm(space, q, u, tol)

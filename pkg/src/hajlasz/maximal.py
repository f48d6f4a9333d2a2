"""Maximal functionals: Hardy-Littlewood, oscillation (sharp) family, minimal h.

Two scan families are kept deliberately distinct:

* the oscillation functionals scan *centered* balls B(x, r) over the positive
  candidate radii at x;
* ``hl_maximal`` and ``minimal_h`` scan *all* balls containing x, i.e. every
  (center, candidate radius) pair whose closed ball holds x.

Zero-radius balls contribute the point's own value to the Hardy-Littlewood
maximal function and 0 to every oscillation functional (the oscillation over
a singleton vanishes, so no division by r**s ever happens at r = 0).
"""
from __future__ import annotations

import numpy as np

from . import _kernels as kern
from .lebesgue import FunctionField
from .space import FiniteSpace

__all__ = ["hl_maximal", "sharp_maximal", "tilde_sharp", "overline_sharp", "minimal_h"]


def _prep(space: FiniteSpace, f: FunctionField):
    if f.n != space.n:
        raise ValueError("function field not aligned with space")
    order = np.argsort(space.dist, axis=1, kind="stable").astype(np.intp)
    return space.dist, order, space.weight, f.values


def _check_us(u: float | None, s: float | None) -> None:
    if u is not None and not u >= 1.0:
        raise ValueError("u must be >= 1")
    if s is not None and not s > 0.0:
        raise ValueError("s must be positive")


def hl_maximal(space: FiniteSpace, f: FunctionField) -> FunctionField:
    """M f(x): sup over all balls containing x of the ball average of |f|."""
    dist, order, w, fv = _prep(space, f)
    return FunctionField(kern.ball_scan_hl(dist, order, w, fv))


def sharp_maximal(space: FiniteSpace, f: FunctionField, u: float, s: float) -> FunctionField:
    """Fractional sharp maximal function: sup over centered balls B(x, r) of
    r**-s * (avg_B |f - f_B|^u)**(1/u), f_B the weighted ball mean."""
    _check_us(u, s)
    dist, order, w, fv = _prep(space, f)
    return FunctionField(kern.ball_scan_sharp(dist, order, w, fv, float(u), float(s), 0))


def tilde_sharp(space: FiniteSpace, f: FunctionField, u: float, s: float) -> FunctionField:
    """Sharp variant with f_B replaced by the best constant on each ball:
    weighted median for u=1, mean for u=2, 1-D convex search otherwise."""
    _check_us(u, s)
    dist, order, w, fv = _prep(space, f)
    return FunctionField(kern.ball_scan_sharp(dist, order, w, fv, float(u), float(s), 1))


def overline_sharp(space: FiniteSpace, f: FunctionField, u: float, s: float) -> FunctionField:
    """Sharp variant with the deviation taken against the center value f(x)."""
    _check_us(u, s)
    dist, order, w, fv = _prep(space, f)
    return FunctionField(kern.ball_scan_sharp(dist, order, w, fv, float(u), float(s), 2))


def minimal_h(space: FiniteSpace, f: FunctionField, s: float) -> FunctionField:
    """The pointwise-least h with |f(x) - f_B| <= r(B)**s h(x) for every ball
    B containing x with r(B) > 0.  Any admissible h dominates this one."""
    _check_us(None, s)
    dist, order, w, fv = _prep(space, f)
    return FunctionField(kern.ball_scan_minh(dist, order, w, fv, float(s)))

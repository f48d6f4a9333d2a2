"""Fixture generation: grids, snowflaked quasi-metrics, random clouds, exponents.

Generated spaces are normalized to total measure 1 so that constant-free
norm comparisons on probability-like measures are well posed.  The random
cloud generator uses numpy's default_rng, so a fixed seed reproduces the
space bit for bit.
"""
from __future__ import annotations

import numpy as np

from .exponent import ExponentField
from .space import FiniteSpace

__all__ = ["gen_grid", "gen_random_cloud", "gen_exponent"]


def _cloud_space(coords: np.ndarray, beta: float, weight: np.ndarray) -> FiniteSpace:
    diff = coords[:, None, :] - coords[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=-1))
    if beta != 1.0:
        dist = dist**beta
    n = coords.shape[0]
    return FiniteSpace(
        dist=dist,
        weight=weight,
        label=tuple(str(i) for i in range(n)),
        coords=coords,
        snowflake_beta=beta,
    )


def gen_grid(dim: int, side: int, beta: float = 1.0) -> FiniteSpace:
    """Uniform grid on [0,1]**dim with side**dim points, measure 1/side**dim
    per point, and metric |x-y|_2**beta.  For beta > 1 this is a genuine
    quasi-metric with triangle constant at most 2**(beta-1)."""
    if dim not in (1, 2):
        raise ValueError("invalid dim (must be 1 or 2)")
    if side < 2:
        raise ValueError("side must be >= 2")
    if not beta >= 1.0:
        raise ValueError("beta must be >= 1")
    axis = np.linspace(0.0, 1.0, side)
    if dim == 1:
        coords = axis[:, None]
    else:
        xx, yy = np.meshgrid(axis, axis, indexing="ij")
        coords = np.column_stack([xx.ravel(), yy.ravel()])
    n = coords.shape[0]
    return _cloud_space(coords, float(beta), np.full(n, 1.0 / n))


def gen_random_cloud(n: int, dim: int, seed: int) -> FiniteSpace:
    """n i.i.d. uniform points in [0,1]**dim with Euclidean metric and
    measure 1/n per point; deterministic for a fixed seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rng = np.random.default_rng(seed)
    coords = rng.random((n, dim))
    return _cloud_space(coords, 1.0, np.full(n, 1.0 / n))


def gen_exponent(space: FiniteSpace, kind: str, **params) -> ExponentField:
    """Exponent fields that are log-Holder by construction.

    kind="constant": params c (value), basepoint.
    kind="affine":   c0 + c1 * xi, xi the first coordinate when the space
                     carries coordinates and the point index otherwise;
                     optional lo/hi clip bounds.
    kind="bump":     base + height * exp(-(dist(x, basepoint)/width)**2).

    Values below 1 are rejected.
    """
    basepoint = int(params.pop("basepoint", 0))
    n = space.n
    if kind == "constant":
        c = float(params.pop("c"))
        values = np.full(n, c)
    elif kind == "affine":
        c0 = float(params.pop("c0"))
        c1 = float(params.pop("c1"))
        if space.coords is not None:
            xi = space.coords[:, 0]
        else:
            xi = np.arange(n, dtype=np.float64)
        values = c0 + c1 * xi
        lo = params.pop("lo", None)
        hi = params.pop("hi", None)
        if lo is not None or hi is not None:
            values = np.clip(values, lo, hi)
    elif kind == "bump":
        base = float(params.pop("base"))
        height = float(params.pop("height"))
        width = float(params.pop("width"))
        if not width > 0:
            raise ValueError("width must be positive")
        d = space.dist[:, basepoint]
        values = base + height * np.exp(-((d / width) ** 2))
    else:
        raise ValueError(f"unknown exponent kind: {kind!r}")
    if params:
        raise ValueError(f"unused parameters for kind {kind!r}: {sorted(params)}")
    return ExponentField(values=values, basepoint=basepoint)

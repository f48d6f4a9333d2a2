"""Pure numpy implementations of the hot kernels.

Semantics match the compiled extension (`_ckern`) operation for operation;
the compiled module is preferred at import time when present.  All ball
scans walk, per center, the points in distance order and visit each distinct
closed ball exactly once.
"""
from __future__ import annotations

import numpy as np


def _group_ends(dsort: np.ndarray) -> np.ndarray:
    """Indices of the last member of each distinct-radius group."""
    n = dsort.shape[0]
    if n == 1:
        return np.array([0], dtype=np.intp)
    idx = np.flatnonzero(np.diff(dsort) != 0)
    return np.append(idx, n - 1).astype(np.intp)


def _golden_min_dev(vals: np.ndarray, ws: np.ndarray, u: float) -> float:
    """min_c sum_i ws_i |vals_i - c|**u by golden section on [min, max]."""
    a = float(np.min(vals))
    b = float(np.max(vals))
    width0 = b - a
    if width0 == 0.0:
        return 0.0

    def cost(c: float) -> float:
        return float(np.sum(ws * np.abs(vals - c) ** u))

    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = cost(c), cost(d)
    for _ in range(200):
        if (b - a) <= 1e-12 * width0:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = cost(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = cost(d)
    return cost(0.5 * (a + b))


def ball_scan_sharp(
    dist: np.ndarray,
    order: np.ndarray,
    w: np.ndarray,
    f: np.ndarray,
    u: float,
    s: float,
    mode: int,
) -> np.ndarray:
    """Centered-ball oscillation sup: r**-s * (avg_B |f - ref|^u)**(1/u).

    mode 0: ref = weighted ball mean; mode 1: ref = best constant (weighted
    median for u=1, mean for u=2, golden section otherwise); mode 2: ref =
    value at the center.  Zero-radius balls contribute 0.
    """
    n = dist.shape[0]
    out = np.zeros(n)
    for x in range(n):
        o = order[x]
        dsort = dist[x][o]
        wsort = w[o]
        fsort = f[o]
        cw = np.cumsum(wsort)
        cwf = np.cumsum(wsort * fsort)
        pmn = np.minimum.accumulate(fsort)
        pmx = np.maximum.accumulate(fsort)
        best = 0.0
        for e in _group_ends(dsort):
            r = dsort[e]
            if r <= 0.0:
                continue
            if pmn[e] == pmx[e]:  # f constant on the ball: oscillation is 0
                continue
            m = e + 1
            W = cw[e]
            mem_w = wsort[:m]
            mem_f = fsort[:m]
            if mode == 2:
                acc = float(np.sum(mem_w * np.abs(mem_f - f[x]) ** u))
            elif mode == 1 and u == 1.0:
                vo = np.argsort(mem_f, kind="stable")
                vals = mem_f[vo]
                ws_ = mem_w[vo]
                cws = np.cumsum(ws_)
                t = int(np.searchsorted(cws, 0.5 * W, side="left"))
                c0 = vals[min(t, m - 1)]
                acc = float(np.sum(ws_ * np.abs(vals - c0)))
            elif mode == 1 and u != 2.0:
                acc = _golden_min_dev(mem_f, mem_w, u)
            else:
                fb = cwf[e] / W
                acc = float(np.sum(mem_w * np.abs(mem_f - fb) ** u))
            dev = (acc / W) ** (1.0 / u)
            val = dev / r**s
            if val > best:
                best = val
        out[x] = best
    return out


def ball_scan_hl(
    dist: np.ndarray, order: np.ndarray, w: np.ndarray, f: np.ndarray
) -> np.ndarray:
    """Hardy-Littlewood maximal function over all (center, radius) balls."""
    n = dist.shape[0]
    out = np.zeros(n)
    af = np.abs(f)
    for c in range(n):
        o = order[c]
        dsort = dist[c][o]
        cw = np.cumsum(w[o])
        cwa = np.cumsum(w[o] * af[o])
        ends = _group_ends(dsort)
        avgs = cwa[ends] / cw[ends]
        smax = np.maximum.accumulate(avgs[::-1])[::-1]
        start = 0
        for t, e in enumerate(ends):
            mem = o[start : e + 1]
            out[mem] = np.maximum(out[mem], smax[t])
            start = e + 1
    return out


def ball_scan_minh(
    dist: np.ndarray, order: np.ndarray, w: np.ndarray, f: np.ndarray, s: float
) -> np.ndarray:
    """Pointwise-least h with |f(x) - mean_B f| <= r(B)**s h(x) over balls containing x."""
    n = dist.shape[0]
    out = np.zeros(n)
    for c in range(n):
        o = order[c]
        dsort = dist[c][o]
        fsort = f[o]
        cw = np.cumsum(w[o])
        cwf = np.cumsum(w[o] * fsort)
        pmn = np.minimum.accumulate(fsort)
        pmx = np.maximum.accumulate(fsort)
        for e in _group_ends(dsort):
            r = dsort[e]
            if r <= 0.0:
                continue
            if pmn[e] == pmx[e]:
                continue
            fb = cwf[e] / cw[e]
            mem = o[: e + 1]
            cand = np.abs(f[mem] - fb) / r**s
            out[mem] = np.maximum(out[mem], cand)
    return out


def pair_project(
    g: np.ndarray,
    ii: np.ndarray,
    jj: np.ndarray,
    cc: np.ndarray,
    tol: float,
    max_sweeps: int,
) -> float:
    """Restore g >= 0 and g_i + g_j >= c by cyclic half-space corrections.

    Corrections only increase coordinates, so feasibility is reached after
    one Gauss-Seidel sweep up to float dust; sweeps repeat until the largest
    violation is <= tol.  Returns the final largest violation (in-place g).
    """
    np.maximum(g, 0.0, out=g)
    if cc.size == 0:
        return 0.0
    maxv = np.inf
    for _ in range(max_sweeps):
        stale = cc - g[ii] - g[jj]
        maxv = float(np.max(stale))
        if maxv <= tol:
            break
        for k in np.flatnonzero(stale > 0.0):
            v = cc[k] - g[ii[k]] - g[jj[k]]
            if v > 0.0:
                h = 0.5 * v
                g[ii[k]] += h
                g[jj[k]] += h
    return max(maxv, 0.0)


def ball_project(
    psi: np.ndarray,
    indptr: np.ndarray,
    indices: np.ndarray,
    coefs: np.ndarray,
    rhs: np.ndarray,
    nrm2: np.ndarray,
    tol: float,
    max_sweeps: int,
) -> float:
    """Restore psi >= 0 and a_B . psi >= rhs_B for CSR-encoded averages."""
    np.maximum(psi, 0.0, out=psi)
    if rhs.size == 0:
        return 0.0
    maxv = np.inf
    for _ in range(max_sweeps):
        dots = np.add.reduceat(coefs * psi[indices], indptr[:-1])
        stale = rhs - dots
        maxv = float(np.max(stale))
        if maxv <= tol:
            break
        for k in np.flatnonzero(stale > 0.0):
            sl = slice(indptr[k], indptr[k + 1])
            idx = indices[sl]
            a = coefs[sl]
            v = rhs[k] - float(a @ psi[idx])
            if v > 0.0:
                psi[idx] += a * (v / nrm2[k])
    return max(maxv, 0.0)


def pair_exchange(
    g: np.ndarray,
    ii: np.ndarray,
    jj: np.ndarray,
    cc: np.ndarray,
    cmat: np.ndarray,
    w: np.ndarray,
    pv: np.ndarray,
    lam: float,
) -> float:
    """One cyclic pass of exact 1-D re-splits along pair constraints.

    For each constraint the joint mass g_i + g_j is redistributed to minimize
    w_i (g_i/lam)**p_i + w_j (g_j/lam)**p_j subject to the floors imposed by
    every other constraint, so feasibility is preserved exactly.  Returns the
    total movement applied.
    """
    total = 0.0
    neg_inf = -np.inf
    for k in range(cc.size):
        i = int(ii[k])
        j = int(jj[k])
        S = g[i] + g[j]
        if S < cc[k]:
            S = cc[k]
        tmp = cmat[i] - g
        tmp[j] = neg_inf
        lo_i = max(0.0, float(np.max(tmp)))
        tmp = cmat[j] - g
        tmp[i] = neg_inf
        lo_j = max(0.0, float(np.max(tmp)))
        lo_x, hi_x = lo_i, S - lo_j
        if hi_x <= lo_x:
            continue

        pi, pj = pv[i], pv[j]
        if pi == 2.0 and pj == 2.0:
            x = S * w[j] / (w[i] + w[j])
        else:

            def cost(x_):
                return w[i] * (x_ / lam) ** pi + w[j] * ((S - x_) / lam) ** pj

            a, b = lo_x, hi_x
            invphi = (np.sqrt(5.0) - 1.0) / 2.0
            c1 = b - invphi * (b - a)
            d1 = a + invphi * (b - a)
            fc, fd = cost(c1), cost(d1)
            for _ in range(80):
                if (b - a) <= 1e-13 * max(1.0, hi_x - lo_x):
                    break
                if fc < fd:
                    b, d1, fd = d1, c1, fc
                    c1 = b - invphi * (b - a)
                    fc = cost(c1)
                else:
                    a, c1, fc = c1, d1, fd
                    d1 = a + invphi * (b - a)
                    fd = cost(d1)
            x = 0.5 * (a + b)
        x = min(max(x, lo_x), hi_x)
        old = g[i]
        new_cost = w[i] * (x / lam) ** pv[i] + w[j] * ((S - x) / lam) ** pv[j]
        cur_cost = w[i] * (g[i] / lam) ** pv[i] + w[j] * (g[j] / lam) ** pv[j]
        if new_cost < cur_cost:
            g[i] = x
            g[j] = S - x
            total += abs(x - old)
    return total


def _psi(a: float, w: float, p: float, lam: float) -> float:
    """argmin_{t>=0} of w (t/lam)**p - a t, for p > 1 (zero for a <= 0)."""
    if a <= 0.0:
        return 0.0
    if p == 2.0:
        return a * lam * lam / (2.0 * w)
    arg = np.log(a * lam / (w * p)) / (p - 1.0)
    if arg > 690.0:
        return 1e300
    return lam * np.exp(arg)


def _dual_root(avals, coefs, ws, ps, lam, rhs, mu_k):
    """Solve sum_t coefs_t psi(avals_t + coefs_t d) = rhs for d >= -mu_k.

    F is increasing in d; safeguarded Newton inside a bracket.  The residual
    at d = 0 is checked first so converged constraints cost one evaluation.
    """
    def F(d):
        return (
            sum(c * _psi(a + c * d, w, p, lam) for a, c, w, p in zip(avals, coefs, ws, ps))
            - rhs
        )

    ftol = 1e-13 * max(1.0, abs(rhs))
    f0 = F(0.0)
    if abs(f0) <= ftol:
        return 0.0
    if f0 < 0.0:
        dlo = 0.0
        dhi = 1.0
        for _ in range(200):
            if F(dhi) > 0.0:
                break
            dhi = dhi * 2.0 + 1.0
        d = 0.0
    else:
        if mu_k <= 0.0:
            return 0.0
        dlo = -mu_k
        if F(dlo) >= 0.0:
            return dlo
        dhi = 0.0
        d = 0.5 * (dlo + dhi)
    for _ in range(80):
        fd = F(d)
        if abs(fd) <= ftol:
            return d
        if fd < 0.0:
            dlo = d
        else:
            dhi = d
        # derivative of F
        slope = 0.0
        for a, c, w, p in zip(avals, coefs, ws, ps):
            av = a + c * d
            if av > 0.0:
                base = av * lam / (w * p)
                expo = (2.0 - p) / (p - 1.0)
                slope += c * c * lam * lam / (w * p * (p - 1.0)) * base**expo
        if slope > 0.0 and np.isfinite(slope):
            step = d - fd / slope
        else:
            step = 0.5 * (dlo + dhi)
        if not dlo < step < dhi:
            step = 0.5 * (dlo + dhi)
        d = step
        if dhi - dlo <= 1e-15 * (1.0 + abs(d)):
            return d
    return d


def pair_dual_sweep(
    mu: np.ndarray,
    a: np.ndarray,
    g: np.ndarray,
    ii: np.ndarray,
    jj: np.ndarray,
    cc: np.ndarray,
    w: np.ndarray,
    pv: np.ndarray,
    lam: float,
) -> float:
    """One cyclic pass of exact dual-coordinate maximization over the pair
    constraints; maintains a = sum of multipliers per point and g = psi(a).
    Returns the largest multiplier move."""
    moved = 0.0
    for k in range(cc.size):
        i = int(ii[k])
        j = int(jj[k])
        d = _dual_root(
            (a[i], a[j]), (1.0, 1.0), (w[i], w[j]), (pv[i], pv[j]), lam, cc[k], mu[k]
        )
        if d != 0.0:
            mu[k] += d
            a[i] += d
            a[j] += d
            g[i] = _psi(a[i], w[i], pv[i], lam)
            g[j] = _psi(a[j], w[j], pv[j], lam)
            moved = max(moved, abs(d))
    return moved


def ball_dual_sweep(
    mu: np.ndarray,
    a: np.ndarray,
    psi: np.ndarray,
    indptr: np.ndarray,
    indices: np.ndarray,
    coefs: np.ndarray,
    rhs: np.ndarray,
    w: np.ndarray,
    pv: np.ndarray,
    lam: float,
) -> float:
    """Dual-coordinate sweep over CSR ball-average constraints."""
    moved = 0.0
    for k in range(rhs.size):
        sl = slice(indptr[k], indptr[k + 1])
        idx = indices[sl]
        cf = coefs[sl]
        d = _dual_root(a[idx], cf, w[idx], pv[idx], lam, rhs[k], mu[k])
        if d != 0.0:
            mu[k] += d
            a[idx] += cf * d
            for t, i in enumerate(idx):
                psi[i] = _psi(a[i], w[i], pv[i], lam)
            moved = max(moved, abs(d))
    return moved

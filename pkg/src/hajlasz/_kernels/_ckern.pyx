# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; semantics mirror _pykern operation for operation."""
import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, exp, fabs, log, pow, sqrt

cnp.import_array()


cdef inline double _dev_pow(double d, double u) noexcept nogil:
    if u == 1.0:
        return fabs(d)
    if u == 2.0:
        return d * d
    return pow(fabs(d), u)


cdef double _gs_cost(const double[::1] f, const double[::1] w, const cnp.intp_t[::1] o,
                     Py_ssize_t m, double u, double c) noexcept nogil:
    cdef Py_ssize_t j
    cdef double acc = 0.0
    for j in range(m):
        acc += w[o[j]] * pow(fabs(f[o[j]] - c), u)
    return acc


cdef double _golden_min(const double[::1] f, const double[::1] w, const cnp.intp_t[::1] o,
                        Py_ssize_t m, double u, double a, double b) noexcept nogil:
    cdef double width0 = b - a
    cdef double invphi = (sqrt(5.0) - 1.0) / 2.0
    cdef double c, d, fc, fd
    cdef int it
    if width0 == 0.0:
        return 0.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = _gs_cost(f, w, o, m, u, c)
    fd = _gs_cost(f, w, o, m, u, d)
    for it in range(200):
        if (b - a) <= 1e-12 * width0:
            break
        if fc < fd:
            b = d
            d = c
            fd = fc
            c = b - invphi * (b - a)
            fc = _gs_cost(f, w, o, m, u, c)
        else:
            a = c
            c = d
            fc = fd
            d = a + invphi * (b - a)
            fd = _gs_cost(f, w, o, m, u, d)
    return _gs_cost(f, w, o, m, u, 0.5 * (a + b))


def ball_scan_sharp(const double[:, ::1] dist, const cnp.intp_t[:, ::1] order,
                    const double[::1] w, const double[::1] f,
                    double u, double s, int mode):
    cdef Py_ssize_t n = dist.shape[0]
    out_arr = np.zeros(n)
    sv_arr = np.empty(n)
    sw_arr = np.empty(n)
    cdef double[::1] out = out_arr
    cdef double[::1] sv = sv_arr
    cdef double[::1] sw = sw_arr
    cdef const cnp.intp_t[::1] orow
    cdef Py_ssize_t x, k, m, j, t, idx, pos
    cdef double W, S, r, fb, dev, best, acc, pmn, pmx, fx, val, c0, cum, half, fi, wi
    for x in range(n):
        orow = order[x]
        best = 0.0
        W = 0.0
        S = 0.0
        pmn = INFINITY
        pmx = -INFINITY
        k = 0
        m = 0
        while k < n:
            r = dist[x, orow[k]]
            while k < n and dist[x, orow[k]] == r:
                idx = orow[k]
                fi = f[idx]
                wi = w[idx]
                W += wi
                S += wi * fi
                if fi < pmn:
                    pmn = fi
                if fi > pmx:
                    pmx = fi
                if mode == 1 and u == 1.0:
                    # insertion by value, stable (after entries <= fi)
                    pos = m
                    while pos > 0 and sv[pos - 1] > fi:
                        sv[pos] = sv[pos - 1]
                        sw[pos] = sw[pos - 1]
                        pos -= 1
                    sv[pos] = fi
                    sw[pos] = wi
                m += 1
                k += 1
            if r > 0.0 and pmn != pmx:
                if mode == 2:
                    fx = f[x]
                    acc = 0.0
                    for j in range(m):
                        acc += w[orow[j]] * _dev_pow(f[orow[j]] - fx, u)
                elif mode == 1 and u == 1.0:
                    half = 0.5 * W
                    cum = 0.0
                    t = 0
                    while t < m - 1:
                        cum += sw[t]
                        if cum >= half:
                            break
                        t += 1
                    c0 = sv[t]
                    acc = 0.0
                    for j in range(m):
                        acc += sw[j] * fabs(sv[j] - c0)
                elif mode == 1 and u != 2.0:
                    acc = _golden_min(f, w, orow, m, u, pmn, pmx)
                else:
                    fb = S / W
                    acc = 0.0
                    for j in range(m):
                        acc += w[orow[j]] * _dev_pow(f[orow[j]] - fb, u)
                dev = pow(acc / W, 1.0 / u)
                val = dev / pow(r, s)
                if val > best:
                    best = val
        out[x] = best
    return out_arr


def ball_scan_hl(const double[:, ::1] dist, const cnp.intp_t[:, ::1] order,
                 const double[::1] w, const double[::1] f):
    cdef Py_ssize_t n = dist.shape[0]
    out_arr = np.zeros(n)
    gavg_arr = np.empty(n)
    gend_arr = np.empty(n, dtype=np.intp)
    cdef double[::1] out = out_arr
    cdef double[::1] gavg = gavg_arr
    cdef cnp.intp_t[::1] gend = gend_arr
    cdef const cnp.intp_t[::1] orow
    cdef Py_ssize_t c, k, t, ngroups, j, start
    cdef double W, S, r, smax
    for c in range(n):
        orow = order[c]
        W = 0.0
        S = 0.0
        k = 0
        ngroups = 0
        while k < n:
            r = dist[c, orow[k]]
            while k < n and dist[c, orow[k]] == r:
                W += w[orow[k]]
                S += w[orow[k]] * fabs(f[orow[k]])
                k += 1
            gavg[ngroups] = S / W
            gend[ngroups] = k
            ngroups += 1
        smax = -INFINITY
        for t in range(ngroups - 1, -1, -1):
            if gavg[t] > smax:
                smax = gavg[t]
            gavg[t] = smax
        start = 0
        for t in range(ngroups):
            for j in range(start, gend[t]):
                if gavg[t] > out[orow[j]]:
                    out[orow[j]] = gavg[t]
            start = gend[t]
    return out_arr


def ball_scan_minh(const double[:, ::1] dist, const cnp.intp_t[:, ::1] order,
                   const double[::1] w, const double[::1] f, double s):
    cdef Py_ssize_t n = dist.shape[0]
    out_arr = np.zeros(n)
    cdef double[::1] out = out_arr
    cdef const cnp.intp_t[::1] orow
    cdef Py_ssize_t c, k, j, idx
    cdef double W, S, r, fb, rs, cand, pmn, pmx, fi
    for c in range(n):
        orow = order[c]
        W = 0.0
        S = 0.0
        pmn = INFINITY
        pmx = -INFINITY
        k = 0
        while k < n:
            r = dist[c, orow[k]]
            while k < n and dist[c, orow[k]] == r:
                idx = orow[k]
                fi = f[idx]
                W += w[idx]
                S += w[idx] * fi
                if fi < pmn:
                    pmn = fi
                if fi > pmx:
                    pmx = fi
                k += 1
            if r > 0.0 and pmn != pmx:
                fb = S / W
                rs = pow(r, s)
                for j in range(k):
                    idx = orow[j]
                    cand = fabs(f[idx] - fb) / rs
                    if cand > out[idx]:
                        out[idx] = cand
    return out_arr


def pair_project(double[::1] g, const cnp.intp_t[::1] ii, const cnp.intp_t[::1] jj,
                 const double[::1] cc, double tol, int max_sweeps):
    cdef Py_ssize_t K = cc.shape[0]
    cdef Py_ssize_t n = g.shape[0]
    cdef Py_ssize_t k
    cdef int sweep
    cdef double v, h, maxv
    for k in range(n):
        if g[k] < 0.0:
            g[k] = 0.0
    if K == 0:
        return 0.0
    maxv = INFINITY
    for sweep in range(max_sweeps):
        maxv = -INFINITY
        for k in range(K):
            v = cc[k] - g[ii[k]] - g[jj[k]]
            if v > maxv:
                maxv = v
        if maxv <= tol:
            break
        for k in range(K):
            v = cc[k] - g[ii[k]] - g[jj[k]]
            if v > 0.0:
                h = 0.5 * v
                g[ii[k]] += h
                g[jj[k]] += h
    return max(maxv, 0.0)


def ball_project(double[::1] psi, const cnp.intp_t[::1] indptr,
                 const cnp.intp_t[::1] indices, const double[::1] coefs,
                 const double[::1] rhs, const double[::1] nrm2,
                 double tol, int max_sweeps):
    cdef Py_ssize_t K = rhs.shape[0]
    cdef Py_ssize_t n = psi.shape[0]
    cdef Py_ssize_t k, t
    cdef int sweep
    cdef double v, dot, scale, maxv
    for k in range(n):
        if psi[k] < 0.0:
            psi[k] = 0.0
    if K == 0:
        return 0.0
    maxv = INFINITY
    for sweep in range(max_sweeps):
        maxv = -INFINITY
        for k in range(K):
            dot = 0.0
            for t in range(indptr[k], indptr[k + 1]):
                dot += coefs[t] * psi[indices[t]]
            v = rhs[k] - dot
            if v > maxv:
                maxv = v
        if maxv <= tol:
            break
        for k in range(K):
            dot = 0.0
            for t in range(indptr[k], indptr[k + 1]):
                dot += coefs[t] * psi[indices[t]]
            v = rhs[k] - dot
            if v > 0.0:
                scale = v / nrm2[k]
                for t in range(indptr[k], indptr[k + 1]):
                    psi[indices[t]] += coefs[t] * scale
    return max(maxv, 0.0)


cdef inline double _xch_cost(double wi, double wj, double pi, double pj,
                             double lam, double S, double x) noexcept nogil:
    return wi * pow(x / lam, pi) + wj * pow((S - x) / lam, pj)


def pair_exchange(double[::1] g, const cnp.intp_t[::1] ii, const cnp.intp_t[::1] jj,
                  const double[::1] cc, const double[:, ::1] cmat,
                  const double[::1] w, const double[::1] pv, double lam):
    cdef Py_ssize_t K = cc.shape[0]
    cdef Py_ssize_t n = g.shape[0]
    cdef Py_ssize_t k, i, j, l
    cdef double total = 0.0
    cdef double S, lo_i, lo_j, lo_x, hi_x, x, v, a, b, c1, d1, fc, fd, invphi
    cdef double new_cost, cur_cost, old
    cdef int it
    invphi = (sqrt(5.0) - 1.0) / 2.0
    for k in range(K):
        i = ii[k]
        j = jj[k]
        S = g[i] + g[j]
        if S < cc[k]:
            S = cc[k]
        lo_i = 0.0
        for l in range(n):
            if l != j:
                v = cmat[i, l] - g[l]
                if v > lo_i:
                    lo_i = v
        lo_j = 0.0
        for l in range(n):
            if l != i:
                v = cmat[j, l] - g[l]
                if v > lo_j:
                    lo_j = v
        lo_x = lo_i
        hi_x = S - lo_j
        if hi_x <= lo_x:
            continue
        if pv[i] == 2.0 and pv[j] == 2.0:
            x = S * w[j] / (w[i] + w[j])
        else:
            a = lo_x
            b = hi_x
            c1 = b - invphi * (b - a)
            d1 = a + invphi * (b - a)
            fc = _xch_cost(w[i], w[j], pv[i], pv[j], lam, S, c1)
            fd = _xch_cost(w[i], w[j], pv[i], pv[j], lam, S, d1)
            for it in range(80):
                if (b - a) <= 1e-13 * max(1.0, hi_x - lo_x):
                    break
                if fc < fd:
                    b = d1
                    d1 = c1
                    fd = fc
                    c1 = b - invphi * (b - a)
                    fc = _xch_cost(w[i], w[j], pv[i], pv[j], lam, S, c1)
                else:
                    a = c1
                    c1 = d1
                    fc = fd
                    d1 = a + invphi * (b - a)
                    fd = _xch_cost(w[i], w[j], pv[i], pv[j], lam, S, d1)
            x = 0.5 * (a + b)
        if x < lo_x:
            x = lo_x
        if x > hi_x:
            x = hi_x
        new_cost = _xch_cost(w[i], w[j], pv[i], pv[j], lam, S, x)
        cur_cost = _xch_cost(w[i], w[j], pv[i], pv[j], lam, S, g[i])
        if new_cost < cur_cost:
            old = g[i]
            g[i] = x
            g[j] = S - x
            total += fabs(x - old)
    return total


cdef inline double _psi_c(double a, double w, double p, double lam) noexcept nogil:
    cdef double arg
    if a <= 0.0:
        return 0.0
    if p == 2.0:
        return a * lam * lam / (2.0 * w)
    arg = log(a * lam / (w * p)) / (p - 1.0)
    if arg > 690.0:
        return 1e300
    return lam * exp(arg)


cdef inline double _dpsi_c(double a, double w, double p, double lam) noexcept nogil:
    cdef double base, expo
    if p == 2.0:
        return lam * lam / (2.0 * w)
    if a <= 0.0:
        return 0.0 if p < 2.0 else 1e300
    base = a * lam / (w * p)
    expo = (2.0 - p) / (p - 1.0)
    return lam * lam / (w * p * (p - 1.0)) * pow(base, expo)


cdef double _pair_F(double ai, double aj, double wi, double wj, double pi, double pj,
                    double lam, double rhs, double d) noexcept nogil:
    return _psi_c(ai + d, wi, pi, lam) + _psi_c(aj + d, wj, pj, lam) - rhs


cdef double _pair_root(double ai, double aj, double wi, double wj, double pi, double pj,
                       double lam, double rhs, double mu_k) noexcept nogil:
    cdef double dlo, dhi, d, fd, slope, ftol, step, f0
    cdef int it
    ftol = 1e-13 * (1.0 if fabs(rhs) < 1.0 else fabs(rhs))
    f0 = _pair_F(ai, aj, wi, wj, pi, pj, lam, rhs, 0.0)
    if fabs(f0) <= ftol:
        return 0.0
    if f0 < 0.0:
        dlo = 0.0
        dhi = 1.0
        for it in range(200):
            if _pair_F(ai, aj, wi, wj, pi, pj, lam, rhs, dhi) > 0.0:
                break
            dhi = dhi * 2.0 + 1.0
        d = 0.0
    else:
        if mu_k <= 0.0:
            return 0.0
        dlo = -mu_k
        if _pair_F(ai, aj, wi, wj, pi, pj, lam, rhs, dlo) >= 0.0:
            return dlo
        dhi = 0.0
        d = 0.5 * (dlo + dhi)
    for it in range(80):
        fd = _pair_F(ai, aj, wi, wj, pi, pj, lam, rhs, d)
        if fabs(fd) <= ftol:
            return d
        if fd < 0.0:
            dlo = d
        else:
            dhi = d
        slope = _dpsi_c(ai + d, wi, pi, lam) + _dpsi_c(aj + d, wj, pj, lam)
        if slope > 0.0 and slope < 1e290:
            step = d - fd / slope
        else:
            step = 0.5 * (dlo + dhi)
        if not (dlo < step < dhi):
            step = 0.5 * (dlo + dhi)
        d = step
        if dhi - dlo <= 1e-15 * (1.0 + fabs(d)):
            return d
    return d


def pair_dual_sweep(double[::1] mu, double[::1] a, double[::1] g,
                    const cnp.intp_t[::1] ii, const cnp.intp_t[::1] jj,
                    const double[::1] cc, const double[::1] w,
                    const double[::1] pv, double lam):
    cdef Py_ssize_t K = cc.shape[0]
    cdef Py_ssize_t k, i, j
    cdef double moved = 0.0
    cdef double d
    for k in range(K):
        i = ii[k]
        j = jj[k]
        d = _pair_root(a[i], a[j], w[i], w[j], pv[i], pv[j], lam, cc[k], mu[k])
        if d != 0.0:
            mu[k] += d
            a[i] += d
            a[j] += d
            g[i] = _psi_c(a[i], w[i], pv[i], lam)
            g[j] = _psi_c(a[j], w[j], pv[j], lam)
            if fabs(d) > moved:
                moved = fabs(d)
    return moved


cdef double _ball_F(const double[::1] a, const cnp.intp_t[::1] indices,
                    const double[::1] coefs, const double[::1] w, const double[::1] pv,
                    Py_ssize_t start, Py_ssize_t stop, double lam, double rhs,
                    double d) noexcept nogil:
    cdef Py_ssize_t t
    cdef double acc = 0.0
    cdef Py_ssize_t i
    for t in range(start, stop):
        i = indices[t]
        acc += coefs[t] * _psi_c(a[i] + coefs[t] * d, w[i], pv[i], lam)
    return acc - rhs


def ball_dual_sweep(double[::1] mu, double[::1] a, double[::1] psi,
                    const cnp.intp_t[::1] indptr, const cnp.intp_t[::1] indices,
                    const double[::1] coefs, const double[::1] rhs,
                    const double[::1] w, const double[::1] pv, double lam):
    cdef Py_ssize_t K = rhs.shape[0]
    cdef Py_ssize_t k, t, i, start, stop
    cdef double moved = 0.0
    cdef double d, dlo, dhi, fd, slope, ftol, step, av, f0
    cdef int it
    for k in range(K):
        start = indptr[k]
        stop = indptr[k + 1]
        ftol = 1e-13 * (1.0 if fabs(rhs[k]) < 1.0 else fabs(rhs[k]))
        f0 = _ball_F(a, indices, coefs, w, pv, start, stop, lam, rhs[k], 0.0)
        if fabs(f0) <= ftol:
            d = 0.0
        elif f0 > 0.0 and mu[k] <= 0.0:
            d = 0.0
        elif f0 > 0.0 and _ball_F(a, indices, coefs, w, pv, start, stop, lam, rhs[k], -mu[k]) >= 0.0:
            d = -mu[k]
        else:
            if f0 < 0.0:
                dlo = 0.0
                dhi = 1.0
                for it in range(200):
                    if _ball_F(a, indices, coefs, w, pv, start, stop, lam, rhs[k], dhi) > 0.0:
                        break
                    dhi = dhi * 2.0 + 1.0
                d = 0.0
            else:
                dlo = -mu[k]
                dhi = 0.0
                d = 0.5 * (dlo + dhi)
            for it in range(80):
                fd = _ball_F(a, indices, coefs, w, pv, start, stop, lam, rhs[k], d)
                if fabs(fd) <= ftol:
                    break
                if fd < 0.0:
                    dlo = d
                else:
                    dhi = d
                slope = 0.0
                for t in range(start, stop):
                    i = indices[t]
                    av = a[i] + coefs[t] * d
                    slope += coefs[t] * coefs[t] * _dpsi_c(av, w[i], pv[i], lam)
                if slope > 0.0 and slope < 1e290:
                    step = d - fd / slope
                else:
                    step = 0.5 * (dlo + dhi)
                if not (dlo < step < dhi):
                    step = 0.5 * (dlo + dhi)
                d = step
                if dhi - dlo <= 1e-15 * (1.0 + fabs(d)):
                    break
        if d != 0.0:
            mu[k] += d
            for t in range(start, stop):
                i = indices[t]
                a[i] += coefs[t] * d
                psi[i] = _psi_c(a[i], w[i], pv[i], lam)
            moved = moved if moved > fabs(d) else fabs(d)
    return moved

#!/usr/bin/env python3
"""Benchmark: compiled kernels vs the numpy fallback on the hot paths.

Usage:
    python benchmarks/bench_kernels.py [--n 150] [--repeat 3]

Times the ball-scan functionals, the feasibility projections, and one full
minimal-gradient solve through each backend, and checks that the two
backends agree numerically.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from hajlasz import ExponentField, FunctionField, gen_random_cloud
from hajlasz._kernels import _pykern

try:
    from hajlasz._kernels import _ckern
except ImportError:
    _ckern = None


def timeit(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_kernels(n, repeat):
    sp = gen_random_cloud(n, 2, 42)
    rng = np.random.default_rng(42)
    f = rng.standard_normal(n)
    order = np.argsort(sp.dist, axis=1, kind="stable").astype(np.intp)
    w = sp.weight

    iu = np.triu_indices(n, k=1)
    cc = np.abs(f[iu[0]] - f[iu[1]]) / sp.dist[iu]
    keep = cc > 0
    ii, jj, cvals = iu[0][keep].astype(np.intp), iu[1][keep].astype(np.intp), cc[keep]

    cases = [
        ("hl_maximal scan", lambda k: k.ball_scan_hl(sp.dist, order, w, f)),
        ("sharp scan (u=1)", lambda k: k.ball_scan_sharp(sp.dist, order, w, f, 1.0, 1.0, 0)),
        ("tilde scan (u=1)", lambda k: k.ball_scan_sharp(sp.dist, order, w, f, 1.0, 1.0, 1)),
        ("minimal_h scan", lambda k: k.ball_scan_minh(sp.dist, order, w, f, 1.0)),
        (
            "pair projection",
            lambda k: k.pair_project(np.zeros(n), ii, jj, cvals, 1e-12, 64),
        ),
    ]
    rows = []
    for name, call in cases:
        t_py, out_py = timeit(lambda: call(_pykern), repeat)
        if _ckern is not None:
            t_c, out_c = timeit(lambda: call(_ckern), repeat)
            if isinstance(out_py, np.ndarray):
                scale = np.maximum(np.abs(out_py), 1e-300)
                agree = float(np.max(np.abs(out_py - out_c) / scale))
            else:
                agree = abs(out_py - out_c)
            rows.append((name, t_py, t_c, t_py / t_c, agree))
        else:
            rows.append((name, t_py, float("nan"), float("nan"), 0.0))
    return rows


def bench_solver(n, repeat):
    import os
    import subprocess
    import sys

    code = (
        "import time, numpy as np, hajlasz as hj\n"
        f"sp = hj.gen_random_cloud({n}, 2, 42)\n"
        f"f = hj.FunctionField(np.random.default_rng(42).standard_normal({n}))\n"
        f"p = hj.ExponentField(np.full({n}, 1.8))\n"
        "t0 = time.perf_counter()\n"
        "cert = hj.minimal_gradient(sp, p, f, 1.0, tol=1e-6)\n"
        "print(time.perf_counter() - t0, cert.norm)\n"
    )
    out = {}
    for backend in ("c", "python") if _ckern is not None else ("python",):
        env = dict(os.environ, HAJLASZ_BACKEND=backend)
        res = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env)
        if res.returncode != 0:
            raise RuntimeError(res.stderr)
        t, norm = res.stdout.split()
        out[backend] = (float(t), float(norm))
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=150)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    if _ckern is None:
        print("compiled extension not built; timing the numpy fallback only\n")

    print(f"kernel benchmarks on a {args.n}-point cloud (best of {args.repeat})\n")
    header = f"{'kernel':<20} {'python':>10} {'compiled':>10} {'speedup':>8} {'max rel diff':>13}"
    print(header)
    print("-" * len(header))
    for name, t_py, t_c, speed, agree in bench_kernels(args.n, args.repeat):
        print(f"{name:<20} {t_py:>9.4f}s {t_c:>9.4f}s {speed:>7.1f}x {agree:>13.2e}")

    print(f"\nfull minimal-gradient solve at n={args.n} (subprocess per backend):")
    for backend, (t, norm) in bench_solver(args.n, args.repeat).items():
        print(f"  {backend:<8} {t:8.3f}s   norm = {norm:.12g}")


if __name__ == "__main__":
    main()

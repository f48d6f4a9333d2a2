"""Theorem-level harness: Poincare witnesses, chain checks, norm equivalences.

The harness asserts only the directions that follow from exact feasibility
transfers on a finite space:

* the pointwise-minimal h is itself a valid gradient (take the closed ball
  B(x, dist(x, y)) and pass through its mean), so N_W <= N_B;
* psi = h**q satisfies every ball-average constraint (average the defining
  inequality over the ball and apply Jensen), so N_A <= N_B.

Every other direction holds with constants the theory does not pin down;
those ratios are reported with their spread over a corpus, never asserted
against a specific value.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._solver import BallSystem, luxemburg_min
from .exponent import ExponentField
from .gradient import SolverError, is_gradient, minimal_gradient, sobolev_norm
from .lebesgue import FunctionField, vlp_norm
from .maximal import hl_maximal, minimal_h, overline_sharp, sharp_maximal, tilde_sharp
from .space import FiniteSpace, estimate_quasi_constant

__all__ = [
    "PoincareConstraints",
    "poincare_constraints",
    "minimal_poincare_phi",
    "check_lemma2",
    "Remark3Report",
    "check_remark3",
    "check_thm1_forward",
    "EquivalenceRow",
    "EquivalenceReport",
    "equivalence_report",
    "NormAxiomsReport",
    "norm_axioms_check",
    "FUNCTIONALS",
]

FEAS_TOL = 1e-12


# ---------------------------------------------------------------------------
# Ball-average (Poincare) constraint system
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PoincareConstraints:
    """CSR-encoded half-spaces avg_B psi >= (L_B / r(B)**s)**q.

    One row per distinct member set (duplicated balls keep their tightest
    right-hand side); balls on which f is exactly constant impose nothing.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    coefs: np.ndarray
    rhs: np.ndarray
    nrm2: np.ndarray

    @property
    def n_rows(self) -> int:
        return self.rhs.size

    def averages(self, psi: np.ndarray) -> np.ndarray:
        if self.rhs.size == 0:
            return np.zeros(0)
        return np.add.reduceat(self.coefs * psi[self.indices], self.indptr[:-1])

    def residuals(self, psi: np.ndarray) -> np.ndarray:
        """avg_B psi - rhs_B per row (nonnegative iff psi is feasible)."""
        return self.averages(psi) - self.rhs


def poincare_constraints(
    space: FiniteSpace, f: FunctionField, s: float, q: float, prune: bool = True
) -> PoincareConstraints:
    """Assemble the ball-average half-spaces for (f, s, q) over all balls r > 0.

    With ``prune`` (the default, used by the solver) implied constraints are
    dropped: within a center's nested ball chain, a larger ball's half-space
    follows from any smaller one whose measure-scaled right side mu_B * rhs_B
    dominates, since sum_B w psi >= sum_B' w psi for B' inside B.  The
    feasible set is identical; pass prune=False to materialize every ball's
    half-space (used when checking that a given field satisfies them all).
    """
    if f.n != space.n:
        raise ValueError("function field not aligned with space")
    if not s > 0:
        raise ValueError("s must be positive")
    if not q >= 1:
        raise ValueError("q must be >= 1")
    n = space.n
    w = space.weight
    fv = f.values
    best_rhs: dict[bytes, float] = {}
    member_of: dict[bytes, np.ndarray] = {}
    key_order: list[bytes] = []
    for c in range(n):
        row = space.dist[c]
        o = np.argsort(row, kind="stable")
        dsort = row[o]
        fsort = fv[o]
        cw = np.cumsum(w[o])
        cwf = np.cumsum(w[o] * fsort)
        pmn = np.minimum.accumulate(fsort)
        pmx = np.maximum.accumulate(fsort)
        ends = np.flatnonzero(np.diff(dsort) != 0)
        ends = np.append(ends, n - 1)
        chain_max = 0.0
        for e in ends:
            r = dsort[e]
            if r <= 0.0 or pmn[e] == pmx[e]:
                continue
            mu = cw[e]
            fb = cwf[e] / mu
            aslice = np.abs(fsort[: e + 1] - fb)
            L = float(np.sum(w[o[: e + 1]] * aslice)) / mu
            rhs = (L / r**s) ** q
            if prune:
                scaled = mu * rhs
                if scaled <= chain_max:
                    continue
                chain_max = scaled
            mem = np.sort(o[: e + 1])
            key = mem.tobytes()
            if key not in best_rhs:
                key_order.append(key)
                member_of[key] = mem
                best_rhs[key] = rhs
            elif rhs > best_rhs[key]:
                best_rhs[key] = rhs
    indptr = [0]
    indices: list[np.ndarray] = []
    coefs: list[np.ndarray] = []
    rhs_list = []
    for key in key_order:
        mem = member_of[key]
        mu = float(np.sum(w[mem]))
        indices.append(mem)
        coefs.append(w[mem] / mu)
        rhs_list.append(best_rhs[key])
        indptr.append(indptr[-1] + mem.size)
    if rhs_list:
        indices_arr = np.concatenate(indices).astype(np.intp)
        coefs_arr = np.concatenate(coefs)
        rhs_arr = np.array(rhs_list)
        nrm2 = np.add.reduceat(coefs_arr**2, np.array(indptr[:-1]))
    else:
        indices_arr = np.zeros(0, dtype=np.intp)
        coefs_arr = np.zeros(0)
        rhs_arr = np.zeros(0)
        nrm2 = np.zeros(0)
    return PoincareConstraints(
        n=n,
        indptr=np.array(indptr, dtype=np.intp),
        indices=indices_arr,
        coefs=coefs_arr,
        rhs=rhs_arr,
        nrm2=nrm2,
    )


def minimal_poincare_phi(
    space: FiniteSpace,
    p: ExponentField,
    f: FunctionField,
    s: float,
    q: float,
    tol: float = 1e-6,
    seeds: list[FunctionField] | None = None,
    inner_cap: int = 300,
    bisect_cap: int = 200,
) -> FunctionField:
    """Least-norm phi with avg_B |f - f_B| <= r(B)**s (avg_B phi**q)**(1/q).

    Substituting psi = phi**q makes every constraint a half-space on psi and
    turns the objective into the Luxemburg norm under p(.)/q, handled by the
    same bisection/projection scheme as the minimal gradient.  ``seeds`` are
    optional feasible phi fields (the pointwise-minimal h is one).
    """
    if p.n != space.n or f.n != space.n:
        raise ValueError("field not aligned with space")
    if not 1.0 <= q < p.p_minus:
        raise ValueError("q must lie in [1, p-)")
    if not tol > 0:
        raise ValueError("tol must be positive")
    cons = poincare_constraints(space, f, s, q)
    if cons.n_rows == 0:
        return FunctionField(np.zeros(space.n))
    pq = ExponentField(p.values / q, p.basepoint)
    system = BallSystem(
        space.n, cons.indptr, cons.indices, cons.coefs, cons.rhs, cons.nrm2,
        space.weight, pq.values,
    )
    seed_arrays = [np.full(space.n, float(np.max(cons.rhs)))]
    for extra in seeds or []:
        if extra.n != space.n:
            raise ValueError("seed not aligned with space")
        seed_arrays.append(np.abs(extra.values) ** q)

    # Feasibility forces lam >= rhs_B / sum_B a_y w_y**(-q/p_y) on each row.
    wcap = space.weight ** (-1.0 / pq.values)
    caps = np.add.reduceat(cons.coefs * wcap[cons.indices], cons.indptr[:-1])
    lb = float(np.max(cons.rhs / caps))

    res = luxemburg_min(
        space.weight,
        pq.values,
        seed_arrays,
        system,
        tol,
        inner_cap=inner_cap,
        bisect_cap=bisect_cap,
        lower_bound=lb,
    )
    phi = FunctionField(res.x ** (1.0 / q))
    if not res.converged:
        raise SolverError(
            f"minimal_poincare_phi did not converge in {res.bisections} bisections"
        )
    return phi


# ---------------------------------------------------------------------------
# Chain and proof-step checks
# ---------------------------------------------------------------------------

def check_lemma2(
    space: FiniteSpace, f: FunctionField, phi: FunctionField, q: float, s: float
) -> float:
    """Smallest empirical C with |f(x) - f_B| <= C r(B)**s [M(phi**q)(x)]**(1/q).

    Requires (f, phi, q, s) to satisfy every ball-average constraint; balls on
    which f is constant are skipped (0/0), as is any exact-zero numerator.
    """
    if phi.n != space.n:
        raise ValueError("phi not aligned with space")
    cons = poincare_constraints(space, f, s, q, prune=False)
    psi = phi.values**q
    if cons.n_rows:
        worst = float(np.min(cons.residuals(psi)))
        scale = max(1.0, float(np.max(cons.rhs)))
        if worst < -FEAS_TOL * scale:
            raise ValueError(
                f"Poincare precondition violated (worst residual {worst:.3e})"
            )
    mq = hl_maximal(space, FunctionField(psi)).values ** (1.0 / q)
    fv = f.values
    w = space.weight
    best = 0.0
    for c in range(space.n):
        row = space.dist[c]
        o = np.argsort(row, kind="stable")
        dsort = row[o]
        fsort = fv[o]
        cw = np.cumsum(w[o])
        cwf = np.cumsum(w[o] * fsort)
        pmn = np.minimum.accumulate(fsort)
        pmx = np.maximum.accumulate(fsort)
        ends = np.append(np.flatnonzero(np.diff(dsort) != 0), space.n - 1)
        for e in ends:
            r = dsort[e]
            if r <= 0.0 or pmn[e] == pmx[e]:
                continue
            fb = cwf[e] / cw[e]
            mem = o[: e + 1]
            num = np.abs(fv[mem] - fb)
            den = r**s * mq[mem]
            mask = num > 0.0
            if not np.any(mask):
                continue
            with np.errstate(divide="ignore"):
                ratio = np.where(den[mask] > 0.0, num[mask] / den[mask], np.inf)
            m = float(np.max(ratio))
            if m > best:
                best = m
    return best


@dataclass(frozen=True)
class Remark3Report:
    """Pointwise comparison of the three oscillation functionals and M f.

    Chains checked (lhs <= rhs, relative tolerance ``rel_tol``):
      tilde <= sharp, sharp <= 2 tilde, tilde <= overline,
      overline <= sharp + 2 Mf.
    ``violations`` holds the worst relative excess per chain (positive means
    violated).  The last chain is a continuum inequality that provably fails
    on finite spaces with scales below ~1/8, so callers should treat its flag
    as a measurement, not an axiom.
    """

    u: float
    s: float
    rel_tol: float
    ok: dict[str, bool] = field(default_factory=dict)
    violations: dict[str, float] = field(default_factory=dict)

    @property
    def all_ok(self) -> bool:
        return all(self.ok.values())


def _rel_excess(lhs: np.ndarray, rhs: np.ndarray) -> float:
    scale = np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), 1e-300)
    return float(np.max((lhs - rhs) / scale))


def check_remark3(
    space: FiniteSpace, f: FunctionField, u: float, s: float, rel_tol: float = 1e-9
) -> Remark3Report:
    """Evaluate the four oscillation-chain inequalities pointwise."""
    fu = sharp_maximal(space, f, u, s).values
    ft = tilde_sharp(space, f, u, s).values
    fo = overline_sharp(space, f, u, s).values
    mf = hl_maximal(space, f).values
    viol = {
        "tilde_le_sharp": _rel_excess(ft, fu),
        "sharp_le_two_tilde": _rel_excess(fu, 2.0 * ft),
        "tilde_le_overline": _rel_excess(ft, fo),
        "overline_le_sharp_plus_two_max": _rel_excess(fo, fu + 2.0 * mf),
    }
    ok = {k: bool(v <= rel_tol) for k, v in viol.items()}
    return Remark3Report(u=u, s=s, rel_tol=rel_tol, ok=ok, violations=viol)


def check_thm1_forward(
    space: FiniteSpace,
    f: FunctionField,
    g: FunctionField,
    s: float,
    A: float | None = None,
) -> bool:
    """|f(x) - f_B| <= (2A)**s r(B)**s [g(x) + Mg(x)] for every ball and member.

    The quasi-metric-corrected factor (2A)**s replaces the metric-space 2**s:
    two points of a ball of radius r are within distance 2Ar of each other.
    """
    cert = is_gradient(space, f, g, s)
    if not cert.valid:
        raise ValueError("g is not a valid gradient of f")
    if A is None:
        A = estimate_quasi_constant(space)
    mg = hl_maximal(space, g).values
    factor = (2.0 * A) ** s
    fv = f.values
    gv = g.values
    w = space.weight
    for c in range(space.n):
        row = space.dist[c]
        o = np.argsort(row, kind="stable")
        dsort = row[o]
        cw = np.cumsum(w[o])
        cwf = np.cumsum(w[o] * fv[o])
        ends = np.append(np.flatnonzero(np.diff(dsort) != 0), space.n - 1)
        for e in ends:
            r = dsort[e]
            if r <= 0.0:
                continue
            fb = cwf[e] / cw[e]
            mem = o[: e + 1]
            lhs = np.abs(fv[mem] - fb)
            rhs = factor * r**s * (gv[mem] + mg[mem])
            if np.any(lhs > rhs * (1.0 + FEAS_TOL) + FEAS_TOL):
                return False
    return True


# ---------------------------------------------------------------------------
# Norm-equivalence reporting
# ---------------------------------------------------------------------------

FUNCTIONALS = ("nw", "nb", "nsharp", "ntilde", "noverline", "na")


@dataclass
class EquivalenceRow:
    index: int
    label: str
    nf: float = float("nan")
    nw: float = float("nan")
    nb: float = float("nan")
    nsharp: float = float("nan")
    ntilde: float = float("nan")
    noverline: float = float("nan")
    na: float = float("nan")
    error: str | None = None

    def functional(self, name: str) -> float:
        return getattr(self, name)


@dataclass
class EquivalenceReport:
    rows: list[EquivalenceRow]
    s: float
    u: float
    q: float
    tol: float
    ratio_stats: dict[str, dict[str, float]]
    assertions: dict[str, bool]
    max_nw_excess: float
    max_na_excess: float

    @property
    def ok(self) -> bool:
        return all(self.assertions.values())


def _thread_count(threads: int | None) -> int:
    if threads is None:
        raw = os.environ.get("HAJLASZ_THREADS", "0").strip() or "0"
        threads = int(raw)
    if threads < 0:
        raise ValueError("thread count must be >= 0")
    if threads == 0:
        threads = min(os.cpu_count() or 1, 8)
    return threads


def equivalence_report(
    space: FiniteSpace,
    p: ExponentField,
    corpus: list[FunctionField],
    s: float,
    u: float = 1.0,
    q: float = 1.0,
    tol: float = 1e-6,
    threads: int | None = None,
    labels: list[str] | None = None,
) -> EquivalenceReport:
    """Six norm functionals per corpus item, all pairwise ratios, and the
    provable-direction assertions N_W <= N_B and N_A <= N_B (3 tol slack)."""
    if p.n != space.n:
        raise ValueError("exponent field not aligned with space")
    if not p.p_minus > 1.0:
        raise ValueError("equivalence harness requires p- > 1")
    if not 1.0 <= u < p.p_minus:
        raise ValueError("u must lie in [1, p-)")
    if not 1.0 <= q < p.p_minus:
        raise ValueError("q must lie in [1, p-)")
    ntol = min(tol * 0.1, 1e-10)
    labels = labels or [str(i) for i in range(len(corpus))]

    def one(item: tuple[int, FunctionField]) -> EquivalenceRow:
        i, f = item
        row = EquivalenceRow(index=i, label=labels[i])
        try:
            hstar = minimal_h(space, f, s)
            row.nf = vlp_norm(space, p, f, ntol)
            row.nb = row.nf + vlp_norm(space, p, hstar, ntol)
            row.nw = row.nf + minimal_gradient(space, p, f, s, tol, seeds=[hstar]).norm
            row.nsharp = row.nf + vlp_norm(space, p, sharp_maximal(space, f, u, s), ntol)
            row.ntilde = row.nf + vlp_norm(space, p, tilde_sharp(space, f, u, s), ntol)
            row.noverline = row.nf + vlp_norm(
                space, p, overline_sharp(space, f, u, s), ntol
            )
            phi = minimal_poincare_phi(space, p, f, s, q, tol, seeds=[hstar])
            row.na = row.nf + vlp_norm(space, p, phi, ntol)
        except SolverError as exc:
            row.error = str(exc)
        return row

    items = list(enumerate(corpus))
    nthreads = _thread_count(threads)
    if nthreads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            rows = list(pool.map(one, items))
    else:
        rows = [one(item) for item in items]

    good = [r for r in rows if r.error is None]
    ratio_stats: dict[str, dict[str, float]] = {}
    for a_idx, a in enumerate(FUNCTIONALS):
        for b in FUNCTIONALS[a_idx + 1 :]:
            vals = np.array(
                [r.functional(a) / r.functional(b) for r in good if r.functional(b) > 0]
            )
            name = f"{a}_over_{b}"
            if vals.size:
                vmin = float(np.min(vals))
                vmax = float(np.max(vals))
                ratio_stats[name] = {
                    "min": vmin,
                    "max": vmax,
                    "mean": float(np.mean(vals)),
                    "spread": vmax / vmin if vmin > 0 else float("inf"),
                }
            else:
                ratio_stats[name] = {
                    "min": float("nan"),
                    "max": float("nan"),
                    "mean": float("nan"),
                    "spread": float("nan"),
                }
    max_nw = max((r.nw - r.nb for r in good), default=0.0)
    max_na = max((r.na - r.nb for r in good), default=0.0)
    slack = lambda r: 3.0 * tol * max(1.0, r.nb)  # noqa: E731
    assertions = {
        "nw_le_nb": all(r.nw <= r.nb + slack(r) for r in good),
        "na_le_nb": all(r.na <= r.nb + slack(r) for r in good),
    }
    return EquivalenceReport(
        rows=rows,
        s=s,
        u=u,
        q=q,
        tol=tol,
        ratio_stats=ratio_stats,
        assertions=assertions,
        max_nw_excess=max_nw,
        max_na_excess=max_na,
    )


# ---------------------------------------------------------------------------
# Norm-axiom spot checks (finite-space proxy for completeness)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NormAxiomsReport:
    trials: int
    triangle_ok: bool
    homogeneity_ok: bool
    definiteness_ok: bool
    cauchy_ok: bool
    worst_triangle_excess: float
    worst_homogeneity_error: float
    cauchy_norms: tuple[float, ...]

    @property
    def all_ok(self) -> bool:
        return (
            self.triangle_ok
            and self.homogeneity_ok
            and self.definiteness_ok
            and self.cauchy_ok
        )


def norm_axioms_check(
    space: FiniteSpace,
    p: ExponentField,
    s: float,
    trials: int = 20,
    seed: int = 0,
    tol: float = 1e-6,
) -> NormAxiomsReport:
    """Triangle inequality, homogeneity, definiteness, and one explicit
    Cauchy sequence f_n = f (1 - 2**-n), all within 3 tol."""
    if not p.p_minus > 1.0:
        raise ValueError("norm axiom harness requires p- > 1")
    rng = np.random.default_rng(seed)
    n = space.n

    def norm(values: np.ndarray) -> float:
        f = FunctionField(values)
        return sobolev_norm(space, p, f, s, tol, seeds=[minimal_h(space, f, s)])

    worst_tri = -np.inf
    worst_hom = 0.0
    tri_ok = hom_ok = True
    for t in range(trials):
        fv = rng.standard_normal(n)
        gv = rng.standard_normal(n)
        c = -2.0 if t == 0 else float(rng.uniform(0.5, 3.0) * rng.choice([-1.0, 1.0]))
        nf, ng = norm(fv), norm(gv)
        nsum = norm(fv + gv)
        excess = nsum - nf - ng
        worst_tri = max(worst_tri, excess)
        if excess > 3.0 * tol * max(1.0, nf + ng):
            tri_ok = False
        herr = abs(norm(c * fv) - abs(c) * nf)
        worst_hom = max(worst_hom, herr)
        if herr > 3.0 * tol * max(1.0, abs(c) * nf):
            hom_ok = False

    zero = norm(np.zeros(n))
    fv = rng.standard_normal(n)
    definiteness_ok = zero == 0.0 and norm(fv) > 0.0

    base = norm(fv)
    cauchy = []
    for k in range(1, 9):
        fk = fv * (1.0 - 2.0**-k)
        cauchy.append(norm(fk - fv))
    expected = [base * 2.0**-k for k in range(1, 9)]
    cauchy_ok = all(
        abs(c - e) <= 3.0 * tol * max(1.0, base) for c, e in zip(cauchy, expected)
    ) and cauchy[-1] <= cauchy[0] / 64.0 + 3.0 * tol * max(1.0, base)

    return NormAxiomsReport(
        trials=trials,
        triangle_ok=tri_ok,
        homogeneity_ok=hom_ok,
        definiteness_ok=definiteness_ok,
        cauchy_ok=cauchy_ok,
        worst_triangle_excess=float(worst_tri),
        worst_homogeneity_error=float(worst_hom),
        cauchy_norms=tuple(cauchy),
    )

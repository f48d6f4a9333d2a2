import numpy as np
import pytest

from hajlasz import (
    ExponentField,
    FiniteSpace,
    FunctionField,
    canonical_gradient,
    check_lemma2,
    check_remark3,
    check_thm1_forward,
    equivalence_report,
    gen_exponent,
    gen_grid,
    gen_random_cloud,
    minimal_h,
    minimal_poincare_phi,
    norm_axioms_check,
    poincare_constraints,
    sharp_maximal,
    vlp_norm,
)


def ff(*vals):
    return FunctionField(list(vals))


class TestMinimalPoincarePhi:
    def test_x2_hand_lp(self, x2, f_star, p2_x2):
        # single active half-space: (psi_a + psi_b)/2 >= 1; p = 2, q = 1
        phi = minimal_poincare_phi(x2, p2_x2, f_star, s=1.0, q=1.0, tol=1e-8)
        assert phi.values == pytest.approx([1.0, 1.0], abs=1e-6)
        assert vlp_norm(x2, p2_x2, phi) == pytest.approx(np.sqrt(2.0), rel=1e-6)

    def test_constant_function_gives_zero(self, l3, p2_l3):
        phi = minimal_poincare_phi(l3, p2_l3, ff(5.0, 5.0, 5.0), s=1.0, q=1.0)
        assert np.all(phi.values == 0.0)

    def test_q_out_of_range_rejected(self, x2, f_star, p2_x2):
        with pytest.raises(ValueError):
            minimal_poincare_phi(x2, p2_x2, f_star, s=1.0, q=2.0)
        with pytest.raises(ValueError):
            minimal_poincare_phi(x2, p2_x2, f_star, s=1.0, q=0.5)

    @pytest.mark.parametrize("q", [1.0, 1.3])
    def test_minimal_h_power_is_feasible(self, q):
        # averaging the defining inequality over B and applying Jensen makes
        # psi = h**q satisfy every half-space
        sp = gen_random_cloud(14, 2, 8)
        f = FunctionField(np.random.default_rng(8).standard_normal(14))
        h = minimal_h(sp, f, 1.0)
        cons = poincare_constraints(sp, f, 1.0, q, prune=False)
        scale = max(1.0, float(np.max(cons.rhs)))
        assert float(np.min(cons.residuals(h.values**q))) >= -1e-12 * scale

    @pytest.mark.parametrize("q", [1.0, 1.3])
    def test_solution_is_feasible_and_below_h(self, q):
        sp = gen_random_cloud(10, 2, 4)
        rng = np.random.default_rng(4)
        p = ExponentField(rng.uniform(1.6, 2.4, 10))
        f = FunctionField(rng.standard_normal(10))
        h = minimal_h(sp, f, 1.0)
        phi = minimal_poincare_phi(sp, p, f, 1.0, q, tol=1e-7, seeds=[h])
        cons = poincare_constraints(sp, f, 1.0, q, prune=False)
        scale = max(1.0, float(np.max(cons.rhs)))
        assert float(np.min(cons.residuals(phi.values**q))) >= -1e-11 * scale
        assert vlp_norm(sp, p, phi) <= vlp_norm(sp, p, h) * (1 + 3e-7)


class TestCheckLemma2:
    def test_x2_constant_one(self, x2, f_star, p2_x2):
        phi = minimal_poincare_phi(x2, p2_x2, f_star, 1.0, 1.0, tol=1e-9)
        assert check_lemma2(x2, f_star, phi, q=1.0, s=1.0) == pytest.approx(1.0, rel=1e-6)

    def test_constant_function_zero(self, l3):
        assert check_lemma2(l3, ff(2.0, 2.0, 2.0), ff(0.0, 0.0, 0.0), 1.0, 1.0) == 0.0

    def test_scale_invariance(self, p2_l3, l3):
        f = ff(0.0, 1.0, 2.0)
        f2 = ff(0.0, 2.0, 4.0)
        phi = minimal_poincare_phi(l3, p2_l3, f, 1.0, 1.0, tol=1e-9)
        phi2 = minimal_poincare_phi(l3, p2_l3, f2, 1.0, 1.0, tol=1e-9)
        c1 = check_lemma2(l3, f, phi, 1.0, 1.0)
        c2 = check_lemma2(l3, f2, phi2, 1.0, 1.0)
        assert c1 == pytest.approx(c2, rel=1e-5)

    def test_precondition_enforced(self, x2, f_star):
        with pytest.raises(ValueError, match="precondition"):
            check_lemma2(x2, f_star, ff(0.01, 0.01), q=1.0, s=1.0)


class TestCheckRemark3:
    def test_x2_all_hold_chain_tight(self, x2, f_star):
        rep = check_remark3(x2, f_star, u=1.0, s=1.0)
        assert rep.all_ok
        # the mean- and best-constant functionals coincide here
        ft = sharp_maximal(x2, f_star, 1.0, 1.0).values
        assert ft == pytest.approx([1.0, 1.0])

    def test_constant_function(self, l3):
        rep = check_remark3(l3, ff(3.0, 3.0, 3.0), u=2.0, s=1.0)
        assert rep.all_ok

    @pytest.mark.parametrize("u", [1.0, 2.0])
    def test_provable_chains_on_random_clouds(self, u):
        rng = np.random.default_rng(77)
        for k in range(20):
            n = int(rng.integers(5, 30))
            sp = gen_random_cloud(n, 2, 7000 + k)
            f = FunctionField(rng.standard_normal(n))
            rep = check_remark3(sp, f, u=u, s=1.0)
            assert rep.ok["tilde_le_sharp"]
            assert rep.ok["sharp_le_two_tilde"]
            assert rep.ok["tilde_le_overline"]

    def test_overline_chain_counterexample(self):
        # Three nearly-coincident points at scale eps < 1/8 defeat the
        # continuum bound overline <= sharp + 2 M f: here overline(x) =
        # 2/(3 eps) while sharp(x) = 1/(2 eps) and 2 Mf(x) = 4/3.
        eps = 0.05
        pts = np.array([[0.0, 0.0], [eps, 0.0], [eps, 1e-3]])
        dist = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
        sp = FiniteSpace(dist=dist, weight=np.full(3, 1.0 / 3.0))
        rep = check_remark3(sp, ff(0.0, 1.0, 1.0), u=1.0, s=1.0)
        assert not rep.ok["overline_le_sharp_plus_two_max"]
        assert rep.violations["overline_le_sharp_plus_two_max"] > 0.1
        assert rep.ok["tilde_le_sharp"] and rep.ok["tilde_le_overline"]


class TestThm1Forward:
    def test_x2_example(self, x2, f_star):
        assert check_thm1_forward(x2, f_star, ff(1.0, 1.0), s=1.0)

    def test_constant_zero_gradient(self, l3):
        assert check_thm1_forward(l3, ff(1.0, 1.0, 1.0), ff(0.0, 0.0, 0.0), s=1.0)

    def test_snowflaked_grid_canonical(self):
        sp = gen_grid(1, 5, 2.0)  # quasi-metric with A = 2
        f = FunctionField(np.random.default_rng(3).standard_normal(sp.n))
        g = canonical_gradient(sp, f, 1.0)
        assert check_thm1_forward(sp, f, g, s=1.0)

    def test_random_clouds_canonical_and_s(self):
        rng = np.random.default_rng(15)
        for k in range(5):
            sp = gen_random_cloud(12, 2, 300 + k)
            f = FunctionField(rng.standard_normal(12))
            for s in (0.7, 1.0, 1.5):
                assert check_thm1_forward(sp, f, canonical_gradient(sp, f, s), s=s)

    def test_invalid_gradient_rejected(self, x2, f_star):
        with pytest.raises(ValueError, match="not a valid gradient"):
            check_thm1_forward(x2, f_star, ff(0.0, 0.0), s=1.0)


class TestEquivalenceReport:
    def test_x2_all_functionals_coincide(self, x2, f_star, p2_x2):
        rep = equivalence_report(x2, p2_x2, [f_star], s=1.0, tol=1e-8, threads=1)
        row = rep.rows[0]
        expected = 1.0 + np.sqrt(2.0)
        for name in ("nw", "nb", "nsharp", "ntilde", "noverline", "na"):
            assert row.functional(name) == pytest.approx(expected, rel=1e-6)
        for stats in rep.ratio_stats.values():
            assert stats["min"] == pytest.approx(1.0, rel=1e-6)
            assert stats["max"] == pytest.approx(1.0, rel=1e-6)
        assert rep.ok

    def test_constant_corpus(self, l3, p2_l3):
        rep = equivalence_report(
            l3, p2_l3, [ff(2.0, 2.0, 2.0), ff(-1.0, -1.0, -1.0)], s=1.0, threads=1
        )
        for row in rep.rows:
            for name in ("nw", "nb", "nsharp", "ntilde", "noverline", "na"):
                assert row.functional(name) == pytest.approx(row.nf, rel=1e-9)
        assert rep.ok

    def test_small_grid_corpus(self):
        sp = gen_grid(2, 4, 1.0)
        p = gen_exponent(sp, "affine", c0=1.5, c1=0.5)
        rng = np.random.default_rng(5)
        corpus = [FunctionField(rng.standard_normal(sp.n)) for _ in range(4)]
        rep = equivalence_report(sp, p, corpus, s=1.0, tol=1e-6, threads=2)
        assert rep.ok
        assert all(r.error is None for r in rep.rows)
        assert rep.max_nw_excess <= 3e-6 * max(1.0, max(r.nb for r in rep.rows))
        for stats in rep.ratio_stats.values():
            assert np.isfinite(stats["spread"])

    def test_validates_parameters(self, x2, f_star):
        p1 = ExponentField([1.0, 1.0])
        with pytest.raises(ValueError, match="p- > 1"):
            equivalence_report(x2, p1, [f_star], s=1.0)
        p = ExponentField([1.5, 1.5])
        with pytest.raises(ValueError, match="u must"):
            equivalence_report(x2, p, [f_star], s=1.0, u=1.5)


class TestPointwiseHajlaszConstant:
    def test_finite_and_stable(self):
        # finite-space shadow of the sharp-maximal converse: the pairwise
        # constant is finite and varies by < 10x over a fixed space
        sp = gen_random_cloud(20, 2, 23)
        rng = np.random.default_rng(23)
        iu = np.triu_indices(20, k=1)
        consts = []
        for _ in range(30):
            f = FunctionField(rng.standard_normal(20))
            fu = sharp_maximal(sp, f, 1.0, 1.0).values
            gaps = np.abs(f.values[iu[0]] - f.values[iu[1]])
            keep = gaps > 0
            den = sp.dist[iu][keep] * (fu[iu[0]][keep] + fu[iu[1]][keep])
            assert np.all(den > 0)
            consts.append(float(np.max(gaps[keep] / den)))
        assert max(consts) / min(consts) < 10.0


class TestNormAxioms:
    def test_x2_twenty_trials(self, x2, p2_x2):
        rep = norm_axioms_check(x2, p2_x2, s=1.0, trials=20, seed=1, tol=1e-6)
        assert rep.all_ok
        assert rep.cauchy_norms[-1] < rep.cauchy_norms[0]

    def test_requires_p_minus_above_one(self, x2):
        with pytest.raises(ValueError):
            norm_axioms_check(x2, ExponentField([1.0, 2.0]), s=1.0)


class TestNonUnitParameters:
    def test_equivalence_report_with_fractional_u_q(self):
        # u, q strictly inside (1, p-) exercise the golden-section tilde path
        # and the Jensen transfer at q > 1 inside one report
        sp = gen_grid(2, 4, 1.0)
        p = gen_exponent(sp, "affine", c0=2.0, c1=0.5)  # p in [2, 2.5]
        rng = np.random.default_rng(99)
        corpus = [FunctionField(rng.standard_normal(sp.n)) for _ in range(3)]
        rep = equivalence_report(sp, p, corpus, s=0.8, u=1.5, q=1.25, tol=1e-6, threads=1)
        assert rep.ok
        assert all(r.error is None for r in rep.rows)

    def test_poincare_nonconvergence_raises(self, x2, f_star, p2_x2):
        from hajlasz import SolverError

        with pytest.raises(SolverError):
            minimal_poincare_phi(x2, p2_x2, f_star, s=1.0, q=1.0, tol=1e-8, bisect_cap=0)


class TestConstraintPruning:
    def test_pruned_solution_satisfies_full_set(self):
        # the solver runs on the pruned polyhedron; its answer must satisfy
        # every materialized half-space of the unpruned system
        sp = gen_random_cloud(18, 2, 61)
        rng = np.random.default_rng(61)
        p = ExponentField(rng.uniform(1.6, 2.2, 18))
        f = FunctionField(rng.standard_normal(18))
        phi = minimal_poincare_phi(sp, p, f, 1.0, 1.0, tol=1e-7)
        full = poincare_constraints(sp, f, 1.0, 1.0, prune=False)
        pruned = poincare_constraints(sp, f, 1.0, 1.0, prune=True)
        assert pruned.n_rows < full.n_rows
        scale = max(1.0, float(np.max(full.rhs)))
        assert float(np.min(full.residuals(phi.values))) >= -1e-10 * scale

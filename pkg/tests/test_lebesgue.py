import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hajlasz import (
    ExponentField,
    FunctionField,
    check_embedding,
    check_power_identity,
    gen_grid,
    gen_random_cloud,
    modular,
    vlp_norm,
)

GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0


def rand_fields(space, seed, p_lo=1.2, p_hi=2.5):
    rng = np.random.default_rng(seed)
    p = ExponentField(rng.uniform(p_lo, p_hi, space.n))
    f = FunctionField(rng.standard_normal(space.n))
    return p, f


class TestModular:
    def test_constant_exponent(self, x2, p2_x2):
        assert modular(x2, p2_x2, FunctionField([3.0, 4.0]), 5.0) == pytest.approx(1.0)

    def test_mixed_exponent(self, x2):
        p = ExponentField([1.0, 2.0])
        assert modular(x2, p, FunctionField([1.0, 1.0]), 1.0) == 2.0

    def test_zero_function(self, x2, p2_x2):
        assert modular(x2, p2_x2, FunctionField([0.0, 0.0]), 3.0) == 0.0

    def test_decreasing_in_lambda(self, l3, p2_l3):
        f = FunctionField([1.0, -2.0, 0.5])
        vals = [modular(l3, p2_l3, f, lam) for lam in (0.5, 1.0, 2.0, 4.0)]
        assert all(a > b for a, b in zip(vals, vals[1:]))


class TestLuxemburgNorm:
    def test_euclidean_case(self, x2, p2_x2):
        assert vlp_norm(x2, p2_x2, FunctionField([3.0, 4.0])) == pytest.approx(5.0, abs=1e-8)

    def test_golden_ratio_root(self, x2):
        # 1/lam + 1/lam**2 = 1 has the golden ratio as its positive root
        p = ExponentField([1.0, 2.0])
        got = vlp_norm(x2, p, FunctionField([1.0, 1.0]))
        assert got == pytest.approx(GOLDEN, abs=1e-8)

    def test_zero_function(self, x2, p2_x2):
        assert vlp_norm(x2, p2_x2, FunctionField([0.0, 0.0])) == 0.0

    def test_homogeneity_factor_3(self, l3):
        p = ExponentField([1.5, 1.75, 2.0])
        f = FunctionField([0.3, -1.1, 2.0])
        assert vlp_norm(l3, p, FunctionField(3.0 * f.values)) == pytest.approx(
            3.0 * vlp_norm(l3, p, f), rel=1e-9
        )

    @given(seed=st.integers(0, 500), pconst=st.floats(1.0, 6.0))
    @settings(max_examples=30, deadline=None)
    def test_constant_p_matches_weighted_lp_formula(self, seed, pconst):
        sp = gen_random_cloud(9, 2, seed)
        rng = np.random.default_rng(seed)
        f = FunctionField(rng.standard_normal(9))
        p = ExponentField(np.full(9, pconst))
        direct = float(np.sum(sp.weight * np.abs(f.values) ** pconst) ** (1.0 / pconst))
        assert vlp_norm(sp, p, f) == pytest.approx(direct, rel=1e-9)

    @given(seed=st.integers(0, 500))
    @settings(max_examples=30, deadline=None)
    def test_modular_at_norm_is_one(self, seed):
        sp = gen_random_cloud(8, 2, seed)
        p, f = rand_fields(sp, seed)
        tol = 1e-10
        lam = vlp_norm(sp, p, f, tol)
        assert modular(sp, p, f, lam) == pytest.approx(1.0, abs=5 * tol)

    @given(seed=st.integers(0, 500))
    @settings(max_examples=25, deadline=None)
    def test_triangle_inequality(self, seed):
        sp = gen_random_cloud(10, 2, seed)
        rng = np.random.default_rng(seed)
        p = ExponentField(rng.uniform(1.0, 3.0, 10))
        f = rng.standard_normal(10)
        g = rng.standard_normal(10)
        tol = 1e-10
        nf = vlp_norm(sp, p, FunctionField(f), tol)
        ng = vlp_norm(sp, p, FunctionField(g), tol)
        nfg = vlp_norm(sp, p, FunctionField(f + g), tol)
        assert nfg <= (nf + ng) * (1.0 + 2 * tol)

    def test_definiteness(self, x2, p2_x2):
        assert vlp_norm(x2, p2_x2, FunctionField([0.0, 1e-12])) > 0.0


class TestPowerIdentity:
    def test_x2_sqrt2(self, x2, p2_x2):
        lhs, rhs = check_power_identity(x2, p2_x2, FunctionField([1.0, 1.0]), s=2.0)
        assert lhs == pytest.approx(np.sqrt(2.0), rel=1e-9)
        assert rhs == pytest.approx(np.sqrt(2.0), rel=1e-9)

    def test_s_equal_1_trivial(self, l3):
        p = ExponentField([1.5, 1.75, 2.0])
        f = FunctionField([0.2, -1.0, 0.7])
        lhs, rhs = check_power_identity(l3, p, f, s=1.0)
        assert lhs == pytest.approx(rhs, rel=1e-9)

    def test_l3_random_s2(self, l3):
        p = ExponentField([1.5, 1.75, 2.0])
        rng = np.random.default_rng(0)
        for _ in range(5):
            f = FunctionField(rng.standard_normal(3))
            lhs, rhs = check_power_identity(l3, p, f, s=2.0)
            assert abs(lhs - rhs) <= 1e-6 * rhs

    def test_subunit_s_rejected(self, x2):
        p = ExponentField([1.5, 2.0])
        with pytest.raises(ValueError):
            check_power_identity(x2, p, FunctionField([1.0, 1.0]), s=0.5)


class TestEmbedding:
    def test_grid_example(self):
        sp = gen_grid(1, 3, 1.0)  # measure 1/3 per point
        p = ExponentField([1.5, 1.5, 1.5])
        q = ExponentField([2.0, 2.0, 2.0])
        lhs, rhs = check_embedding(sp, p, q, FunctionField([1.0, 2.0, 3.0]))
        assert lhs <= rhs * (1 + 1e-10)

    def test_equal_exponents(self, x2, p2_x2):
        lhs, rhs = check_embedding(x2, p2_x2, p2_x2, FunctionField([1.0, 2.0]))
        assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_zero_function(self, x2, p2_x2):
        lhs, rhs = check_embedding(x2, p2_x2, p2_x2, FunctionField([0.0, 0.0]))
        assert lhs == 0.0 and rhs == 0.0

    @given(seed=st.integers(0, 300), plo=st.floats(1.0, 2.0), delta=st.floats(0.1, 2.0))
    @settings(max_examples=25, deadline=None)
    def test_constant_exponent_jensen(self, seed, plo, delta):
        # probability measure + constant exponents: holds with no constant
        sp = gen_random_cloud(9, 2, seed)
        rng = np.random.default_rng(seed)
        u = FunctionField(rng.standard_normal(9))
        p = ExponentField(np.full(9, plo))
        q = ExponentField(np.full(9, plo + delta))
        lhs, rhs = check_embedding(sp, p, q, u)
        assert lhs <= rhs * (1 + 1e-9)

    def test_violated_order_rejected(self, x2):
        p = ExponentField([2.0, 2.0])
        q = ExponentField([1.5, 2.5])
        with pytest.raises(ValueError):
            check_embedding(x2, p, q, FunctionField([1.0, 1.0]))

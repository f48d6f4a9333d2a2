"""Numerical laboratory for variable-exponent smoothness analysis on finite
quasi-metric measure spaces: Luxemburg norms, maximal functionals, pointwise
gradients, and norm-equivalence reports.

Hot kernels run through a compiled extension when it was built; a numpy
fallback with identical semantics is selected otherwise (see
``hajlasz.backend_name``).
"""
from ._kernels import BACKEND as _BACKEND
from .characterizations import (
    EquivalenceReport,
    EquivalenceRow,
    NormAxiomsReport,
    PoincareConstraints,
    Remark3Report,
    check_lemma2,
    check_remark3,
    check_thm1_forward,
    equivalence_report,
    minimal_poincare_phi,
    norm_axioms_check,
    poincare_constraints,
)
from .exponent import ExponentField, exponent_range, log_holder_estimate, optimal_p_inf
from .generators import gen_exponent, gen_grid, gen_random_cloud
from .gradient import (
    GradientCertificate,
    SolverError,
    canonical_gradient,
    is_gradient,
    minimal_gradient,
    sobolev_norm,
)
from .io import (
    InputError,
    load_exponent,
    load_function,
    load_space,
    save_exponent,
    save_function,
    save_space,
)
from .lebesgue import FunctionField, check_embedding, check_power_identity, modular, vlp_norm
from .maximal import hl_maximal, minimal_h, overline_sharp, sharp_maximal, tilde_sharp
from .space import (
    Ball,
    DoublingGrowthReport,
    FiniteSpace,
    SpaceError,
    check_doubling_growth,
    diameter,
    enumerate_balls,
    estimate_doubling,
    estimate_quasi_constant,
)

__version__ = "0.1.0"


def backend_name() -> str:
    """Which kernel backend is active: 'c' (compiled) or 'python' (numpy)."""
    return _BACKEND

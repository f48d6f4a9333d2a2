import pathlib
import sys

import numpy as np
import pytest

SRC = pathlib.Path(__file__).resolve().parent.parent / "src"
if str(SRC) not in sys.path:
    try:
        import hajlasz  # noqa: F401
    except ImportError:
        sys.path.insert(0, str(SRC))

from hajlasz import ExponentField, FiniteSpace, FunctionField  # noqa: E402


@pytest.fixture(scope="session")
def x2() -> FiniteSpace:
    """Two points at distance 0.5, unit weights."""
    return FiniteSpace(dist=[[0.0, 0.5], [0.5, 0.0]], weight=[1.0, 1.0], label=("a", "b"))


@pytest.fixture(scope="session")
def l3() -> FiniteSpace:
    """Three points on a line at 0, 1, 2, unit weights."""
    d = np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]])
    return FiniteSpace(dist=d, weight=[1.0, 1.0, 1.0])


@pytest.fixture(scope="session")
def f_star() -> FunctionField:
    return FunctionField([0.0, 1.0])


@pytest.fixture(scope="session")
def p2_x2() -> ExponentField:
    return ExponentField([2.0, 2.0])


@pytest.fixture(scope="session")
def p2_l3() -> ExponentField:
    return ExponentField([2.0, 2.0, 2.0])

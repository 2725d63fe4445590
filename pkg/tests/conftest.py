import itertools

import pytest
from hypothesis import strategies as st

from qafactor.ising import IsingModel


def quarter_grid(lo=-2.0, hi=2.0):
    """Floats on the 1/4 grid: dyadic, so energy algebra is exact."""
    steps = int((hi - lo) / 0.25)
    return st.integers(0, steps).map(lambda k: lo + 0.25 * k)


@st.composite
def small_models(draw, max_n=6):
    n = draw(st.integers(min_value=1, max_value=max_n))
    h = tuple(draw(quarter_grid()) for _ in range(n))
    pairs = list(itertools.combinations(range(n), 2))
    couplings = {}
    for pair in pairs:
        if draw(st.booleans()):
            couplings[pair] = draw(quarter_grid())
    return IsingModel(n, h, couplings)


@st.composite
def spin_states(draw, n):
    return tuple(draw(st.sampled_from((-1, 1))) for _ in range(n))


@pytest.fixture(scope="session")
def mult_unit():
    from qafactor.synth import mult_unit_gate

    return mult_unit_gate()


@pytest.fixture(scope="session")
def net11():
    from qafactor.multiplier import build_multiplier

    return build_multiplier(1, 1)


@pytest.fixture(scope="session")
def net22():
    from qafactor.multiplier import build_multiplier

    return build_multiplier(2, 2)

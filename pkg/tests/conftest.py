import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def finite_floats(bound=1e3):
    return st.floats(min_value=-bound, max_value=bound, allow_nan=False, allow_infinity=False)


@st.composite
def vectors(draw, min_size=1, max_size=20, bound=1e3):
    n = draw(st.integers(min_size, max_size))
    return np.array(draw(st.lists(finite_floats(bound), min_size=n, max_size=n)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

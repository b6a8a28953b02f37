# When this file exists, pytest automatically adds `vaffine` to the path; this
# file is here so that the tests can import `vaffine` correctly.

import numpy as np
import pytest

from vaffine.models import FIXTURE_CURRENTS, build_boat


@pytest.fixture
def rng():
    return np.random.default_rng(20180612)


@pytest.fixture(params=sorted(FIXTURE_CURRENTS))
def boat(request):
    """Boat fixture (m = 1.5, I = 0.7) for every fixture current."""
    return build_boat(*FIXTURE_CURRENTS[request.param], m=1.5, I=0.7)


def random_states(rng, n, count, low=-2.0, high=2.0):
    from vaffine.geometry import State

    return [
        State(rng.uniform(low, high, n), rng.uniform(low, high, n))
        for i in range(count)
    ]


@pytest.fixture
def states():
    return random_states

import pytest

from plthick.fixtures import fixture
from plthick.thicken3 import thicken


_RUNS = {}


def thickening_run(name, seed, denom_bound=1000):
    """Session-wide cache: the full construction for (fixture, seed)."""
    key = (name, seed, denom_bound)
    if key not in _RUNS:
        _RUNS[key] = thicken(fixture(name), seed=seed, denom_bound=denom_bound)
    return _RUNS[key]


@pytest.fixture(scope="session")
def pipeline_cache():
    return thickening_run

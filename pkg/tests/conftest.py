import random

import pytest
from hypothesis import HealthCheck, settings

from eqtel.chaincx import ChainComplex

from helpers import CIRCLE_FACETS, SPHERE2_FACETS, complex_from_facets

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def sphere2() -> ChainComplex:
    return complex_from_facets(SPHERE2_FACETS)


@pytest.fixture
def circle_cx() -> ChainComplex:
    return complex_from_facets(CIRCLE_FACETS)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(12345)

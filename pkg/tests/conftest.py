"""Shared pytest configuration."""

import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "fast",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "fast"))


@pytest.fixture
def zeta():
    from core.lfun import get_scenario
    return get_scenario("zeta")


@pytest.fixture
def tau():
    from core.lfun import get_scenario
    return get_scenario("tau")


@pytest.fixture
def sigma3():
    from core.lfun import get_scenario
    return get_scenario("sigma_3")

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "slow_ok",
    settings(deadline=None, suppress_health_check=[HealthCheck.too_slow]),
)
settings.load_profile("slow_ok")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

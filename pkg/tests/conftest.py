from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from flmlab import config

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(autouse=True)
def default_config():
    config.set_current(config.Config())
    yield
    config.set_current(None)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

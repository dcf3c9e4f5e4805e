import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from .specs import TONGUE_E, mathieu

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=400)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def tongue():
    return mathieu(TONGUE_E)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)

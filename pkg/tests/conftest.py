import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=50, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def rel(a, b):
    a, b = complex(a), complex(b)
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale else 0.0


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def polar(rng, lo, hi):
    return rng.uniform(lo, hi) * np.exp(2j * np.pi * rng.random())

import numpy as np
import pytest

from macdkit import UniformSignal


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def random_signal(rng):
    def make(n=2000, dt=1.0, t0=0.0, lo=-1.0, hi=1.0, seed=None):
        gen = rng if seed is None else np.random.default_rng(seed)
        return UniformSignal(t0, dt, gen.uniform(lo, hi, n))

    return make

import numpy as np
import pytest

from fanoqed import SystemParams


@pytest.fixture
def baseline_params() -> SystemParams:
    """Baseline parameter set: kappa=50, gamma=0.05, |g|=100 ueV, eta=1."""
    return SystemParams()


@pytest.fixture
def weak_params() -> SystemParams:
    """Weak-coupling variant |g|=2.37 ueV of the baseline set."""
    return SystemParams(g_abs=2.37)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


def random_valid_params(rng: np.random.Generator) -> SystemParams:
    """Random parameter set with kappa > gamma (the supported regime)."""
    return SystemParams(
        g_abs=rng.uniform(0.0, 150.0),
        gamma=rng.uniform(0.01, 2.0),
        kappa=rng.uniform(5.0, 150.0),
        gamma_ph=rng.uniform(0.0, 40.0),
        eta=rng.uniform(0.0, 1.0),
    ).with_reduced_detuning(rng.uniform(-200.0, 200.0))

import numpy as np
import pytest

from sgmc.core import ParameterVector, make_layout
from sgmc.data import load_in_memory
from sgmc.models import surrogate_from_logdensity

# chi-square 99th percentiles, indexed by degrees of freedom
CHI2_99 = {2: 9.210, 3: 11.345, 9: 21.666, 15: 30.578}


def quadratic_model(curvatures, offsets=None):
    """Prior-only surrogate with U(theta) = 0.5 sum a_i theta_i^2 + b.theta."""
    a = np.asarray(curvatures, dtype=np.float64)
    b = np.zeros_like(a) if offsets is None else np.asarray(offsets, dtype=np.float64)
    layout = make_layout({"theta": (a.shape[0],)})
    return surrogate_from_logdensity(
        f"quadratic_{a.shape[0]}d", layout,
        lambda flat: float(-0.5 * (a * flat) @ flat - b @ flat),
        lambda flat: -(a * flat + b),
    )


@pytest.fixture
def dummy_dataset():
    return load_in_memory(arrays={"y": np.zeros(1)})


@pytest.fixture
def tiny_pv():
    layout = make_layout({"w": (2,), "log_sigma": ()})
    return ParameterVector(layout, np.array([1.0, 2.0, 0.5]))

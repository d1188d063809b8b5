import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from pthill.band_structure import trace_bands
from pthill.operator_model import a_from_V


def match_max_error(x, y):
    """Largest distance after optimal one-to-one pairing of two point sets."""
    x, y = np.asarray(x, dtype=complex), np.asarray(y, dtype=complex)
    assert x.size == y.size, (x, y)
    cost = np.abs(x[:, None] - y[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max()) if x.size else 0.0


@pytest.fixture(scope="session")
def a07():
    return a_from_V(0.7)


@pytest.fixture(scope="session")
def bands07(a07):
    return trace_bands(a07, n_max=4, t_steps=256)

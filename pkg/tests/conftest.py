import numpy as np
import pytest

from pseudoparab.curve import build_linear
from pseudoparab.data import Domain
from pseudoparab.grid import Axis


@pytest.fixture
def unit_domain():
    return Domain(1.0, 1.0, 2.0)


def unit_axes(n):
    return Axis.uniform(1.0, n), Axis.uniform(1.0, n)


def unit_linear_curve(n):
    ax, _ = unit_axes(n)
    return build_linear(1.0, 1.0, ax)


def sup(a):
    return float(np.max(np.abs(np.asarray(a))))

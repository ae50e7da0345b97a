"""Backend sanity: the pure and compiled kernels must agree."""

import numpy as np
import pytest

from pseudoparab import _kernels_py as pure

try:
    from pseudoparab import _kernels_cy as compiled
except ImportError:
    compiled = None

backends = [pure] + ([compiled] if compiled is not None else [])


@pytest.fixture(params=backends, ids=lambda m: m.BACKEND)
def kern(request):
    return request.param


def test_cumtrapz1_linear(kern):
    x = np.linspace(0.0, 1.0, 11)
    f = 2.0 * x + 1.0
    expected = x**2 + x  # exact antiderivative, trapezoid exact for affine
    assert np.allclose(kern.cumtrapz1(x, f), expected, atol=1e-15)


def test_cumtrapz2_matches_1d(kern):
    rng = np.random.default_rng(0)
    x = np.linspace(0.0, 1.0, 9)
    y = np.linspace(0.0, 2.0, 7)
    g = rng.normal(size=(9, 7))
    c0 = kern.cumtrapz2_axis0(x, g)
    c1 = kern.cumtrapz2_axis1(y, g)
    for j in range(7):
        assert np.array_equal(c0[:, j], kern.cumtrapz1(x, g[:, j]))
    for i in range(9):
        assert np.array_equal(c1[i, :], kern.cumtrapz1(y, g[i, :]))


def test_interp1_nodal_identity(kern):
    x = np.array([0.0, 0.3, 0.7, 1.0])
    f = np.array([1.0, -2.0, 5.0, 3.0])
    out = kern.interp1(x, f, x)
    assert np.array_equal(out, f)


def test_interp1_midpoints(kern):
    x = np.array([0.0, 0.5, 1.0])
    f = np.array([0.0, 1.0, 0.0])
    assert kern.interp1(x, f, 0.25) == pytest.approx(0.5)
    assert kern.interp1(x, f, 0.75) == pytest.approx(0.5)


def test_interp_rows_columns(kern):
    x = np.linspace(0.0, 1.0, 5)
    y = np.linspace(0.0, 1.0, 4)
    g = np.outer(x, np.ones(4)) + np.outer(np.ones(5), y)
    t = np.array([0.1, 0.4, 0.9, 1.0])
    out = kern.interp_columns(x, g, t)
    assert np.allclose(out, t + y, atol=1e-15)
    s = np.array([0.0, 0.2, 0.5, 0.9, 1.0])
    out = kern.interp_rows(y, g, s)
    assert np.allclose(out, x + s, atol=1e-15)


def test_bilinear_cell_center(kern):
    x = np.array([0.0, 1.0, 2.0])
    y = np.array([0.0, 1.0, 2.0])
    g = np.outer(x, y)
    assert kern.bilinear(x, y, g, 0.5, 0.5) == pytest.approx(0.25)
    assert kern.bilinear(x, y, g, 2.0, 2.0) == 4.0  # last node exact


def test_deriv3_quadratic_exact(kern):
    x = np.linspace(0.0, 1.0, 9)
    f = 3.0 * x**2 - 2.0 * x + 1.0
    assert np.allclose(kern.deriv3(x, f), 6.0 * x - 2.0, atol=1e-13)


def test_deriv3_nonuniform_quadratic_exact(kern):
    x = np.array([0.0, 0.1, 0.35, 0.5, 0.8, 1.0])
    f = x**2
    assert np.allclose(kern.deriv3(x, f), 2.0 * x, atol=1e-13)


@pytest.mark.skipif(compiled is None, reason="compiled backend unavailable")
def test_backends_agree():
    rng = np.random.default_rng(42)
    x = np.sort(rng.uniform(0.05, 0.95, 18))
    x = np.concatenate(([0.0], x, [1.0]))
    f = rng.normal(size=len(x))
    g = rng.normal(size=(len(x), 12))
    y = np.linspace(0.0, 1.0, 12)
    t = rng.uniform(0.0, 1.0, 12)
    assert np.array_equal(pure.cumtrapz1(x, f), compiled.cumtrapz1(x, f))
    assert np.array_equal(
        pure.cumtrapz2_axis0(x, g), compiled.cumtrapz2_axis0(x, g)
    )
    assert np.array_equal(
        pure.cumtrapz2_axis1(y, g), compiled.cumtrapz2_axis1(y, g)
    )
    assert np.array_equal(pure.interp1(x, f, t), compiled.interp1(x, f, t))
    assert np.array_equal(
        pure.interp_columns(x, g, t), compiled.interp_columns(x, g, t)
    )
    assert np.array_equal(pure.deriv3(x, f), compiled.deriv3(x, f))
    assert np.array_equal(
        pure.bilinear(x, y, g, t, t[::-1]), compiled.bilinear(x, y, g, t, t[::-1])
    )

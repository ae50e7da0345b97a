"""Pure NumPy implementations of the array kernels.

This module mirrors the compiled extension ``_kernels_cy`` operation for
operation (same arithmetic expressions, same summation order), so results
agree between backends to the last bit on typical inputs.

Conventions shared by both backends:
  * coordinate arrays are strictly increasing float64 vectors,
  * interpolation uses the weight form f[k]*(1-t) + f[k+1]*t, which is
    exact at the nodes (t == 0 or t == 1 gives the nodal value bitwise),
  * query points are assumed to lie inside the coordinate range; callers
    are responsible for range checks.
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure"


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def cumtrapz1(x, f):
    """Cumulative trapezoid integral of f over x; result[0] = 0."""
    x = _f64(x)
    f = _f64(f)
    out = np.empty_like(f)
    out[0] = 0.0
    np.cumsum(0.5 * (x[1:] - x[:-1]) * (f[1:] + f[:-1]), out=out[1:])
    return out


def cumtrapz2_axis0(x, g):
    """Column-wise cumulative trapezoid integral of a 2D field along axis 0."""
    x = _f64(x)
    g = _f64(g)
    out = np.empty_like(g)
    out[0, :] = 0.0
    seg = 0.5 * (x[1:] - x[:-1])[:, None] * (g[1:, :] + g[:-1, :])
    np.cumsum(seg, axis=0, out=out[1:, :])
    return out


def cumtrapz2_axis1(y, g):
    """Row-wise cumulative trapezoid integral of a 2D field along axis 1."""
    y = _f64(y)
    g = _f64(g)
    out = np.empty_like(g)
    out[:, 0] = 0.0
    seg = 0.5 * (y[1:] - y[:-1])[None, :] * (g[:, 1:] + g[:, :-1])
    np.cumsum(seg, axis=1, out=out[:, 1:])
    return out


def _bracket(xs, t):
    k = np.searchsorted(xs, t, side="right") - 1
    return np.clip(k, 0, len(xs) - 2)


def interp1(xs, fs, t):
    """Piecewise-linear interpolation of (xs, fs) at points t."""
    xs = _f64(xs)
    fs = _f64(fs)
    t = np.asarray(t, dtype=np.float64)
    scalar = t.ndim == 0
    tq = np.atleast_1d(t)
    k = _bracket(xs, tq)
    w = (tq - xs[k]) / (xs[k + 1] - xs[k])
    out = fs[k] * (1.0 - w) + fs[k + 1] * w
    return float(out[0]) if scalar else out


def interp_columns(xs, c, t):
    """Per-column interpolation: out[j] = interp(xs, c[:, j], t[j])."""
    xs = _f64(xs)
    c = _f64(c)
    t = _f64(t)
    k = _bracket(xs, t)
    j = np.arange(c.shape[1])
    w = (t - xs[k]) / (xs[k + 1] - xs[k])
    return c[k, j] * (1.0 - w) + c[k + 1, j] * w


def interp_rows(ys, c, t):
    """Per-row interpolation: out[i] = interp(ys, c[i, :], t[i])."""
    ys = _f64(ys)
    c = _f64(c)
    t = _f64(t)
    k = _bracket(ys, t)
    i = np.arange(c.shape[0])
    w = (t - ys[k]) / (ys[k + 1] - ys[k])
    return c[i, k] * (1.0 - w) + c[i, k + 1] * w


def bilinear(xs, ys, g, xq, yq):
    """Bilinear interpolation of a 2D field at point arrays (xq, yq)."""
    xs = _f64(xs)
    ys = _f64(ys)
    g = _f64(g)
    xq = np.asarray(xq, dtype=np.float64)
    yq = np.asarray(yq, dtype=np.float64)
    scalar = xq.ndim == 0 and yq.ndim == 0
    xq1, yq1 = np.broadcast_arrays(np.atleast_1d(xq), np.atleast_1d(yq))
    kx = _bracket(xs, xq1)
    ky = _bracket(ys, yq1)
    tx = (xq1 - xs[kx]) / (xs[kx + 1] - xs[kx])
    ty = (yq1 - ys[ky]) / (ys[ky + 1] - ys[ky])
    out = (
        g[kx, ky] * (1.0 - tx) * (1.0 - ty)
        + g[kx + 1, ky] * tx * (1.0 - ty)
        + g[kx, ky + 1] * (1.0 - tx) * ty
        + g[kx + 1, ky + 1] * tx * ty
    )
    return float(out[0]) if scalar else out


def deriv3(x, f):
    """Second-order three-point derivative on a possibly non-uniform grid.

    Central differences in the interior, one-sided second-order stencils at
    both endpoints.  Exact for quadratics (the stencil differentiates the
    local quadratic interpolant).
    """
    x = _f64(x)
    f = _f64(f)
    n = len(x)
    out = np.empty_like(f)
    h1 = x[1:-1] - x[:-2]
    h2 = x[2:] - x[1:-1]
    out[1:-1] = (
        -h2 / (h1 * (h1 + h2)) * f[:-2]
        + (h2 - h1) / (h1 * h2) * f[1:-1]
        + h1 / (h2 * (h1 + h2)) * f[2:]
    )
    a, b = x[1] - x[0], x[2] - x[1]
    out[0] = (
        -(2.0 * a + b) / (a * (a + b)) * f[0]
        + (a + b) / (a * b) * f[1]
        - a / (b * (a + b)) * f[2]
    )
    a, b = x[n - 2] - x[n - 3], x[n - 1] - x[n - 2]
    out[n - 1] = (
        b / (a * (a + b)) * f[n - 3]
        - (a + b) / (a * b) * f[n - 2]
        + (a + 2.0 * b) / (b * (a + b)) * f[n - 1]
    )
    return out

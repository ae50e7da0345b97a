# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled array kernels (Cython twin of ``_kernels_py``).

Keep the arithmetic expressions identical to the pure backend: weight-form
interpolation, sequential trapezoid accumulation.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


cdef inline const double[::1] _vec(object a):
    return np.ascontiguousarray(a, dtype=np.float64)


cdef inline const double[:, ::1] _mat(object a):
    return np.ascontiguousarray(a, dtype=np.float64)


cdef inline Py_ssize_t _bracket1(const double[::1] xs, double t) nogil:
    # Rightmost k with xs[k] <= t, clipped to a valid segment start.
    cdef Py_ssize_t lo = 0, hi = xs.shape[0], mid
    while lo < hi:
        mid = (lo + hi) // 2
        if xs[mid] <= t:
            lo = mid + 1
        else:
            hi = mid
    lo -= 1
    if lo < 0:
        lo = 0
    if lo > xs.shape[0] - 2:
        lo = xs.shape[0] - 2
    return lo


def cumtrapz1(object x, object f):
    """Cumulative trapezoid integral of f over x; result[0] = 0."""
    cdef const double[::1] xv = _vec(x)
    cdef const double[::1] fv = _vec(f)
    cdef Py_ssize_t n = xv.shape[0], i
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    out[0] = 0.0
    for i in range(1, n):
        out[i] = out[i - 1] + 0.5 * (xv[i] - xv[i - 1]) * (fv[i] + fv[i - 1])
    return out_arr


def cumtrapz2_axis0(object x, object g):
    """Column-wise cumulative trapezoid integral along axis 0."""
    cdef const double[::1] xv = _vec(x)
    cdef const double[:, ::1] gv = _mat(g)
    cdef Py_ssize_t nx = gv.shape[0], ny = gv.shape[1], i, j
    out_arr = np.empty((nx, ny), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double half_dx
    for j in range(ny):
        out[0, j] = 0.0
    for i in range(1, nx):
        half_dx = 0.5 * (xv[i] - xv[i - 1])
        for j in range(ny):
            out[i, j] = out[i - 1, j] + half_dx * (gv[i, j] + gv[i - 1, j])
    return out_arr


def cumtrapz2_axis1(object y, object g):
    """Row-wise cumulative trapezoid integral along axis 1."""
    cdef const double[::1] yv = _vec(y)
    cdef const double[:, ::1] gv = _mat(g)
    cdef Py_ssize_t nx = gv.shape[0], ny = gv.shape[1], i, j
    out_arr = np.empty((nx, ny), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double half_dy
    for i in range(nx):
        out[i, 0] = 0.0
    for j in range(1, ny):
        half_dy = 0.5 * (yv[j] - yv[j - 1])
        for i in range(nx):
            out[i, j] = out[i, j - 1] + half_dy * (gv[i, j] + gv[i, j - 1])
    return out_arr


def interp1(object xs, object fs, object t):
    """Piecewise-linear interpolation of (xs, fs) at points t."""
    cdef const double[::1] xv = _vec(xs)
    cdef const double[::1] fv = _vec(fs)
    t_in = np.asarray(t, dtype=np.float64)
    scalar = t_in.ndim == 0
    cdef const double[::1] tv = _vec(np.atleast_1d(t_in))
    cdef Py_ssize_t m = tv.shape[0], q, k
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double w
    for q in range(m):
        k = _bracket1(xv, tv[q])
        w = (tv[q] - xv[k]) / (xv[k + 1] - xv[k])
        out[q] = fv[k] * (1.0 - w) + fv[k + 1] * w
    return float(out_arr[0]) if scalar else out_arr


def interp_columns(object xs, object c, object t):
    """Per-column interpolation: out[j] = interp(xs, c[:, j], t[j])."""
    cdef const double[::1] xv = _vec(xs)
    cdef const double[:, ::1] cv = _mat(c)
    cdef const double[::1] tv = _vec(t)
    cdef Py_ssize_t ny = cv.shape[1], j, k
    out_arr = np.empty(ny, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double w
    for j in range(ny):
        k = _bracket1(xv, tv[j])
        w = (tv[j] - xv[k]) / (xv[k + 1] - xv[k])
        out[j] = cv[k, j] * (1.0 - w) + cv[k + 1, j] * w
    return out_arr


def interp_rows(object ys, object c, object t):
    """Per-row interpolation: out[i] = interp(ys, c[i, :], t[i])."""
    cdef const double[::1] yv = _vec(ys)
    cdef const double[:, ::1] cv = _mat(c)
    cdef const double[::1] tv = _vec(t)
    cdef Py_ssize_t nx = cv.shape[0], i, k
    out_arr = np.empty(nx, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double w
    for i in range(nx):
        k = _bracket1(yv, tv[i])
        w = (tv[i] - yv[k]) / (yv[k + 1] - yv[k])
        out[i] = cv[i, k] * (1.0 - w) + cv[i, k + 1] * w
    return out_arr


def bilinear(object xs, object ys, object g, object xq, object yq):
    """Bilinear interpolation of a 2D field at point arrays (xq, yq)."""
    cdef const double[::1] xv = _vec(xs)
    cdef const double[::1] yv = _vec(ys)
    cdef const double[:, ::1] gv = _mat(g)
    xq_in = np.asarray(xq, dtype=np.float64)
    yq_in = np.asarray(yq, dtype=np.float64)
    scalar = xq_in.ndim == 0 and yq_in.ndim == 0
    xb, yb = np.broadcast_arrays(np.atleast_1d(xq_in), np.atleast_1d(yq_in))
    cdef const double[::1] xqv = _vec(xb)
    cdef const double[::1] yqv = _vec(yb)
    cdef Py_ssize_t m = xqv.shape[0], q, kx, ky
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double tx, ty
    for q in range(m):
        kx = _bracket1(xv, xqv[q])
        ky = _bracket1(yv, yqv[q])
        tx = (xqv[q] - xv[kx]) / (xv[kx + 1] - xv[kx])
        ty = (yqv[q] - yv[ky]) / (yv[ky + 1] - yv[ky])
        out[q] = (
            gv[kx, ky] * (1.0 - tx) * (1.0 - ty)
            + gv[kx + 1, ky] * tx * (1.0 - ty)
            + gv[kx, ky + 1] * (1.0 - tx) * ty
            + gv[kx + 1, ky + 1] * tx * ty
        )
    return float(out_arr[0]) if scalar else out_arr


def deriv3(object x, object f):
    """Second-order three-point derivative on a possibly non-uniform grid."""
    cdef const double[::1] xv = _vec(x)
    cdef const double[::1] fv = _vec(f)
    cdef Py_ssize_t n = xv.shape[0], i
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double a, b
    for i in range(1, n - 1):
        a = xv[i] - xv[i - 1]
        b = xv[i + 1] - xv[i]
        out[i] = (
            -b / (a * (a + b)) * fv[i - 1]
            + (b - a) / (a * b) * fv[i]
            + a / (b * (a + b)) * fv[i + 1]
        )
    a = xv[1] - xv[0]
    b = xv[2] - xv[1]
    out[0] = (
        -(2.0 * a + b) / (a * (a + b)) * fv[0]
        + (a + b) / (a * b) * fv[1]
        - a / (b * (a + b)) * fv[2]
    )
    a = xv[n - 2] - xv[n - 3]
    b = xv[n - 1] - xv[n - 2]
    out[n - 1] = (
        b / (a * (a + b)) * fv[n - 3]
        - (a + b) / (a * b) * fv[n - 2]
        + (a + 2.0 * b) / (b * (a + b)) * fv[n - 1]
    )
    return out_arr

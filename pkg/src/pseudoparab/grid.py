"""Sampled functions on 1D axes and 2D tensor grids.

The discrete model is piecewise-affine throughout: composite trapezoid
quadrature, linear/bilinear interpolation, and three-point second-order
finite differences.  All operations are pure functions of immutable inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels


class GridError(ValueError):
    pass


class OutOfRangeError(GridError):
    pass


class InvalidExponentError(GridError):
    pass


def _readonly(a) -> np.ndarray:
    out = np.ascontiguousarray(a, dtype=np.float64)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Axis:
    """Strictly increasing coordinates spanning [0, h]."""

    points: np.ndarray

    def __post_init__(self):
        pts = _readonly(self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 3:
            raise GridError("axis needs at least 3 points")
        if not np.all(np.isfinite(pts)):
            raise GridError("axis points must be finite")
        if pts[0] != 0.0:
            raise GridError("axis must start at 0")
        if not np.all(np.diff(pts) > 0):
            raise GridError("axis points must be strictly increasing")

    @classmethod
    def uniform(cls, h: float, n_cells: int) -> "Axis":
        if h <= 0 or n_cells < 2:
            raise GridError("need h > 0 and at least 2 cells")
        return cls(np.linspace(0.0, h, n_cells + 1))

    @property
    def h(self) -> float:
        return float(self.points[-1])

    def __len__(self) -> int:
        return len(self.points)


def same_axis(a: Axis, b: Axis) -> bool:
    return a.points.shape == b.points.shape and np.array_equal(a.points, b.points)


@dataclass(frozen=True)
class Fn1:
    """Sampled function of one variable."""

    axis: Axis
    values: np.ndarray

    def __post_init__(self):
        vals = _readonly(self.values)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1 or len(vals) != len(self.axis):
            raise GridError("values length must match axis")
        if not np.all(np.isfinite(vals)):
            raise GridError("values must be finite")

    @classmethod
    def zeros(cls, axis: Axis) -> "Fn1":
        return cls(axis, np.zeros(len(axis)))

    def _binop(self, other, op):
        if isinstance(other, Fn1):
            if not same_axis(self.axis, other.axis):
                raise GridError("axis mismatch")
            return Fn1(self.axis, op(self.values, other.values))
        return Fn1(self.axis, op(self.values, other))

    def __add__(self, other):
        return self._binop(other, np.add)

    def __radd__(self, other):
        return self._binop(other, np.add)

    def __sub__(self, other):
        return self._binop(other, np.subtract)

    def __mul__(self, other):
        return self._binop(other, np.multiply)

    __rmul__ = __mul__

    def __neg__(self):
        return Fn1(self.axis, -self.values)


@dataclass(frozen=True)
class Fn2:
    """Sampled function on a tensor-product grid, indexed (x, y)."""

    axis_x: Axis
    axis_y: Axis
    values: np.ndarray

    def __post_init__(self):
        vals = _readonly(self.values)
        object.__setattr__(self, "values", vals)
        if vals.shape != (len(self.axis_x), len(self.axis_y)):
            raise GridError("values shape must match axes")
        if not np.all(np.isfinite(vals)):
            raise GridError("values must be finite")

    @classmethod
    def zeros(cls, axis_x: Axis, axis_y: Axis) -> "Fn2":
        return cls(axis_x, axis_y, np.zeros((len(axis_x), len(axis_y))))


def trap_weights(points: np.ndarray) -> np.ndarray:
    w = np.empty(len(points))
    w[0] = 0.5 * (points[1] - points[0])
    w[-1] = 0.5 * (points[-1] - points[-2])
    w[1:-1] = 0.5 * (points[2:] - points[:-2])
    return w


def cumulative_integral(f: Fn1, origin: str = "left") -> Fn1:
    """Signed composite-trapezoid integral from an axis endpoint.

    origin="left": F(x) = integral from 0 to x, F(0) = 0.
    origin="right": F(x) = integral from h to x, F(h) = 0 (negative of the
    integral from x up to h).
    """
    cum = kernels.cumtrapz1(f.axis.points, f.values)
    if origin == "left":
        return Fn1(f.axis, cum)
    if origin == "right":
        return Fn1(f.axis, cum - cum[-1])
    raise GridError(f"unknown origin {origin!r}")


def eval_integral_to(big_f: Fn1, t: float) -> float:
    """Evaluate a cumulative integral at an off-grid endpoint t."""
    pts = big_f.axis.points
    if not (pts[0] <= t <= pts[-1]):
        raise OutOfRangeError(f"t={t} outside [{pts[0]}, {pts[-1]}]")
    return kernels.interp1(pts, big_f.values, float(t))


def derivative(f: Fn1) -> Fn1:
    """Three-point second-order finite differences (non-uniform aware)."""
    if len(f.axis) < 3:
        raise GridError("derivative needs at least 3 points")
    return Fn1(f.axis, kernels.deriv3(f.axis.points, f.values))


def _norm_values(values: np.ndarray, weights: np.ndarray, p: float) -> float:
    if p == math.inf:
        return float(np.max(np.abs(values))) if values.size else 0.0
    return float(np.sum(weights * np.abs(values) ** p) ** (1.0 / p))


def lp_norm(f: Fn1 | Fn2, p: float) -> float:
    """Discrete L_p norm with trapezoid weights; p = inf gives the max norm."""
    p = float(p)
    if not p >= 1.0:
        raise InvalidExponentError(f"p must be >= 1 or inf, got {p}")
    if isinstance(f, Fn1):
        return _norm_values(f.values, trap_weights(f.axis.points), p)
    wx = trap_weights(f.axis_x.points)
    wy = trap_weights(f.axis_y.points)
    return _norm_values(f.values, np.outer(wx, wy), p)


def interp2(g: Fn2, x: float, y: float) -> float:
    """Bilinear interpolation at a single point inside the domain."""
    if not (0.0 <= x <= g.axis_x.h):
        raise OutOfRangeError(f"x={x} outside [0, {g.axis_x.h}]")
    if not (0.0 <= y <= g.axis_y.h):
        raise OutOfRangeError(f"y={y} outside [0, {g.axis_y.h}]")
    return kernels.bilinear(
        g.axis_x.points, g.axis_y.points, g.values, float(x), float(y)
    )


def sobolev_norm_32(jet, p: float) -> float:
    """Discrete anisotropic Sobolev norm: sum of the 12 component L_p norms.

    Accepts any object with a ``fields`` mapping (i, j) -> Fn2 covering
    i = 0..3, j = 0..2.
    """
    fields = jet.fields
    expected = {(i, j) for i in range(4) for j in range(3)}
    if set(fields.keys()) != expected:
        missing = sorted(expected - set(fields.keys()))
        raise GridError(f"jet is missing fields {missing}")
    return float(sum(lp_norm(fields[key], p) for key in sorted(expected)))

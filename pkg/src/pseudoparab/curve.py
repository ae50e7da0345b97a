"""The data carrier curve y = S(x) and its inverse x = v(y).

S is strictly decreasing from (0, h2) to (h1, 0) and is represented as a
piecewise-linear interpolant of its samples, so the inverse v is exact
relative to the discrete model.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .grid import Axis, Fn1, OutOfRangeError

# Strict-decrease slack relative to h2; guards against round-off ties.
STRICTNESS_EPS = 1e-12


class CurveError(ValueError):
    pass


@dataclass(frozen=True)
class MonotoneCurve:
    h1: float
    h2: float
    s_samples: Fn1
    slope_bound: float
    inverse_slope_bound: float

    @property
    def axis(self) -> Axis:
        return self.s_samples.axis


def build_linear(h1: float, h2: float, axis: Axis) -> MonotoneCurve:
    """The straight carrier S(x) = h2 (1 - x/h1)."""
    if h1 <= 0 or h2 <= 0:
        raise CurveError("h1 and h2 must be positive")
    if axis.h != h1:
        raise CurveError(f"axis spans [0, {axis.h}], expected [0, {h1}]")
    vals = h2 * (1.0 - axis.points / h1)
    vals = vals.copy()
    vals[0] = h2
    vals[-1] = 0.0
    return MonotoneCurve(
        h1=float(h1),
        h2=float(h2),
        s_samples=Fn1(axis, vals),
        slope_bound=h2 / h1,
        inverse_slope_bound=h1 / h2,
    )


def build_from_samples(h1: float, h2: float, samples: Fn1) -> MonotoneCurve:
    """Validate sampled curve data against the carrier hypotheses."""
    if h1 <= 0 or h2 <= 0:
        raise CurveError("h1 and h2 must be positive")
    axis = samples.axis
    if axis.h != h1:
        raise CurveError(f"curve axis spans [0, {axis.h}], expected [0, {h1}]")
    vals = samples.values.copy()
    eps = STRICTNESS_EPS * h2
    if abs(vals[0] - h2) > eps:
        raise CurveError(f"S(0) = {vals[0]}, expected h2 = {h2}")
    if abs(vals[-1]) > eps:
        raise CurveError(f"S(h1) = {vals[-1]}, expected 0")
    vals[0] = h2
    vals[-1] = 0.0
    drops = vals[:-1] - vals[1:]
    bad = np.where(drops < eps)[0]
    if len(bad):
        k = int(bad[0])
        raise CurveError(
            f"samples not strictly decreasing at index {k}: "
            f"S(x[{k}]) = {vals[k]}, S(x[{k + 1}]) = {vals[k + 1]}"
        )
    dx = np.diff(axis.points)
    quotients = drops / dx
    slope_bound = float(np.max(quotients))
    inverse_slope_bound = float(np.max(dx / drops))
    if inverse_slope_bound > 1e8 * (h1 / h2):
        warnings.warn(
            "curve has a nearly flat segment; the inverse difference "
            f"quotient reaches {inverse_slope_bound:.3g}, which degrades "
            "quadrature along the inverse",
            RuntimeWarning,
            stacklevel=2,
        )
    return MonotoneCurve(
        h1=float(h1),
        h2=float(h2),
        s_samples=Fn1(axis, vals),
        slope_bound=slope_bound,
        inverse_slope_bound=inverse_slope_bound,
    )


def s_many(c: MonotoneCurve, x: np.ndarray) -> np.ndarray:
    """Vectorized S(x) without range checks (callers pass grid nodes)."""
    return kernels.interp1(c.axis.points, c.s_samples.values, np.asarray(x, float))


def v_many(c: MonotoneCurve, y: np.ndarray) -> np.ndarray:
    """Vectorized inverse v(y); exact for the piecewise-linear carrier."""
    xs = c.axis.points[::-1].copy()
    ss = c.s_samples.values[::-1].copy()
    return kernels.interp1(ss, xs, np.asarray(y, float))


def s_at(c: MonotoneCurve, x: float) -> float:
    if not (0.0 <= x <= c.h1):
        raise OutOfRangeError(f"x={x} outside [0, {c.h1}]")
    return float(s_many(c, float(x)))


def v_at(c: MonotoneCurve, y: float) -> float:
    if not (0.0 <= y <= c.h2):
        raise OutOfRangeError(f"y={y} outside [0, {c.h2}]")
    return float(v_many(c, float(y)))

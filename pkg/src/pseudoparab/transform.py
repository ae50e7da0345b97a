"""Conversion between the two Cauchy-data formulations.

Forward: integrate the non-classical bundle along the carrier curve to
obtain the six classical traces (a strict dependency cascade).  Inverse:
differentiate compatibility functions F1..F4 of the classical traces to
recover the non-classical bundle; the same F's feed the agreement
diagnostic, which flags classical data whose difference-quotient norms grow
under refinement (no solution with integrable third derivatives exists for
such data).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .curve import MonotoneCurve, build_from_samples, s_many, v_many
from .data import ClassicalData, CornerValues, DataError, NonClassicalData, TRACE_KEYS
from .grid import Axis, Fn1, Fn2, cumulative_integral, derivative, lp_norm

COMPAT_NAMES = ("F1", "F2", "F3", "F4")


@dataclass(frozen=True)
class AgreementEntry:
    name: str
    values: Fn1
    derivative_norms: list[float]
    refinement_ratio: float
    flagged: bool


@dataclass(frozen=True)
class AgreementReport:
    entries: dict[str, AgreementEntry]
    threshold: float
    levels: int

    @property
    def any_flagged(self) -> bool:
        return any(e.flagged for e in self.entries.values())

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "levels": self.levels,
            "entries": {
                name: {
                    "norms": e.derivative_norms,
                    "ratio": e.refinement_ratio,
                    "flagged": e.flagged,
                }
                for name, e in self.entries.items()
            },
        }


def _check_domain(c: MonotoneCurve, ax: Axis, ay: Axis) -> None:
    if c.h1 != ax.h or c.h2 != ay.h:
        raise DataError(
            f"curve on [0,{c.h1}]x[0,{c.h2}] does not match grid "
            f"[0,{ax.h}]x[0,{ay.h}]"
        )


def curve_trace_x(g: Fn2, c: MonotoneCurve) -> Fn1:
    """Trace g(x, S(x)) on the x-axis."""
    _check_domain(c, g.axis_x, g.axis_y)
    xs = g.axis_x.points
    vals = kernels.bilinear(xs, g.axis_y.points, g.values, xs, s_many(c, xs))
    return Fn1(g.axis_x, vals)


def curve_trace_y(g: Fn2, c: MonotoneCurve) -> Fn1:
    """Trace g(v(y), y) on the y-axis."""
    _check_domain(c, g.axis_x, g.axis_y)
    ys = g.axis_y.points
    vals = kernels.bilinear(g.axis_x.points, ys, g.values, v_many(c, ys), ys)
    return Fn1(g.axis_y, vals)


def _curve_integral_y(f: Fn1, c: MonotoneCurve, ax: Axis) -> Fn1:
    """x |-> integral of f from h2 down to S(x) (signed, S(x) <= h2)."""
    cum = cumulative_integral(f, origin="right")
    vals = kernels.interp1(cum.axis.points, cum.values, s_many(c, ax.points))
    return Fn1(ax, vals)


def _compose_v(f: Fn1, c: MonotoneCurve, ay: Axis) -> Fn1:
    """Resample an x-axis function through the inverse curve: y |-> f(v(y))."""
    vals = kernels.interp1(f.axis.points, f.values, v_many(c, ay.points))
    return Fn1(ay, vals)


def to_classical(nc: NonClassicalData, c: MonotoneCurve) -> ClassicalData:
    """Forward cascade: build the six classical traces from the
    non-classical bundle, in dependency order."""
    ax, ay = nc.axis_x, nc.axis_y
    _check_domain(c, ax, ay)
    cx = lambda f: cumulative_integral(f, origin="left")
    zc = nc.corner.get

    t21 = zc(2, 1) + cx(nc.z31) + _curve_integral_y(nc.z22, c, ax)
    t20 = zc(2, 0) + cx(nc.z30) + _curve_integral_y(_compose_v(t21, c, ay), c, ax)
    t11 = zc(1, 1) + cx(t21) + _curve_integral_y(nc.z12, c, ax)
    t01 = zc(0, 1) + cx(t11) + _curve_integral_y(nc.z02, c, ax)
    t10 = zc(1, 0) + cx(t20) + _curve_integral_y(_compose_v(t11, c, ay), c, ax)
    t00 = zc(0, 0) + cx(t10) + _curve_integral_y(_compose_v(t01, c, ay), c, ax)

    return ClassicalData(
        traces={
            (0, 0): t00,
            (1, 0): t10,
            (2, 0): t20,
            (0, 1): t01,
            (1, 1): t11,
            (2, 1): t21,
        },
        z4=Fn1(ay, nc.z22.values),
    )


def compatibility_functions(
    cl: ClassicalData, c: MonotoneCurve
) -> dict[str, Fn1]:
    """The four functions whose derivatives recover the third-order data.

    F1, F2 live on the x-axis; F3, F4 on the y-axis.  Classical data only
    admits a solution when all four are (discretely) differentiable.
    """
    ax, ay = cl.axis_x, cl.axis_y
    _check_domain(c, ax, ay)
    vy = v_many(c, ay.points)

    def cum_at_v(f: Fn1) -> Fn1:
        cum = cumulative_integral(f, origin="left")
        return Fn1(ay, kernels.interp1(ax.points, cum.values, vy))

    f1 = cl.traces[(2, 0)] - _curve_integral_y(
        _compose_v(cl.traces[(2, 1)], c, ay), c, ax
    )
    f2 = cl.traces[(2, 1)] - _curve_integral_y(cl.z4, c, ax)
    f3 = _compose_v(cl.traces[(0, 1)], c, ay) - cum_at_v(cl.traces[(1, 1)])
    f4 = _compose_v(cl.traces[(1, 1)], c, ay) - cum_at_v(cl.traces[(2, 1)])
    return {"F1": f1, "F2": f2, "F3": f3, "F4": f4}


def _coarse_axis(axis: Axis, factor: int) -> Axis:
    n = len(axis) - 1
    if factor == 1:
        return axis
    if n % factor == 0 and n // factor >= 2:
        return Axis(axis.points[::factor])
    cells = max(n // factor, 2)
    return Axis(np.linspace(0.0, axis.h, cells + 1))


def _resample_fn1(f: Fn1, axis: Axis) -> Fn1:
    return Fn1(axis, kernels.interp1(f.axis.points, f.values, axis.points))


def _coarsen(
    cl: ClassicalData, c: MonotoneCurve, factor: int
) -> tuple[ClassicalData, MonotoneCurve]:
    ax = _coarse_axis(cl.axis_x, factor)
    ay = _coarse_axis(cl.axis_y, factor)
    traces = {key: _resample_fn1(cl.traces[key], ax) for key in TRACE_KEYS}
    coarse_cl = ClassicalData(traces=traces, z4=_resample_fn1(cl.z4, ay))
    curve_axis = _coarse_axis(c.axis, factor)
    coarse_curve = build_from_samples(
        c.h1, c.h2, _resample_fn1(c.s_samples, curve_axis)
    )
    return coarse_cl, coarse_curve


def agreement_check(
    cl: ClassicalData,
    c: MonotoneCurve,
    levels: int = 2,
    threshold: float = 4.0,
) -> AgreementReport:
    """Refinement diagnostic for the agreement conditions.

    Computes the sup norm of the discrete derivative of each compatibility
    function on ``levels`` nested coarsenings plus the given grid.  A ratio
    finest/coarsest that keeps growing (a jump doubles it per halving)
    flags data with no admissible solution; smooth data gives ratios
    near 1.  The sup norm is used regardless of the domain exponent: finite
    p difference-quotient norms of a jump grow slower than 2x per halving
    and would blunt the diagnostic.
    """
    if levels < 2:
        raise DataError("agreement check needs at least 2 refinement levels")
    per_level: list[dict[str, Fn1]] = []
    for k in range(levels, -1, -1):  # coarsest first
        if k == 0:
            level_cl, level_curve = cl, c
        else:
            level_cl, level_curve = _coarsen(cl, c, 2**k)
        per_level.append(compatibility_functions(level_cl, level_curve))
    finest = per_level[-1]
    entries = {}
    for name in COMPAT_NAMES:
        norms = [lp_norm(derivative(fs[name]), math.inf) for fs in per_level]
        if norms[0] == 0.0:
            ratio = 1.0 if norms[-1] == 0.0 else math.inf
        else:
            ratio = norms[-1] / norms[0]
        entries[name] = AgreementEntry(
            name=name,
            values=finest[name],
            derivative_norms=norms,
            refinement_ratio=float(ratio),
            flagged=bool(ratio >= threshold),
        )
    return AgreementReport(entries=entries, threshold=threshold, levels=levels)


def to_nonclassical(
    cl: ClassicalData,
    c: MonotoneCurve,
    z32: Fn2,
    levels: int = 2,
    threshold: float = 4.0,
) -> tuple[NonClassicalData, AgreementReport]:
    """Inverse map: differentiate the compatibility functions to recover
    the non-classical bundle; z32 passes through unchanged."""
    ax, ay = cl.axis_x, cl.axis_y
    _check_domain(c, ax, ay)
    if not (
        z32.axis_x.points.shape == ax.points.shape
        and np.array_equal(z32.axis_x.points, ax.points)
        and np.array_equal(z32.axis_y.points, ay.points)
    ):
        raise DataError("z32 axes do not match the classical data axes")
    compat = compatibility_functions(cl, c)
    corner = CornerValues(
        **{
            f"z{i}{j}": float(cl.traces[(i, j)].values[0])
            for (i, j) in TRACE_KEYS
        }
    )
    nc = NonClassicalData(
        z32=z32,
        z30=derivative(compat["F1"]),
        z31=derivative(compat["F2"]),
        z02=derivative(compat["F3"]),
        z12=derivative(compat["F4"]),
        z22=Fn1(ay, cl.z4.values),
        corner=corner,
    )
    report = agreement_check(cl, c, levels=levels, threshold=threshold)
    return nc, report

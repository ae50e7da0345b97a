"""Jet reconstruction, operator application, and the Picard solver.

The highest mixed derivative w determines every lower derivative by
integrating outward from the carrier curve (a Volterra-type structure), so
the equation collapses to a fixed-point problem for w alone.  Picard
iteration contracts whenever the coefficient norms are small enough;
divergence is reported, not raised.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .curve import MonotoneCurve, s_many, v_many
from .data import CoefficientSet, DataError, DerivativeJet, NonClassicalData
from .grid import Fn2, same_axis
from .transform import _check_domain, to_classical


@dataclass(frozen=True)
class ConvergenceReport:
    iterations: int
    update_norms: list[float]
    final_residual: float
    converged: bool
    tolerance: float

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "update_norms": self.update_norms,
            "final_residual": self.final_residual,
            "converged": self.converged,
            "tolerance": self.tolerance,
        }


def _check_shapes(w: Fn2, nc: NonClassicalData, c: MonotoneCurve) -> None:
    if not (same_axis(w.axis_x, nc.axis_x) and same_axis(w.axis_y, nc.axis_y)):
        raise DataError("w axes do not match the data axes")
    _check_domain(c, w.axis_x, w.axis_y)


def reconstruct_jet(
    w: Fn2, nc: NonClassicalData, c: MonotoneCurve
) -> DerivativeJet:
    """Rebuild all 12 derivative fields from w and the curve data.

    March order: the g_{i,2} family integrates w in x from the curve
    (signed, x may lie on either side of v(y)); the g_{3,j} family
    integrates in y from S(x); the remaining fields start from the curve
    traces produced by the forward cascade and integrate in y.
    """
    _check_shapes(w, nc, c)
    ax, ay = w.axis_x, w.axis_y
    xs, ys = ax.points, ay.points
    vy = v_many(c, ys)
    sx = s_many(c, xs)
    fields: dict[tuple[int, int], Fn2] = {(3, 2): w}

    line_i2 = {2: nc.z22, 1: nc.z12, 0: nc.z02}
    for i in (2, 1, 0):
        cum = kernels.cumtrapz2_axis0(xs, fields[(i + 1, 2)].values)
        base = kernels.interp_columns(xs, cum, vy)
        fields[(i, 2)] = Fn2(
            ax, ay, line_i2[i].values[None, :] + cum - base[None, :]
        )

    line_3j = {1: nc.z31, 0: nc.z30}
    for j in (1, 0):
        cum = kernels.cumtrapz2_axis1(ys, fields[(3, j + 1)].values)
        base = kernels.interp_rows(ys, cum, sx)
        fields[(3, j)] = Fn2(
            ax, ay, line_3j[j].values[:, None] + cum - base[:, None]
        )

    traces = to_classical(nc, c).traces
    for i in (0, 1, 2):
        for j in (1, 0):
            cum = kernels.cumtrapz2_axis1(ys, fields[(i, j + 1)].values)
            base = kernels.interp_rows(ys, cum, sx)
            fields[(i, j)] = Fn2(
                ax, ay, traces[(i, j)].values[:, None] + cum - base[:, None]
            )

    return DerivativeJet(fields=fields)


def apply_operator(jet: DerivativeJet, coeffs: CoefficientSet) -> Fn2:
    """Nodal evaluation of the full differential operator on a jet."""
    if not (
        same_axis(jet.axis_x, coeffs.axis_x)
        and same_axis(jet.axis_y, coeffs.axis_y)
    ):
        raise DataError("coefficient axes do not match the jet axes")
    out = jet.fields[(3, 2)].values.copy()
    for key, a in sorted(coeffs.a.items()):
        out += a.values * jet.fields[key].values
    return Fn2(jet.axis_x, jet.axis_y, out)


def _lower_order_part(
    jet: DerivativeJet, coeffs: CoefficientSet
) -> np.ndarray:
    out = np.zeros_like(jet.fields[(3, 2)].values)
    for key, a in sorted(coeffs.a.items()):
        out += a.values * jet.fields[key].values
    return out


def residual(
    w: Fn2,
    nc: NonClassicalData,
    coeffs: CoefficientSet,
    c: MonotoneCurve,
) -> float:
    """Sup norm of the equation defect for a candidate w."""
    jet = reconstruct_jet(w, nc, c)
    defect = apply_operator(jet, coeffs).values - nc.z32.values
    return float(np.max(np.abs(defect)))


def solve_picard(
    nc: NonClassicalData,
    coeffs: CoefficientSet,
    c: MonotoneCurve,
    tol: float = 1e-10,
    max_iter: int = 100,
    relaxation: float = 1.0,
) -> tuple[DerivativeJet, ConvergenceReport]:
    """Successive substitution for w, starting from w = z32.

    Stops when the sup norm of the update falls below
    tol * (1 + sup|z32|) or after max_iter sweeps.  With all coefficients
    zero the first sweep already reproduces w = z32 exactly.
    """
    if tol <= 0:
        raise DataError("tol must be positive")
    if max_iter < 1:
        raise DataError("max_iter must be at least 1")
    if not 0.0 < relaxation <= 1.0:
        raise DataError("relaxation must lie in (0, 1]")
    if not (
        same_axis(nc.axis_x, coeffs.axis_x)
        and same_axis(nc.axis_y, coeffs.axis_y)
    ):
        raise DataError("coefficient axes do not match the data axes")

    z32 = nc.z32.values
    scale = 1.0 + float(np.max(np.abs(z32))) if z32.size else 1.0
    w = z32.copy()
    update_norms: list[float] = []
    converged = False
    iterations = 0
    # Divergent iterates may overflow before the finiteness check trips;
    # that is a reported outcome, not a warning-worthy event.
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(max_iter):
            iterations += 1
            jet = reconstruct_jet(Fn2(nc.axis_x, nc.axis_y, w), nc, c)
            w_next = z32 - _lower_order_part(jet, coeffs)
            if relaxation != 1.0:
                w_next = (1.0 - relaxation) * w + relaxation * w_next
            update = float(np.max(np.abs(w_next - w)))
            update_norms.append(update)
            w = w_next
            if not np.all(np.isfinite(w)):
                break
            if update <= tol * scale:
                converged = True
                break

    if not np.all(np.isfinite(w)):
        # Diverged past overflow: report on the last finite iterate.
        w = np.nan_to_num(w, nan=0.0, posinf=0.0, neginf=0.0)
    w_fn = Fn2(nc.axis_x, nc.axis_y, w)
    jet = reconstruct_jet(w_fn, nc, c)
    final_residual = float(
        np.max(np.abs(apply_operator(jet, coeffs).values - z32))
    )
    report = ConvergenceReport(
        iterations=iterations,
        update_norms=update_norms,
        final_residual=final_residual,
        converged=converged,
        tolerance=float(tol),
    )
    return jet, report

"""Manufactured polynomial solutions and grid-convergence studies.

Everything here is closed-form: derivatives are exact coefficient
manipulations and all generated data comes from direct evaluation, so the
generated bundles serve as independent oracles for the transform and
solver paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .curve import MonotoneCurve, s_many, v_many
from .data import (
    CoefficientSet,
    ClassicalData,
    CornerValues,
    DataError,
    DerivativeJet,
    Domain,
    JET_KEYS,
    NonClassicalData,
    TRACE_KEYS,
)
from .grid import Axis, Fn1, Fn2, lp_norm
from .solver import apply_operator, solve_picard
from .transform import to_classical, to_nonclassical

# Errors below this (relative) level are treated as exact in order tables.
ROUNDOFF_LEVEL = 1e-11

DEFAULT_POLY_COEFF = (
    # u = x^3 y^2 + x^2 y + x + 1: nonzero data in every slot class.
    (1.0, 0.0, 0.0),
    (1.0, 0.0, 0.0),
    (0.0, 1.0, 0.0),
    (0.0, 0.0, 1.0),
)


@dataclass(frozen=True)
class PolySolution:
    """u(x, y) = sum_{m,n} coeff[m][n] x^m y^n."""

    coeff: np.ndarray

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coeff, dtype=np.float64))
        if not np.all(np.isfinite(c)):
            raise DataError("polynomial coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeff", c)

    def __call__(self, x, y):
        return npoly.polyval2d(np.asarray(x, float), np.asarray(y, float), self.coeff)


def default_solution() -> PolySolution:
    return PolySolution(np.asarray(DEFAULT_POLY_COEFF))


def exact_derivative(ps: PolySolution, i: int, j: int) -> PolySolution:
    """Closed-form mixed derivative; over-differentiation gives zero."""
    if i < 0 or j < 0:
        raise DataError("derivative orders must be non-negative")
    c = ps.coeff
    for _ in range(i):
        if c.shape[0] == 1:
            c = np.zeros((1, 1))
            break
        c = c[1:, :] * np.arange(1, c.shape[0])[:, None]
    for _ in range(j):
        if c.shape[1] == 1:
            c = np.zeros((1, 1))
            break
        c = c[:, 1:] * np.arange(1, c.shape[1])[None, :]
    return PolySolution(c)


def sample_exact_jet(ps: PolySolution, ax: Axis, ay: Axis) -> DerivativeJet:
    """Sample all 12 exact derivative fields on the grid."""
    xg, yg = np.meshgrid(ax.points, ay.points, indexing="ij")
    fields = {}
    for (i, j) in JET_KEYS:
        vals = np.broadcast_to(
            exact_derivative(ps, i, j)(xg, yg), xg.shape
        ).astype(float)
        fields[(i, j)] = Fn2(ax, ay, vals)
    return DerivativeJet(fields=fields)


def generate_nonclassical(
    ps: PolySolution,
    c: MonotoneCurve,
    coeffs: CoefficientSet | None,
    domain: Domain,
    ax: Axis,
    ay: Axis,
) -> NonClassicalData:
    """Sample the non-classical bundle of an exact solution.

    z32 is the full operator applied to the exact (sampled) jet, so the
    bundle is consistent with the equation by construction.
    """
    jet = sample_exact_jet(ps, ax, ay)
    if coeffs is None:
        z32 = Fn2(ax, ay, jet.fields[(3, 2)].values.copy())
    else:
        z32 = apply_operator(jet, coeffs)
    sx = s_many(c, ax.points)
    vy = v_many(c, ay.points)

    def on_curve_x(i, j):
        d = exact_derivative(ps, i, j)
        return Fn1(ax, np.broadcast_to(d(ax.points, sx), ax.points.shape).astype(float))

    def on_curve_y(i, j):
        d = exact_derivative(ps, i, j)
        return Fn1(ay, np.broadcast_to(d(vy, ay.points), ay.points.shape).astype(float))

    corner = CornerValues(
        **{
            f"z{i}{j}": float(exact_derivative(ps, i, j)(0.0, c.h2))
            for (i, j) in TRACE_KEYS
        }
    )
    return NonClassicalData(
        z32=z32,
        z30=on_curve_x(3, 0),
        z31=on_curve_x(3, 1),
        z02=on_curve_y(0, 2),
        z12=on_curve_y(1, 2),
        z22=on_curve_y(2, 2),
        corner=corner,
    )


def generate_classical(
    ps: PolySolution,
    c: MonotoneCurve,
    domain: Domain,
    ax: Axis,
    ay: Axis,
) -> ClassicalData:
    """Sample the classical traces of an exact solution."""
    sx = s_many(c, ax.points)
    vy = v_many(c, ay.points)
    traces = {}
    for (i, j) in TRACE_KEYS:
        d = exact_derivative(ps, i, j)
        traces[(i, j)] = Fn1(
            ax, np.broadcast_to(d(ax.points, sx), ax.points.shape).astype(float)
        )
    d22 = exact_derivative(ps, 2, 2)
    z4 = Fn1(ay, np.broadcast_to(d22(vy, ay.points), ay.points.shape).astype(float))
    return ClassicalData(traces=traces, z4=z4)


@dataclass(frozen=True)
class JetErrorTable:
    per_field: dict[tuple[int, int], float]
    total: float

    def to_dict(self) -> dict:
        return {
            "per_field": {f"g{i}{j}": v for (i, j), v in sorted(self.per_field.items())},
            "total": self.total,
        }


def jet_error(jet: DerivativeJet, ps: PolySolution, p: float) -> JetErrorTable:
    """L_p error of every jet field against the exact derivatives, plus the
    anisotropic Sobolev total (the sum of the 12 component norms)."""
    exact = sample_exact_jet(ps, jet.axis_x, jet.axis_y)
    per_field = {}
    for key in JET_KEYS:
        diff = Fn2(
            jet.axis_x,
            jet.axis_y,
            jet.fields[key].values - exact.fields[key].values,
        )
        per_field[key] = lp_norm(diff, p)
    return JetErrorTable(per_field=per_field, total=float(sum(per_field.values())))


def observed_order(e_coarse: float, e_fine: float, scale: float = 1.0) -> float | str:
    """log2 error ratio; 'exact' when both errors sit at round-off level."""
    tiny = ROUNDOFF_LEVEL * max(scale, 1.0)
    if e_coarse < tiny and e_fine < tiny:
        return "exact"
    if e_fine == 0.0:
        return math.inf
    return float(math.log2(e_coarse / e_fine))


@dataclass(frozen=True)
class StudyRecord:
    size: int
    solve_error_sup: float
    solver_converged: bool
    solver_iterations: int
    roundtrip_error_sup: float
    jet_errors: JetErrorTable


@dataclass(frozen=True)
class StudyResult:
    records: list[StudyRecord]
    solve_orders: list[float | str]
    roundtrip_orders: list[float | str]

    def to_dict(self) -> dict:
        return {
            "sizes": [r.size for r in self.records],
            "solve_error_sup": [r.solve_error_sup for r in self.records],
            "solver_converged": [r.solver_converged for r in self.records],
            "solver_iterations": [r.solver_iterations for r in self.records],
            "roundtrip_error_sup": [r.roundtrip_error_sup for r in self.records],
            "solve_orders": list(self.solve_orders),
            "roundtrip_orders": list(self.roundtrip_orders),
        }


def _roundtrip_error(nc: NonClassicalData, c: MonotoneCurve) -> float:
    cl = to_classical(nc, c)
    nc2, _ = to_nonclassical(cl, c, nc.z32)
    errs = [
        float(np.max(np.abs(getattr(nc2, name).values - getattr(nc, name).values)))
        for name in ("z30", "z31", "z02", "z12")
    ]
    return max(errs)


def convergence_study(
    ps: PolySolution,
    grid_sizes: list[int],
    domain: Domain = Domain(1.0, 1.0, 2.0),
    curve_builder=None,
    coeff_builder=None,
    tol: float = 1e-10,
    max_iter: int = 100,
) -> StudyResult:
    """Run generate -> solve -> error and generate -> round-trip -> error
    over a doubling sequence of grid sizes; report observed orders.

    curve_builder(axis) -> MonotoneCurve defaults to the linear carrier;
    coeff_builder(ax, ay) -> CoefficientSet defaults to zero coefficients.
    """
    if len(grid_sizes) < 3:
        raise DataError("need at least 3 grid sizes")
    for a, b in zip(grid_sizes, grid_sizes[1:]):
        if b != 2 * a:
            raise DataError(f"grid sizes must double: {a} -> {b}")
    if curve_builder is None:
        from .curve import build_linear

        curve_builder = lambda axis: build_linear(domain.h1, domain.h2, axis)

    records = []
    scale = float(np.max(np.abs(ps.coeff))) or 1.0
    for n in grid_sizes:
        ax = Axis.uniform(domain.h1, n)
        ay = Axis.uniform(domain.h2, n)
        c = curve_builder(ax)
        coeffs = (
            CoefficientSet.zeros(ax, ay)
            if coeff_builder is None
            else coeff_builder(ax, ay)
        )
        nc = generate_nonclassical(ps, c, coeffs, domain, ax, ay)
        jet, report = solve_picard(nc, coeffs, c, tol=tol, max_iter=max_iter)
        errs = jet_error(jet, ps, math.inf)
        records.append(
            StudyRecord(
                size=n,
                solve_error_sup=errs.per_field[(0, 0)],
                solver_converged=report.converged,
                solver_iterations=report.iterations,
                roundtrip_error_sup=_roundtrip_error(nc, c),
                jet_errors=errs,
            )
        )
    solve_orders = [
        observed_order(a.solve_error_sup, b.solve_error_sup, scale)
        for a, b in zip(records, records[1:])
    ]
    roundtrip_orders = [
        observed_order(a.roundtrip_error_sup, b.roundtrip_error_sup, scale)
        for a, b in zip(records, records[1:])
    ]
    return StudyResult(
        records=records,
        solve_orders=solve_orders,
        roundtrip_orders=roundtrip_orders,
    )

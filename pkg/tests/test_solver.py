import math

import numpy as np
import pytest

from pseudoparab.data import (
    CoefficientSet,
    DataError,
    Domain,
    NonClassicalData,
    sample_callable2,
    step_field,
)
from pseudoparab.grid import Axis, Fn2, derivative, Fn1
from pseudoparab.mms import (
    PolySolution,
    generate_nonclassical,
    sample_exact_jet,
)
from pseudoparab.solver import (
    apply_operator,
    reconstruct_jet,
    residual,
    solve_picard,
)

from conftest import sup, unit_axes, unit_linear_curve


def poly(entries):
    """PolySolution from {(m, n): coeff} entries."""
    m = max(k[0] for k in entries) + 1
    n = max(k[1] for k in entries) + 1
    c = np.zeros((m, n))
    for (i, j), v in entries.items():
        c[i, j] = v
    return PolySolution(c)


X2Y = poly({(2, 1): 1.0})
X3Y2 = poly({(3, 2): 1.0})


def exact_bundle(ps, n, coeffs=None):
    ax, ay = unit_axes(n)
    c = unit_linear_curve(n)
    nc = generate_nonclassical(ps, c, coeffs, Domain(1.0, 1.0), ax, ay)
    return ax, ay, c, nc


class TestReconstructJet:
    def test_zero(self):
        ax, ay = unit_axes(8)
        jet = reconstruct_jet(
            Fn2.zeros(ax, ay),
            NonClassicalData.zeros(ax, ay),
            unit_linear_curve(8),
        )
        for fn in jet.fields.values():
            assert np.all(fn.values == 0.0)

    def test_quadratic_solution_from_zero_top(self):
        # u = x^2 y has g32 = 0, so the jet is rebuilt from the line and
        # curve data alone.  Affine integrands keep every step exact up to
        # the trace interpolation, hence second-order accuracy.
        errs = []
        for n in (32, 64):
            ax, ay, c, nc = exact_bundle(X2Y, n)
            jet = reconstruct_jet(Fn2.zeros(ax, ay), nc, c)
            exact = sample_exact_jet(X2Y, ax, ay)
            errs.append(
                max(
                    sup(jet.fields[k].values - exact.fields[k].values)
                    for k in jet.fields
                )
            )
        assert errs[0] <= 1e-2
        assert errs[1] <= errs[0] / 3.0 or errs[1] < 1e-13

    def test_quintic_solution_second_order(self):
        # u = x^3 y^2, w = g32 = 12 everywhere.
        errs = []
        for n in (32, 64):
            ax, ay, c, nc = exact_bundle(X3Y2, n)
            w = Fn2(ax, ay, np.full((n + 1, n + 1), 12.0))
            jet = reconstruct_jet(w, nc, c)
            exact = sample_exact_jet(X3Y2, ax, ay)
            errs.append(sup(jet.fields[(0, 0)].values - exact.fields[(0, 0)].values))
        assert math.log2(errs[0] / errs[1]) > 1.8

    def test_top_field_is_input(self):
        ax, ay, c, nc = exact_bundle(X3Y2, 16)
        w = Fn2(ax, ay, np.full((17, 17), 12.0))
        jet = reconstruct_jet(w, nc, c)
        assert jet.fields[(3, 2)] is w

    def test_internal_consistency(self):
        # Differentiating g00 in y must reproduce g01 (and so on up the
        # ladder) to second order, independent of any exact solution.
        ax, ay, c, nc = exact_bundle(X3Y2, 32)
        w = Fn2(ax, ay, np.full((33, 33), 12.0))
        jet = reconstruct_jet(w, nc, c)
        for (i, j) in ((0, 0), (1, 0), (2, 0), (0, 1)):
            rows_d = np.stack(
                [
                    derivative(Fn1(ay, jet.fields[(i, j)].values[r, :])).values
                    for r in range(33)
                ]
            )
            assert sup(rows_d - jet.fields[(i, j + 1)].values) <= 0.05

    def test_axis_mismatch(self):
        ax, ay = unit_axes(8)
        with pytest.raises(DataError):
            reconstruct_jet(
                Fn2.zeros(Axis.uniform(1.0, 16), Axis.uniform(1.0, 16)),
                NonClassicalData.zeros(ax, ay),
                unit_linear_curve(8),
            )


class TestApplyOperator:
    def test_zero_coefficients(self):
        ax, ay, c, nc = exact_bundle(X3Y2, 16)
        jet = sample_exact_jet(X3Y2, ax, ay)
        out = apply_operator(jet, CoefficientSet.zeros(ax, ay))
        assert np.array_equal(out.values, jet.fields[(3, 2)].values)

    def test_identity_zero_order(self):
        ax, ay = unit_axes(16)
        jet = sample_exact_jet(X3Y2, ax, ay)
        coeffs = CoefficientSet.zeros(ax, ay).replace(
            (0, 0), sample_callable2(lambda x, y: 1.0 + 0.0 * x, ax, ay)
        )
        out = apply_operator(jet, coeffs)
        expected = jet.fields[(3, 2)].values + jet.fields[(0, 0)].values
        assert np.array_equal(out.values, expected)


class TestResidual:
    def test_exact_candidate(self):
        ax, ay, c, nc = exact_bundle(X3Y2, 16)
        coeffs = CoefficientSet.zeros(ax, ay)
        assert residual(nc.z32, nc, coeffs, c) == 0.0

    def test_shifted_candidate(self):
        # With no lower-order terms the defect equals the shift itself.
        ax, ay, c, nc = exact_bundle(X3Y2, 16)
        coeffs = CoefficientSet.zeros(ax, ay)
        shifted = Fn2(ax, ay, nc.z32.values + 1.0)
        assert residual(shifted, nc, coeffs, c) == pytest.approx(1.0)


class TestSolvePicard:
    def test_zero_coefficients_one_sweep(self):
        ax, ay, c, nc = exact_bundle(X3Y2, 16)
        jet, report = solve_picard(nc, CoefficientSet.zeros(ax, ay), c)
        assert report.converged
        assert report.iterations == 1
        assert report.update_norms == [0.0]
        assert np.array_equal(jet.fields[(3, 2)].values, nc.z32.values)

    def test_unit_zero_order_coefficient(self):
        # a00 = 1: the bundle is manufactured with the same coefficient,
        # so the fixed point reproduces u = x^3 y^2 to second order.
        errs = []
        for n in (32, 64):
            ax, ay = unit_axes(n)
            coeffs = CoefficientSet.zeros(ax, ay).replace(
                (0, 0), sample_callable2(lambda x, y: 1.0 + 0.0 * x, ax, ay)
            )
            _, _, c, nc = exact_bundle(X3Y2, n, coeffs)
            jet, report = solve_picard(nc, coeffs, c, tol=1e-12)
            assert report.converged
            assert report.final_residual <= 1e-10
            exact = sample_exact_jet(X3Y2, ax, ay)
            errs.append(sup(jet.fields[(0, 0)].values - exact.fields[(0, 0)].values))
        assert math.log2(errs[0] / errs[1]) > 1.8

    def test_discontinuous_coefficient(self):
        n = 32
        ax, ay = unit_axes(n)
        coeffs = CoefficientSet.zeros(ax, ay).replace(
            (2, 2), step_field(ax, ay, "x", 0.5, 0.0, 1.0)
        )
        _, _, c, nc = exact_bundle(X3Y2, n, coeffs)
        jet, report = solve_picard(nc, coeffs, c, tol=1e-12)
        assert report.converged
        exact = sample_exact_jet(X3Y2, ax, ay)
        assert sup(jet.fields[(0, 0)].values - exact.fields[(0, 0)].values) < 1e-2

    def test_relaxation_reaches_same_fixed_point(self):
        n = 16
        ax, ay = unit_axes(n)
        coeffs = CoefficientSet.zeros(ax, ay).replace(
            (0, 0), sample_callable2(lambda x, y: 1.0 + 0.0 * x, ax, ay)
        )
        _, _, c, nc = exact_bundle(X3Y2, n, coeffs)
        full, _ = solve_picard(nc, coeffs, c, tol=1e-12)
        damped, rep = solve_picard(nc, coeffs, c, tol=1e-12, relaxation=0.5)
        assert rep.converged
        assert sup(full.fields[(3, 2)].values - damped.fields[(3, 2)].values) < 1e-9

    def test_iteration_cap_reported(self):
        n = 16
        ax, ay = unit_axes(n)
        coeffs = CoefficientSet.zeros(ax, ay).replace(
            (0, 0), sample_callable2(lambda x, y: 1e6 + 0.0 * x, ax, ay)
        )
        _, _, c, nc = exact_bundle(X3Y2, n, coeffs)
        jet, report = solve_picard(nc, coeffs, c, max_iter=3)
        assert not report.converged
        assert report.iterations == 3
        assert len(report.update_norms) == 3

    def test_overflow_divergence_reported(self):
        n = 8
        ax, ay = unit_axes(n)
        coeffs = CoefficientSet.zeros(ax, ay).replace(
            (0, 0), sample_callable2(lambda x, y: 1e80 + 0.0 * x, ax, ay)
        )
        _, _, c, nc = exact_bundle(X3Y2, n, coeffs)
        jet, report = solve_picard(nc, coeffs, c, max_iter=50)
        assert not report.converged
        assert report.iterations < 50
        assert np.all(np.isfinite(jet.fields[(0, 0)].values))

    def test_parameter_validation(self):
        ax, ay, c, nc = exact_bundle(X3Y2, 8)
        coeffs = CoefficientSet.zeros(ax, ay)
        with pytest.raises(DataError):
            solve_picard(nc, coeffs, c, tol=-1.0)
        with pytest.raises(DataError):
            solve_picard(nc, coeffs, c, max_iter=0)
        with pytest.raises(DataError):
            solve_picard(nc, coeffs, c, relaxation=1.5)

    def test_superposition_zero_coefficients(self):
        # With no lower-order terms the whole pipeline is affine in the
        # data, so doubling the bundle doubles the solution.
        ax, ay, c, nc = exact_bundle(X3Y2, 16)
        coeffs = CoefficientSet.zeros(ax, ay)
        jet1, _ = solve_picard(nc, coeffs, c)
        doubled = NonClassicalData(
            z32=Fn2(ax, ay, 2.0 * nc.z32.values),
            z30=2.0 * nc.z30, z31=2.0 * nc.z31,
            z02=2.0 * nc.z02, z12=2.0 * nc.z12, z22=2.0 * nc.z22,
            corner=type(nc.corner)(
                **{k: 2.0 * v for k, v in nc.corner.as_dict().items()}
            ),
        )
        jet2, _ = solve_picard(doubled, coeffs, c)
        assert np.allclose(
            jet2.fields[(0, 0)].values,
            2.0 * jet1.fields[(0, 0)].values,
            atol=1e-12,
        )

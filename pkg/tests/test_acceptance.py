"""Acceptance suite: eight end-to-end criteria, each printing one line.

All cases run on uniform grids no larger than 128x128 and complete in
seconds.  Tolerances are pinned; a failure here means a behavioral
regression, not noise.
"""

import filecmp
import json
import math
import os

import numpy as np
import pytest

from pseudoparab import cli
from pseudoparab import data as dio
from pseudoparab.curve import build_linear, s_many
from pseudoparab.data import (
    ClassicalData,
    CoefficientSet,
    Domain,
    sample_callable2,
    step_field,
)
from pseudoparab.grid import Axis, Fn1, Fn2, derivative
from pseudoparab.mms import (
    PolySolution,
    default_solution,
    exact_derivative,
    generate_classical,
    generate_nonclassical,
    observed_order,
    sample_exact_jet,
)
from pseudoparab.solver import reconstruct_jet, solve_picard
from pseudoparab.transform import (
    agreement_check,
    curve_trace_x,
    to_classical,
    to_nonclassical,
)

from conftest import sup, unit_axes, unit_linear_curve

TRACE_KEYS = tuple((i, j) for i in range(3) for j in range(2))

_c = np.zeros((4, 3))
_c[3, 2] = 1.0
CUBE_SQUARE = PolySolution(_c)  # u = x^3 y^2


def report(capsys, n, message):
    with capsys.disabled():
        print(f"ACCEPTANCE {n} PASS: {message}")


def order_ok(o, floor=1.9):
    return o == "exact" or (isinstance(o, float) and o >= floor)


def test_criterion_1_forward_cascade(capsys):
    # Hand oracles for u = x^3 y^2 restricted to y = 1 - x.
    hand = {
        (2, 1): lambda x: 12.0 * x * (1.0 - x),
        (2, 0): lambda x: 6.0 * x * (1.0 - x) ** 2,
        (0, 0): lambda x: x**3 * (1.0 - x) ** 2,
    }
    worst = {}
    for n in (32, 64):
        ax, ay = unit_axes(n)
        c = unit_linear_curve(n)
        nc = generate_nonclassical(CUBE_SQUARE, c, None, Domain(1.0, 1.0), ax, ay)
        cl = to_classical(nc, c)
        worst[n] = max(
            sup(cl.traces[k].values - f(ax.points)) for k, f in hand.items()
        )
    bound = 0.5 * (1.0 / 64) ** 2 * 100.0
    assert worst[64] <= bound
    ratio = worst[32] / worst[64]
    assert 3.6 <= ratio <= 4.4
    report(
        capsys, 1,
        f"cascade sup error {worst[64]:.3e} <= {bound:.3e} at n=64, "
        f"refinement ratio {ratio:.2f}",
    )


def test_criterion_2_inverse_map(capsys):
    errs31, errs02 = [], []
    for n in (16, 32, 64):
        ax, ay = unit_axes(n)
        c = unit_linear_curve(n)
        cl = generate_classical(CUBE_SQUARE, c, Domain(1.0, 1.0), ax, ay)
        nc, _ = to_nonclassical(cl, c, Fn2.zeros(ax, ay))
        errs31.append(sup(nc.z31.values - 12.0 * (1.0 - ax.points)))
        errs02.append(sup(nc.z02.values - 2.0 * (1.0 - ay.points) ** 3))
        # Bitwise passthroughs.
        for (i, j) in TRACE_KEYS:
            assert nc.corner.get(i, j) == cl.traces[(i, j)].values[0]
        assert np.array_equal(nc.z22.values, cl.z4.values)
    orders31 = [observed_order(a, b, 12.0) for a, b in zip(errs31, errs31[1:])]
    orders02 = [observed_order(a, b, 12.0) for a, b in zip(errs02, errs02[1:])]
    assert all(order_ok(o) for o in orders31)
    assert all(order_ok(o) for o in orders02)
    report(
        capsys, 2,
        f"inverse recovery orders z31={orders31}, z02={orders02}; "
        "scalars and z22 bitwise",
    )


def test_criterion_3_roundtrips(capsys):
    ps = default_solution()
    fwd_errs, bwd_errs = [], []
    for n in (16, 32, 64):
        ax, ay = unit_axes(n)
        c = unit_linear_curve(n)
        nc = generate_nonclassical(ps, c, None, Domain(1.0, 1.0), ax, ay)
        cl = to_classical(nc, c)
        nc_back, _ = to_nonclassical(cl, c, nc.z32)
        fwd_errs.append(
            max(
                sup(getattr(nc_back, name).values - getattr(nc, name).values)
                for name in ("z30", "z31", "z02", "z12")
            )
        )
        # Exact passthroughs are bit-identical.
        assert np.array_equal(nc_back.z32.values, nc.z32.values)
        assert np.array_equal(nc_back.z22.values, nc.z22.values)

        cl0 = generate_classical(ps, c, Domain(1.0, 1.0), ax, ay)
        nc_mid, _ = to_nonclassical(cl0, c, Fn2.zeros(ax, ay))
        cl_back = to_classical(nc_mid, c)
        bwd_errs.append(
            max(
                sup(cl_back.traces[k].values - cl0.traces[k].values)
                for k in TRACE_KEYS
            )
        )
        assert np.array_equal(cl_back.z4.values, cl0.z4.values)
        for (i, j) in TRACE_KEYS:
            assert nc_mid.corner.get(i, j) == cl0.traces[(i, j)].values[0]
    fwd = [observed_order(a, b, 12.0) for a, b in zip(fwd_errs, fwd_errs[1:])]
    bwd = [observed_order(a, b, 12.0) for a, b in zip(bwd_errs, bwd_errs[1:])]
    assert all(order_ok(o) for o in fwd)
    assert all(order_ok(o) for o in bwd)
    report(capsys, 3, f"round-trip orders forward={fwd}, backward={bwd}")


def test_criterion_4_trace_identities(capsys):
    # The six trace identities for the reconstructed jet: along the
    # carrier each field must agree with its trace.  Against the discrete
    # cascade the identities hold to round-off; against the exact symbolic
    # traces the defect is bounded by 4 h^2 with ratio ~4 under halving.
    ps = default_solution()
    defects = {}
    for n in (32, 64):
        ax, ay = unit_axes(n)
        c = unit_linear_curve(n)
        nc = generate_nonclassical(ps, c, None, Domain(1.0, 1.0), ax, ay)
        jet = reconstruct_jet(Fn2(ax, ay, nc.z32.values.copy()), nc, c)
        traces = to_classical(nc, c).traces
        sx = s_many(c, ax.points)
        discrete, exact = 0.0, 0.0
        for k in TRACE_KEYS:
            tr = curve_trace_x(jet.fields[k], c).values
            discrete = max(discrete, sup(tr - traces[k].values))
            oracle = np.broadcast_to(
                exact_derivative(ps, *k)(ax.points, sx), ax.points.shape
            )
            exact = max(exact, sup(tr - oracle))
        assert discrete <= 1e-12
        assert exact <= 4.0 * (1.0 / n) ** 2
        defects[n] = exact
    ratio = defects[32] / defects[64]
    assert 3.6 <= ratio <= 4.4
    report(
        capsys, 4,
        f"trace identities: discrete defect <= 1e-12, exact defect "
        f"{defects[64]:.3e} <= 4h^2 at n=64, ratio {ratio:.2f}",
    )


def test_criterion_5_solver_with_coefficients(capsys):
    errs = []
    iters = []
    for n in (16, 32, 64):
        ax, ay = unit_axes(n)
        c = unit_linear_curve(n)
        coeffs = CoefficientSet.zeros(ax, ay).replace(
            (0, 0), sample_callable2(lambda x, y: 1.0 + 0.0 * x, ax, ay)
        ).replace((2, 2), step_field(ax, ay, "x", 0.5, 0.0, 1.0))
        nc = generate_nonclassical(CUBE_SQUARE, c, coeffs, Domain(1.0, 1.0), ax, ay)
        jet, rep = solve_picard(nc, coeffs, c, tol=1e-12, max_iter=100)
        assert rep.converged and rep.iterations <= 100
        assert rep.update_norms[-1] < 1e-10
        exact = sample_exact_jet(CUBE_SQUARE, ax, ay)
        errs.append(sup(jet.fields[(0, 0)].values - exact.fields[(0, 0)].values))
        iters.append(rep.iterations)
    orders = [observed_order(a, b, 12.0) for a, b in zip(errs, errs[1:])]
    assert all(order_ok(o) for o in orders)
    report(
        capsys, 5,
        f"solver with unit and step coefficients: iterations {iters}, "
        f"g00 orders {orders}",
    )


def test_criterion_6_agreement_discrimination(capsys, tmp_path):
    # Smooth data: nothing flagged, all ratios small.
    ax, ay = unit_axes(64)
    c = unit_linear_curve(64)
    smooth = generate_classical(default_solution(), c, Domain(1.0, 1.0), ax, ay)
    rep = agreement_check(smooth, c, levels=2)
    assert not rep.any_flagged
    assert all(e.refinement_ratio <= 1.5 for e in rep.entries.values())

    # A jump in the second x-derivative trace: F1 flagged, CLI exits 2.
    n = 128
    ax, ay = unit_axes(n)
    c = unit_linear_curve(n)
    cl = generate_classical(default_solution(), c, Domain(1.0, 1.0), ax, ay)
    traces = dict(cl.traces)
    traces[(2, 0)] = Fn1(
        ax, cl.traces[(2, 0)].values + np.where(ax.points >= 0.5, 10.0, 0.0)
    )
    corrupted = ClassicalData(traces=traces, z4=cl.z4)
    flagged_rep = agreement_check(corrupted, c, levels=3)
    assert flagged_rep.entries["F1"].flagged
    assert flagged_rep.entries["F1"].refinement_ratio >= 4.0

    manifest = dio.save_classical(str(tmp_path / "cl"), corrupted, Domain(1.0, 1.0))
    config = tmp_path / "config.json"
    config.write_text(
        json.dumps(
            {
                "grid": {"nx": n, "ny": n},
                "data": {"classical": manifest},
                "agreement": {"levels": 3},
            }
        )
    )
    code = cli.main(
        [
            "--config", str(config), "--out", str(tmp_path / "out"),
            "--quiet", "check-agreement",
        ]
    )
    assert code == 2
    report(
        capsys, 6,
        f"agreement: smooth max ratio "
        f"{max(e.refinement_ratio for e in rep.entries.values()):.3f} <= 1.5, "
        f"jump ratio {flagged_rep.entries['F1'].refinement_ratio:.2f} >= 4, "
        "CLI exit 2",
    )


def test_criterion_7_jet_cross_differences(capsys):
    ps = default_solution()
    errs = []
    for n in (16, 32, 64):
        ax, ay = unit_axes(n)
        c = unit_linear_curve(n)
        nc = generate_nonclassical(ps, c, None, Domain(1.0, 1.0), ax, ay)
        jet = reconstruct_jet(Fn2(ax, ay, nc.z32.values.copy()), nc, c)
        worst = 0.0
        for i in range(4):
            for j in range(3):
                g = jet.fields[(i, j)].values
                if i < 3:
                    dx = np.stack(
                        [derivative(Fn1(ax, g[:, col])).values for col in range(n + 1)],
                        axis=1,
                    )
                    worst = max(
                        worst,
                        sup(dx[1:-1, 1:-1] - jet.fields[(i + 1, j)].values[1:-1, 1:-1]),
                    )
                if j < 2:
                    dy = np.stack(
                        [derivative(Fn1(ay, g[r, :])).values for r in range(n + 1)],
                        axis=0,
                    )
                    worst = max(
                        worst,
                        sup(dy[1:-1, 1:-1] - jet.fields[(i, j + 1)].values[1:-1, 1:-1]),
                    )
        errs.append(worst)
    orders = [observed_order(a, b, 12.0) for a, b in zip(errs, errs[1:])]
    assert all(order_ok(o) for o in orders)
    report(capsys, 7, f"jet cross finite-difference orders {orders}")


def test_criterion_8_determinism(capsys, tmp_path):
    config = tmp_path / "config.json"
    config.write_text(
        json.dumps(
            {
                "polynomial": {
                    "coeff": [
                        [1.0, 0.0, 0.0],
                        [1.0, 0.0, 0.0],
                        [0.0, 1.0, 0.0],
                        [0.0, 0.0, 1.0],
                    ]
                },
                "coefficients": {"constants": {"a00": 1.0}},
                "convergence": {"sizes": [8, 16, 32]},
            }
        )
    )
    outs = []
    for run in ("run1", "run2"):
        out = str(tmp_path / run)
        code = cli.main(
            ["--config", str(config), "--out", out, "--quiet", "convergence"]
        )
        assert code == 0
        outs.append(out)
    names = sorted(os.listdir(outs[0]))
    assert names == sorted(os.listdir(outs[1]))
    for name in names:
        assert filecmp.cmp(
            os.path.join(outs[0], name), os.path.join(outs[1], name), shallow=False
        ), f"output {name} differs between identical runs"
    report(capsys, 8, f"two identical runs produced bit-identical {names}")

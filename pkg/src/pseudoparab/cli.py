"""Command-line front end.

Exit codes: 0 success, 1 input/config error, 2 agreement condition flagged,
3 solver non-convergence.  Every run writes ``summary.json`` into the
output directory, including the failure paths 2 and 3; all diagnostics go
to standard error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import data as dio
from . import mms, solver, transform
from .curve import MonotoneCurve, build_from_samples, build_linear
from .data import (
    COEFF_KEYS,
    CoefficientSet,
    Domain,
    NonClassicalData,
    sample_callable2,
    step_field,
)
from .grid import Axis, Fn2

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_AGREEMENT_FLAGGED = 2
EXIT_NOT_CONVERGED = 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    domain: Domain
    grid_nx: int
    grid_ny: int
    curve: dict
    coefficients: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)
    polynomial: list | None = None
    tol: float = 1e-10
    max_iter: int = 100
    relaxation: float = 1.0
    levels: int = 2
    threshold: float = 4.0
    sizes: list[int] = field(default_factory=lambda: [16, 32, 64])
    full_jet: bool = False

    def echo(self) -> dict:
        return {
            "domain": {"h1": self.domain.h1, "h2": self.domain.h2, "p": self.domain.p},
            "grid": {"nx": self.grid_nx, "ny": self.grid_ny},
            "curve": self.curve,
            "coefficients": self.coefficients,
            "data": self.data,
            "polynomial": self.polynomial,
            "solver": {
                "tol": self.tol,
                "max_iter": self.max_iter,
                "relaxation": self.relaxation,
            },
            "agreement": {"levels": self.levels, "threshold": self.threshold},
            "convergence": {"sizes": self.sizes},
            "output": {"full_jet": self.full_jet},
        }


_SCHEMA = {
    "domain": {"h1", "h2", "p"},
    "grid": {"nx", "ny"},
    "curve": {"type", "file"},
    "coefficients": {"constants", "steps", "files"},
    "data": {"nonclassical", "classical", "z32"},
    "polynomial": {"coeff"},
    "solver": {"tol", "max_iter", "relaxation"},
    "agreement": {"levels", "threshold"},
    "convergence": {"sizes"},
    "output": {"full_jet"},
}


def _reject_unknown(section: dict, allowed: set[str], path: str) -> None:
    for key in section:
        if key not in allowed:
            raise ConfigError(f"unknown key {path}.{key}")


def parse_config(path: str) -> RunConfig:
    """Load and validate a JSON run configuration (strict schema)."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    _reject_unknown(raw, set(_SCHEMA), "config")
    for section, allowed in _SCHEMA.items():
        if section in raw and isinstance(raw[section], dict):
            _reject_unknown(raw[section], allowed, f"config.{section}")

    dom_raw = raw.get("domain", {})
    try:
        domain = Domain(
            h1=float(dom_raw.get("h1", 1.0)),
            h2=float(dom_raw.get("h2", 1.0)),
            p=float(dom_raw.get("p", 2.0)),
        )
    except (ValueError, dio.DataError) as exc:
        raise ConfigError(f"config.domain: {exc}") from exc

    grid_raw = raw.get("grid", {})
    nx = int(grid_raw.get("nx", 64))
    ny = int(grid_raw.get("ny", 64))
    if nx + 1 < 8:
        raise ConfigError("config.grid.nx: grids need at least 8 nodes per axis")
    if ny + 1 < 8:
        raise ConfigError("config.grid.ny: grids need at least 8 nodes per axis")

    curve_raw = raw.get("curve", {"type": "linear"})
    if curve_raw.get("type") not in ("linear", "samples"):
        raise ConfigError(
            f"config.curve.type: expected 'linear' or 'samples', "
            f"got {curve_raw.get('type')!r}"
        )
    if curve_raw["type"] == "samples" and "file" not in curve_raw:
        raise ConfigError("config.curve.file: required for sampled curves")

    solver_raw = raw.get("solver", {})
    tol = float(solver_raw.get("tol", 1e-10))
    if tol <= 0:
        raise ConfigError(f"config.solver.tol: must be positive, got {tol}")
    max_iter = int(solver_raw.get("max_iter", 100))
    if max_iter < 1:
        raise ConfigError("config.solver.max_iter: must be at least 1")
    relaxation = float(solver_raw.get("relaxation", 1.0))
    if not 0.0 < relaxation <= 1.0:
        raise ConfigError(
            f"config.solver.relaxation: must lie in (0, 1], got {relaxation}"
        )

    agree_raw = raw.get("agreement", {})
    levels = int(agree_raw.get("levels", 2))
    if levels < 2:
        raise ConfigError("config.agreement.levels: must be at least 2")
    threshold = float(agree_raw.get("threshold", 4.0))
    if threshold <= 1.0:
        raise ConfigError("config.agreement.threshold: must exceed 1")

    conv_raw = raw.get("convergence", {})
    sizes = [int(v) for v in conv_raw.get("sizes", [16, 32, 64])]

    poly_raw = raw.get("polynomial")
    polynomial = None
    if poly_raw is not None:
        if "coeff" not in poly_raw:
            raise ConfigError("config.polynomial.coeff: required")
        polynomial = poly_raw["coeff"]

    coeff_raw = raw.get("coefficients", {})
    for name in coeff_raw.get("constants", {}) | coeff_raw.get("files", {}):
        _coeff_key(name)  # validates
    for name, spec in coeff_raw.get("steps", {}).items():
        _coeff_key(name)
        extra = set(spec) - {"axis", "location", "left", "right"}
        if extra:
            raise ConfigError(
                f"config.coefficients.steps.{name}: unknown keys {sorted(extra)}"
            )

    return RunConfig(
        domain=domain,
        grid_nx=nx,
        grid_ny=ny,
        curve=curve_raw,
        coefficients=coeff_raw,
        data=raw.get("data", {}),
        polynomial=polynomial,
        tol=tol,
        max_iter=max_iter,
        relaxation=relaxation,
        levels=levels,
        threshold=threshold,
        sizes=sizes,
        full_jet=bool(raw.get("output", {}).get("full_jet", False)),
    )


def _coeff_key(name: str) -> tuple[int, int]:
    if (
        len(name) == 3
        and name[0] == "a"
        and name[1:].isdigit()
        and (int(name[1]), int(name[2])) in COEFF_KEYS
    ):
        return (int(name[1]), int(name[2]))
    raise ConfigError(
        f"config.coefficients: unknown coefficient {name!r} "
        "(expected a00..a31, excluding a32)"
    )


def _build_curve(cfg: RunConfig, ax: Axis) -> MonotoneCurve:
    if cfg.curve["type"] == "linear":
        return build_linear(cfg.domain.h1, cfg.domain.h2, ax)
    samples = dio.load_fn1(cfg.curve["file"])
    return build_from_samples(cfg.domain.h1, cfg.domain.h2, samples)


def _build_coefficients(cfg: RunConfig, ax: Axis, ay: Axis) -> CoefficientSet:
    coeffs = CoefficientSet.zeros(ax, ay)
    for name, value in cfg.coefficients.get("constants", {}).items():
        v = float(value)
        coeffs = coeffs.replace(
            _coeff_key(name), sample_callable2(lambda x, y: np.full_like(x, v), ax, ay)
        )
    for name, spec in cfg.coefficients.get("steps", {}).items():
        coeffs = coeffs.replace(
            _coeff_key(name),
            step_field(
                ax,
                ay,
                spec.get("axis", "x"),
                float(spec["location"]),
                float(spec["left"]),
                float(spec["right"]),
            ),
        )
    for name, path in cfg.coefficients.get("files", {}).items():
        coeffs = coeffs.replace(_coeff_key(name), dio.load_fn2(path))
    return coeffs


def _json_safe(obj):
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(_json_safe(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_summary(out_dir, command, cfg, outputs, status, metrics) -> None:
    _write_json(
        os.path.join(out_dir, "summary.json"),
        {
            "command": command,
            "config_echo": cfg.echo() if cfg is not None else None,
            "outputs": sorted(outputs),
            "status": status,
            "metrics": metrics,
        },
    )


def _load_nc(cfg: RunConfig, ax: Axis, ay: Axis, c) -> NonClassicalData:
    if "nonclassical" in cfg.data:
        nc, _ = dio.load_nonclassical(cfg.data["nonclassical"])
        return nc
    if cfg.polynomial is not None:
        ps = mms.PolySolution(np.asarray(cfg.polynomial, dtype=float))
        coeffs = _build_coefficients(cfg, ax, ay)
        return mms.generate_nonclassical(ps, c, coeffs, cfg.domain, ax, ay)
    raise ConfigError(
        "config.data.nonclassical or config.polynomial required for this command"
    )


def _load_cl(cfg: RunConfig, ax: Axis, ay: Axis, c):
    if "classical" in cfg.data:
        cl, _ = dio.load_classical(cfg.data["classical"])
        return cl
    if cfg.polynomial is not None:
        ps = mms.PolySolution(np.asarray(cfg.polynomial, dtype=float))
        return mms.generate_classical(ps, c, cfg.domain, ax, ay)
    raise ConfigError(
        "config.data.classical or config.polynomial required for this command"
    )


def _load_z32(cfg: RunConfig, ax: Axis, ay: Axis) -> Fn2:
    if "z32" in cfg.data:
        return dio.load_fn2(cfg.data["z32"])
    return Fn2.zeros(ax, ay)


def _run_to_classical(cfg, out_dir):
    ax = Axis.uniform(cfg.domain.h1, cfg.grid_nx)
    ay = Axis.uniform(cfg.domain.h2, cfg.grid_ny)
    c = _build_curve(cfg, ax)
    nc = _load_nc(cfg, ax, ay, c)
    cl = transform.to_classical(nc, c)
    manifest = dio.save_classical(os.path.join(out_dir, "classical"), cl, cfg.domain)
    outputs = [os.path.relpath(manifest, out_dir)]
    _write_summary(out_dir, "transform to-classical", cfg, outputs, "ok", {})
    return EXIT_OK


def _run_to_nonclassical(cfg, out_dir):
    ax = Axis.uniform(cfg.domain.h1, cfg.grid_nx)
    ay = Axis.uniform(cfg.domain.h2, cfg.grid_ny)
    c = _build_curve(cfg, ax)
    cl = _load_cl(cfg, ax, ay, c)
    z32 = _load_z32(cfg, cl.axis_x, cl.axis_y)
    nc, report = transform.to_nonclassical(
        cl, c, z32, levels=cfg.levels, threshold=cfg.threshold
    )
    manifest = dio.save_nonclassical(
        os.path.join(out_dir, "nonclassical"), nc, cfg.domain
    )
    report_path = os.path.join(out_dir, "agreement.json")
    _write_json(report_path, report.to_dict())
    outputs = [os.path.relpath(manifest, out_dir), "agreement.json"]
    status = "agreement-flagged" if report.any_flagged else "ok"
    _write_summary(
        out_dir, "transform to-nonclassical", cfg, outputs, status,
        {"agreement": report.to_dict()},
    )
    return EXIT_AGREEMENT_FLAGGED if report.any_flagged else EXIT_OK


def _run_check_agreement(cfg, out_dir):
    ax = Axis.uniform(cfg.domain.h1, cfg.grid_nx)
    ay = Axis.uniform(cfg.domain.h2, cfg.grid_ny)
    c = _build_curve(cfg, ax)
    cl = _load_cl(cfg, ax, ay, c)
    report = transform.agreement_check(
        cl, c, levels=cfg.levels, threshold=cfg.threshold
    )
    _write_json(os.path.join(out_dir, "agreement.json"), report.to_dict())
    status = "agreement-flagged" if report.any_flagged else "ok"
    _write_summary(
        out_dir, "check-agreement", cfg, ["agreement.json"], status,
        {"agreement": report.to_dict()},
    )
    return EXIT_AGREEMENT_FLAGGED if report.any_flagged else EXIT_OK


def _run_solve(cfg, out_dir):
    ax = Axis.uniform(cfg.domain.h1, cfg.grid_nx)
    ay = Axis.uniform(cfg.domain.h2, cfg.grid_ny)
    c = _build_curve(cfg, ax)
    nc = _load_nc(cfg, ax, ay, c)
    coeffs = _build_coefficients(cfg, nc.axis_x, nc.axis_y)
    jet, report = solver.solve_picard(
        nc, coeffs, c,
        tol=cfg.tol, max_iter=cfg.max_iter, relaxation=cfg.relaxation,
    )
    outputs = ["g00.csv", "convergence_report.json"]
    dio.save_fn2(os.path.join(out_dir, "g00.csv"), jet.fields[(0, 0)])
    if cfg.full_jet:
        for (i, j), fn in sorted(jet.fields.items()):
            name = f"g{i}{j}.csv"
            dio.save_fn2(os.path.join(out_dir, name), fn)
            if name not in outputs:
                outputs.append(name)
    _write_json(
        os.path.join(out_dir, "convergence_report.json"), report.to_dict()
    )
    status = "ok" if report.converged else "not-converged"
    _write_summary(
        out_dir, "solve", cfg, outputs, status, {"solver": report.to_dict()}
    )
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def _run_mms(cfg, out_dir):
    ax = Axis.uniform(cfg.domain.h1, cfg.grid_nx)
    ay = Axis.uniform(cfg.domain.h2, cfg.grid_ny)
    c = _build_curve(cfg, ax)
    coeff_arr = (
        np.asarray(cfg.polynomial, dtype=float)
        if cfg.polynomial is not None
        else np.asarray(mms.DEFAULT_POLY_COEFF)
    )
    ps = mms.PolySolution(coeff_arr)
    coeffs = _build_coefficients(cfg, ax, ay)
    nc = mms.generate_nonclassical(ps, c, coeffs, cfg.domain, ax, ay)
    jet, report = solver.solve_picard(
        nc, coeffs, c,
        tol=cfg.tol, max_iter=cfg.max_iter, relaxation=cfg.relaxation,
    )
    table = mms.jet_error(jet, ps, cfg.domain.p)
    with open(os.path.join(out_dir, "jet_errors.csv"), "w") as fh:
        fh.write("field,error\n")
        for (i, j), err in sorted(table.per_field.items()):
            fh.write(f"g{i}{j},{err!r}\n")
        fh.write(f"total,{table.total!r}\n")
    dio.save_fn2(os.path.join(out_dir, "g00.csv"), jet.fields[(0, 0)])
    outputs = ["jet_errors.csv", "g00.csv"]
    status = "ok" if report.converged else "not-converged"
    _write_summary(
        out_dir, "mms", cfg, outputs, status,
        {"jet_errors": table.to_dict(), "solver": report.to_dict()},
    )
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def _run_convergence(cfg, out_dir):
    coeff_arr = (
        np.asarray(cfg.polynomial, dtype=float)
        if cfg.polynomial is not None
        else np.asarray(mms.DEFAULT_POLY_COEFF)
    )
    ps = mms.PolySolution(coeff_arr)
    curve_builder = lambda axis: _build_curve(cfg, axis)
    coeff_builder = lambda ax, ay: _build_coefficients(cfg, ax, ay)
    result = mms.convergence_study(
        ps,
        cfg.sizes,
        domain=cfg.domain,
        curve_builder=curve_builder,
        coeff_builder=coeff_builder,
        tol=cfg.tol,
        max_iter=cfg.max_iter,
    )
    with open(os.path.join(out_dir, "orders.csv"), "w") as fh:
        fh.write("size,solve_error_sup,roundtrip_error_sup,solve_order,roundtrip_order\n")
        for k, rec in enumerate(result.records):
            so = result.solve_orders[k - 1] if k > 0 else ""
            ro = result.roundtrip_orders[k - 1] if k > 0 else ""
            fh.write(
                f"{rec.size},{rec.solve_error_sup!r},"
                f"{rec.roundtrip_error_sup!r},{so},{ro}\n"
            )
    _write_json(os.path.join(out_dir, "orders.json"), result.to_dict())
    converged = all(r.solver_converged for r in result.records)
    status = "ok" if converged else "not-converged"
    _write_summary(
        out_dir, "convergence", cfg, ["orders.csv", "orders.json"], status,
        {"study": result.to_dict()},
    )
    return EXIT_OK if converged else EXIT_NOT_CONVERGED


def _run_norm(cfg, out_dir):
    ax = Axis.uniform(cfg.domain.h1, cfg.grid_nx)
    ay = Axis.uniform(cfg.domain.h2, cfg.grid_ny)
    c = _build_curve(cfg, ax)
    nc = _load_nc(cfg, ax, ay, c)
    value = dio.product_norm(nc, cfg.domain.p)
    _write_summary(
        out_dir, "norm", cfg, [], "ok", {"product_norm": value, "p": cfg.domain.p}
    )
    return EXIT_OK


_COMMANDS = {
    "transform to-classical": _run_to_classical,
    "transform to-nonclassical": _run_to_nonclassical,
    "check-agreement": _run_check_agreement,
    "solve": _run_solve,
    "mms": _run_mms,
    "convergence": _run_convergence,
    "norm": _run_norm,
}


def run(command: str, cfg: RunConfig, out_dir: str) -> int:
    """Execute one subcommand; returns the process exit code."""
    os.makedirs(out_dir, exist_ok=True)
    return _COMMANDS[command](cfg, out_dir)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pseudoparab",
        description="Cauchy data transforms and Picard solver for a "
        "fifth-order pseudoparabolic equation with data on a decreasing curve",
    )
    parser.add_argument("--config", required=True, help="JSON run configuration")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--grid-nx", type=int, help="override grid cells in x")
    parser.add_argument("--grid-ny", type=int, help="override grid cells in y")
    parser.add_argument("--quiet", action="store_true", help="suppress stderr chatter")
    sub = parser.add_subparsers(dest="command", required=True)
    tr = sub.add_parser("transform", help="convert between data formulations")
    tr.add_argument("direction", choices=["to-classical", "to-nonclassical"])
    for name in ("check-agreement", "solve", "mms", "convergence", "norm"):
        sub.add_parser(name)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    command = args.command
    if command == "transform":
        command = f"transform {args.direction}"

    def log(msg):
        if not args.quiet:
            print(msg, file=sys.stderr)

    try:
        cfg = parse_config(args.config)
        if args.grid_nx is not None:
            cfg.grid_nx = args.grid_nx
        if args.grid_ny is not None:
            cfg.grid_ny = args.grid_ny
        code = run(command, cfg, args.out)
    except (ConfigError, dio.DataError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        try:
            os.makedirs(args.out, exist_ok=True)
            _write_summary(
                args.out, command, None, [], "input-error", {"error": str(exc)}
            )
        except OSError:
            pass
        return EXIT_INPUT_ERROR
    log(f"{command}: exit {code}, outputs in {args.out}")
    return code


if __name__ == "__main__":
    sys.exit(main())

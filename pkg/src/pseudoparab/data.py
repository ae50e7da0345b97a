"""Data bundles for both Cauchy formulations, coefficients, jets, and I/O.

File formats:
  * Fn1 CSV: columns ``coord,value`` with a header row.
  * Fn2 CSV: long format ``x,y,value``, row-major in x then y, header row.
  * Bundle manifests: JSON naming each component file, the domain
    (h1, h2, p), and grid sizes; the six corner scalars are stored inline.

Floats are written with ``repr`` (shortest round-trip), so save -> load is
value-exact.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, fields as dc_fields

import numpy as np

from .grid import Axis, Fn1, Fn2, GridError, lp_norm, same_axis

COEFF_KEYS: tuple[tuple[int, int], ...] = tuple(
    (i, j) for i in range(4) for j in range(3) if (i, j) != (3, 2)
)
JET_KEYS: tuple[tuple[int, int], ...] = tuple(
    (i, j) for i in range(4) for j in range(3)
)
TRACE_KEYS: tuple[tuple[int, int], ...] = tuple(
    (i, j) for i in range(3) for j in range(2)
)
SCALAR_NAMES = ("z00", "z10", "z20", "z01", "z11", "z21")


class DataError(ValueError):
    pass


class DataFormatError(DataError):
    pass


@dataclass(frozen=True)
class Domain:
    h1: float
    h2: float
    p: float = 2.0

    def __post_init__(self):
        if self.h1 <= 0 or self.h2 <= 0:
            raise DataError("h1 and h2 must be positive")
        if not float(self.p) >= 1.0:
            raise DataError("p must be >= 1 or inf")


@dataclass(frozen=True)
class CornerValues:
    """The six corner values D_x^i D_y^j u(0, h2), i = 0..2, j = 0..1."""

    z00: float = 0.0
    z10: float = 0.0
    z20: float = 0.0
    z01: float = 0.0
    z11: float = 0.0
    z21: float = 0.0

    def __post_init__(self):
        for f in dc_fields(self):
            if not math.isfinite(getattr(self, f.name)):
                raise DataError(f"corner value {f.name} is not finite")

    def get(self, i: int, j: int) -> float:
        return float(getattr(self, f"z{i}{j}"))

    def as_dict(self) -> dict[str, float]:
        return {name: float(getattr(self, name)) for name in SCALAR_NAMES}

    @classmethod
    def from_dict(cls, d: dict[str, float]) -> "CornerValues":
        extra = set(d) - set(SCALAR_NAMES)
        if extra:
            raise DataFormatError(f"unknown scalar keys {sorted(extra)}")
        return cls(**{k: float(v) for k, v in d.items()})


@dataclass(frozen=True)
class NonClassicalData:
    """Right-hand sides of the non-classical conditions.

    z32 lives on the full rectangle, z30/z31 on the x-axis (traces of the
    third x-derivatives along the curve), z02/z12/z22 on the y-axis, and
    the six corner values are plain reals.
    """

    z32: Fn2
    z30: Fn1
    z31: Fn1
    z02: Fn1
    z12: Fn1
    z22: Fn1
    corner: CornerValues

    def __post_init__(self):
        ax, ay = self.z32.axis_x, self.z32.axis_y
        for name in ("z30", "z31"):
            if not same_axis(getattr(self, name).axis, ax):
                raise DataError(f"{name} must live on the x-axis of z32")
        for name in ("z02", "z12", "z22"):
            if not same_axis(getattr(self, name).axis, ay):
                raise DataError(f"{name} must live on the y-axis of z32")

    @property
    def axis_x(self) -> Axis:
        return self.z32.axis_x

    @property
    def axis_y(self) -> Axis:
        return self.z32.axis_y

    @classmethod
    def zeros(cls, ax: Axis, ay: Axis) -> "NonClassicalData":
        return cls(
            z32=Fn2.zeros(ax, ay),
            z30=Fn1.zeros(ax),
            z31=Fn1.zeros(ax),
            z02=Fn1.zeros(ay),
            z12=Fn1.zeros(ay),
            z22=Fn1.zeros(ay),
            corner=CornerValues(),
        )


@dataclass(frozen=True)
class ClassicalData:
    """The six curve traces Z^(i,j)(x) plus Z^(4)(y)."""

    traces: dict[tuple[int, int], Fn1]
    z4: Fn1

    def __post_init__(self):
        if set(self.traces.keys()) != set(TRACE_KEYS):
            raise DataError(f"traces must cover exactly {TRACE_KEYS}")
        ax = self.traces[(0, 0)].axis
        for key, fn in self.traces.items():
            if not same_axis(fn.axis, ax):
                raise DataError(f"trace {key} on inconsistent axis")

    @property
    def axis_x(self) -> Axis:
        return self.traces[(0, 0)].axis

    @property
    def axis_y(self) -> Axis:
        return self.z4.axis

    @classmethod
    def zeros(cls, ax: Axis, ay: Axis) -> "ClassicalData":
        return cls(
            traces={key: Fn1.zeros(ax) for key in TRACE_KEYS},
            z4=Fn1.zeros(ay),
        )


@dataclass(frozen=True)
class CoefficientSet:
    """The 11 lower-order coefficients of the operator, with optional
    majorants a0_{i,2}(x) and a0_{3,j}(y) bounding the cross terms."""

    a: dict[tuple[int, int], Fn2]
    majorants_x: dict[int, Fn1] | None = None
    majorants_y: dict[int, Fn1] | None = None

    def __post_init__(self):
        if set(self.a.keys()) != set(COEFF_KEYS):
            raise DataError(f"coefficients must cover exactly {COEFF_KEYS}")
        ref = self.a[(0, 0)]
        for key, fn in self.a.items():
            if not (
                same_axis(fn.axis_x, ref.axis_x) and same_axis(fn.axis_y, ref.axis_y)
            ):
                raise DataError(f"coefficient {key} on inconsistent axes")
        if self.majorants_x is not None:
            if set(self.majorants_x) - {0, 1, 2}:
                raise DataError("x-majorants are indexed by i = 0..2")
        if self.majorants_y is not None:
            if set(self.majorants_y) - {0, 1}:
                raise DataError("y-majorants are indexed by j = 0..1")

    @property
    def axis_x(self) -> Axis:
        return self.a[(0, 0)].axis_x

    @property
    def axis_y(self) -> Axis:
        return self.a[(0, 0)].axis_y

    @classmethod
    def zeros(cls, ax: Axis, ay: Axis) -> "CoefficientSet":
        return cls(a={key: Fn2.zeros(ax, ay) for key in COEFF_KEYS})

    def replace(self, key: tuple[int, int], fn: Fn2) -> "CoefficientSet":
        new = dict(self.a)
        new[key] = fn
        return CoefficientSet(new, self.majorants_x, self.majorants_y)


@dataclass(frozen=True)
class DerivativeJet:
    """All 12 sampled derivative fields g_{i,j}; g_{3,2} is w."""

    fields: dict[tuple[int, int], Fn2]

    def __post_init__(self):
        if set(self.fields.keys()) != set(JET_KEYS):
            raise DataError(f"jet must cover exactly {JET_KEYS}")
        ref = self.fields[(3, 2)]
        for key, fn in self.fields.items():
            if not (
                same_axis(fn.axis_x, ref.axis_x) and same_axis(fn.axis_y, ref.axis_y)
            ):
                raise DataError(f"jet field {key} on inconsistent axes")

    @property
    def axis_x(self) -> Axis:
        return self.fields[(3, 2)].axis_x

    @property
    def axis_y(self) -> Axis:
        return self.fields[(3, 2)].axis_y


@dataclass(frozen=True)
class MajorantCheck:
    name: str
    passed: bool
    worst_node: tuple[int, int] | None
    worst_excess: float


def validate_majorants(c: CoefficientSet) -> list[MajorantCheck]:
    """Check |a_{i,2}| <= a0_{i,2}(x) and |a_{3,j}| <= a0_{3,j}(y) nodally."""
    report: list[MajorantCheck] = []

    def check(name, values, bound):
        excess = np.abs(values) - bound
        k = np.unravel_index(int(np.argmax(excess)), excess.shape)
        worst = float(excess[k])
        report.append(
            MajorantCheck(
                name=name,
                passed=bool(worst <= 0.0),
                worst_node=(int(k[0]), int(k[1])),
                worst_excess=worst,
            )
        )

    for i, maj in (c.majorants_x or {}).items():
        check(f"a{i}2", c.a[(i, 2)].values, maj.values[:, None])
    for j, maj in (c.majorants_y or {}).items():
        check(f"a3{j}", c.a[(3, j)].values, maj.values[None, :])
    return report


def product_norm(nc: NonClassicalData, p: float) -> float:
    """Norm of the product space holding the non-classical bundle: the sum
    of the six function L_p norms plus the six corner absolute values."""
    total = lp_norm(nc.z32, p)
    for fn in (nc.z30, nc.z31, nc.z02, nc.z12, nc.z22):
        total += lp_norm(fn, p)
    total += sum(abs(v) for v in nc.corner.as_dict().values())
    return float(total)


def sample_callable(f, axis: Axis) -> Fn1:
    """Sample a callable of one variable at the axis nodes."""
    vals = np.asarray([float(f(x)) for x in axis.points])
    if not np.all(np.isfinite(vals)):
        k = int(np.flatnonzero(~np.isfinite(vals))[0])
        raise DataError(f"non-finite sample at node {k} (x = {axis.points[k]})")
    return Fn1(axis, vals)


def sample_callable2(f, axis_x: Axis, axis_y: Axis) -> Fn2:
    """Sample a callable of two variables on the tensor grid."""
    xg, yg = np.meshgrid(axis_x.points, axis_y.points, indexing="ij")
    vals = np.asarray(f(xg, yg), dtype=float)
    if vals.shape != xg.shape:
        vals = np.broadcast_to(vals, xg.shape).copy()
    if not np.all(np.isfinite(vals)):
        k = np.unravel_index(int(np.argmax(~np.isfinite(vals))), vals.shape)
        raise DataError(f"non-finite sample at node {tuple(int(v) for v in k)}")
    return Fn2(axis_x, axis_y, vals)


def step_field(
    axis_x: Axis,
    axis_y: Axis,
    along: str,
    location: float,
    left: float,
    right: float,
) -> Fn2:
    """Piecewise-constant coefficient with a jump at ``location``.

    Nodes strictly below the location take the left value, the rest the
    right value, so the represented discontinuity sits between two nodes
    and trapezoid quadrature stays well-defined.
    """
    if along == "x":
        line = np.where(axis_x.points < location, left, right)
        return Fn2(axis_x, axis_y, np.repeat(line[:, None], len(axis_y), axis=1))
    if along == "y":
        line = np.where(axis_y.points < location, left, right)
        return Fn2(axis_x, axis_y, np.repeat(line[None, :], len(axis_x), axis=0))
    raise DataError(f"step axis must be 'x' or 'y', got {along!r}")


# ---------------------------------------------------------------------------
# CSV / JSON serialization
# ---------------------------------------------------------------------------


def save_fn1(path: str, f: Fn1) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["coord", "value"])
        for x, v in zip(f.axis.points, f.values):
            w.writerow([repr(float(x)), repr(float(v))])


def _parse_float(text: str, row: int, path: str) -> float:
    try:
        v = float(text)
    except ValueError as exc:
        raise DataFormatError(f"{path}: bad number at row {row}: {text!r}") from exc
    if not math.isfinite(v):
        raise DataFormatError(f"{path}: non-finite value at row {row}")
    return v


def load_fn1(path: str) -> Fn1:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["coord", "value"]:
        raise DataFormatError(f"{path}: expected header 'coord,value'")
    coords, vals = [], []
    for k, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise DataFormatError(f"{path}: expected 2 columns at row {k}")
        coords.append(_parse_float(row[0], k, path))
        vals.append(_parse_float(row[1], k, path))
    try:
        return Fn1(Axis(np.asarray(coords)), np.asarray(vals))
    except GridError as exc:
        raise DataFormatError(f"{path}: {exc}") from exc


def save_fn2(path: str, g: Fn2) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "value"])
        for i, x in enumerate(g.axis_x.points):
            for j, y in enumerate(g.axis_y.points):
                w.writerow(
                    [repr(float(x)), repr(float(y)), repr(float(g.values[i, j]))]
                )


def load_fn2(path: str) -> Fn2:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["x", "y", "value"]:
        raise DataFormatError(f"{path}: expected header 'x,y,value'")
    xs, ys, vals = [], [], []
    for k, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise DataFormatError(f"{path}: expected 3 columns at row {k}")
        xs.append(_parse_float(row[0], k, path))
        ys.append(_parse_float(row[1], k, path))
        vals.append(_parse_float(row[2], k, path))
    ys_arr = np.asarray(ys)
    # Row-major in x then y: the first block repeats x[0] over all y nodes.
    ny = 1
    while ny < len(xs) and xs[ny] == xs[0]:
        ny += 1
    if ny < 2 or len(xs) % ny != 0:
        raise DataFormatError(f"{path}: rows are not row-major in x then y")
    nx = len(xs) // ny
    x_pts = np.asarray(xs).reshape(nx, ny)
    y_pts = ys_arr.reshape(nx, ny)
    if not (np.all(x_pts == x_pts[:, :1]) and np.all(y_pts == y_pts[:1, :])):
        raise DataFormatError(f"{path}: rows are not row-major in x then y")
    try:
        return Fn2(
            Axis(x_pts[:, 0]),
            Axis(y_pts[0, :]),
            np.asarray(vals).reshape(nx, ny),
        )
    except GridError as exc:
        raise DataFormatError(f"{path}: {exc}") from exc


def _domain_dict(domain: Domain) -> dict:
    return {"h1": domain.h1, "h2": domain.h2, "p": domain.p}


def _domain_from_dict(d: dict) -> Domain:
    return Domain(
        h1=float(d["h1"]), h2=float(d["h2"]), p=float(d.get("p", 2.0))
    )


def _write_manifest(dirpath: str, manifest: dict) -> str:
    os.makedirs(dirpath, exist_ok=True)
    path = os.path.join(dirpath, "manifest.json")
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _read_manifest(manifest_path: str, kind: str) -> tuple[dict, str]:
    try:
        with open(manifest_path) as fh:
            manifest = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{manifest_path}: invalid JSON: {exc}") from exc
    if manifest.get("kind") != kind:
        raise DataFormatError(
            f"{manifest_path}: expected kind {kind!r}, got {manifest.get('kind')!r}"
        )
    return manifest, os.path.dirname(os.path.abspath(manifest_path))


def _check_grid(manifest: dict, path: str, ax: Axis, ay: Axis) -> None:
    nx, ny = manifest["grid"]["nx"], manifest["grid"]["ny"]
    if len(ax) != nx + 1 or len(ay) != ny + 1:
        raise DataFormatError(
            f"{path}: component grids {len(ax) - 1}x{len(ay) - 1} do not "
            f"match declared {nx}x{ny}"
        )


def save_nonclassical(dirpath: str, nc: NonClassicalData, domain: Domain) -> str:
    os.makedirs(dirpath, exist_ok=True)
    files = {}
    for name in ("z30", "z31", "z02", "z12", "z22"):
        files[name] = f"{name}.csv"
        save_fn1(os.path.join(dirpath, files[name]), getattr(nc, name))
    files["z32"] = "z32.csv"
    save_fn2(os.path.join(dirpath, "z32.csv"), nc.z32)
    manifest = {
        "kind": "nonclassical",
        "domain": _domain_dict(domain),
        "grid": {"nx": len(nc.axis_x) - 1, "ny": len(nc.axis_y) - 1},
        "files": files,
        "scalars": nc.corner.as_dict(),
    }
    return _write_manifest(dirpath, manifest)


def load_nonclassical(manifest_path: str) -> tuple[NonClassicalData, Domain]:
    manifest, base = _read_manifest(manifest_path, "nonclassical")
    files = manifest["files"]
    z32 = load_fn2(os.path.join(base, files["z32"]))
    parts = {
        name: load_fn1(os.path.join(base, files[name]))
        for name in ("z30", "z31", "z02", "z12", "z22")
    }
    nc = NonClassicalData(
        z32=z32, corner=CornerValues.from_dict(manifest["scalars"]), **parts
    )
    _check_grid(manifest, manifest_path, nc.axis_x, nc.axis_y)
    return nc, _domain_from_dict(manifest["domain"])


def save_classical(dirpath: str, cl: ClassicalData, domain: Domain) -> str:
    os.makedirs(dirpath, exist_ok=True)
    files = {}
    for (i, j), fn in sorted(cl.traces.items()):
        name = f"trace{i}{j}"
        files[name] = f"{name}.csv"
        save_fn1(os.path.join(dirpath, files[name]), fn)
    files["z4"] = "z4.csv"
    save_fn1(os.path.join(dirpath, "z4.csv"), cl.z4)
    manifest = {
        "kind": "classical",
        "domain": _domain_dict(domain),
        "grid": {"nx": len(cl.axis_x) - 1, "ny": len(cl.axis_y) - 1},
        "files": files,
    }
    return _write_manifest(dirpath, manifest)


def load_classical(manifest_path: str) -> tuple[ClassicalData, Domain]:
    manifest, base = _read_manifest(manifest_path, "classical")
    files = manifest["files"]
    traces = {
        (i, j): load_fn1(os.path.join(base, files[f"trace{i}{j}"]))
        for (i, j) in TRACE_KEYS
    }
    cl = ClassicalData(traces=traces, z4=load_fn1(os.path.join(base, files["z4"])))
    _check_grid(manifest, manifest_path, cl.axis_x, cl.axis_y)
    return cl, _domain_from_dict(manifest["domain"])


def save_coefficients(dirpath: str, c: CoefficientSet, domain: Domain) -> str:
    os.makedirs(dirpath, exist_ok=True)
    files = {}
    for (i, j), fn in sorted(c.a.items()):
        name = f"a{i}{j}"
        files[name] = f"{name}.csv"
        save_fn2(os.path.join(dirpath, files[name]), fn)
    majorants = {}
    for i, fn in sorted((c.majorants_x or {}).items()):
        name = f"a0_{i}2"
        majorants[name] = f"{name}.csv"
        save_fn1(os.path.join(dirpath, majorants[name]), fn)
    for j, fn in sorted((c.majorants_y or {}).items()):
        name = f"a0_3{j}"
        majorants[name] = f"{name}.csv"
        save_fn1(os.path.join(dirpath, majorants[name]), fn)
    manifest = {
        "kind": "coefficients",
        "domain": _domain_dict(domain),
        "grid": {"nx": len(c.axis_x) - 1, "ny": len(c.axis_y) - 1},
        "files": files,
        "majorants": majorants,
    }
    return _write_manifest(dirpath, manifest)


def load_coefficients(manifest_path: str) -> tuple[CoefficientSet, Domain]:
    manifest, base = _read_manifest(manifest_path, "coefficients")
    files = manifest["files"]
    a = {
        (i, j): load_fn2(os.path.join(base, files[f"a{i}{j}"]))
        for (i, j) in COEFF_KEYS
    }
    majorants = manifest.get("majorants", {})
    maj_x, maj_y = {}, {}
    for name, rel in majorants.items():
        fn = load_fn1(os.path.join(base, rel))
        if name.startswith("a0_3"):
            maj_y[int(name[4])] = fn
        else:
            maj_x[int(name[3])] = fn
    c = CoefficientSet(a=a, majorants_x=maj_x or None, majorants_y=maj_y or None)
    _check_grid(manifest, manifest_path, c.axis_x, c.axis_y)
    return c, _domain_from_dict(manifest["domain"])

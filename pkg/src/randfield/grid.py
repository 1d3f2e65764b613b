"""Regular-grid field containers, scattered-data projection, trimming,
spatial statistics, and the RFGRID text format.

Grid values are stored row-major with y as the slow index: ``values[j, i]``
is the sample at ``(origin_x + i*dx, origin_y + j*dy)``. Every type is
immutable after construction (arrays are locked), so instances can be shared
freely across threads.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree


class GridParseError(ValueError):
    """A grid or scattered-data file could not be parsed."""


def _locked(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class GridSpec:
    """Geometry of a regular 2D grid: sample counts, spacing, origin."""

    nx: int
    ny: int
    dx: float
    dy: float
    origin_x: float = 0.0
    origin_y: float = 0.0

    def __post_init__(self) -> None:
        if self.nx < 2 or self.ny < 2:
            raise ValueError(f"grid must be at least 2x2, got {self.nx}x{self.ny}")
        if not (self.dx > 0.0 and self.dy > 0.0):
            raise ValueError("grid spacing must be positive")

    @property
    def extent_x(self) -> float:
        """Physical domain size D1 = nx*dx."""
        return self.nx * self.dx

    @property
    def extent_y(self) -> float:
        """Physical domain size D2 = ny*dy."""
        return self.ny * self.dy

    def x_coords(self) -> np.ndarray:
        return self.origin_x + self.dx * np.arange(self.nx)

    def y_coords(self) -> np.ndarray:
        return self.origin_y + self.dy * np.arange(self.ny)


@dataclass(frozen=True)
class GridField:
    """Real values sampled on a regular grid.

    ``values`` is accepted flat (row-major, y slow) or as an (ny, nx) array
    and is stored as a locked (ny, nx) float array.
    """

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        n = self.spec.nx * self.spec.ny
        if v.size != n:
            raise ValueError(f"expected {n} values for {self.spec.nx}x{self.spec.ny} grid, got {v.size}")
        v = v.reshape(self.spec.ny, self.spec.nx).copy()
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", _locked(v))


@dataclass(frozen=True)
class ScatteredField:
    """Irregularly sampled (x, y, value) triples, e.g. nodal results."""

    points: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.points, dtype=float)
        if p.ndim != 2 or p.shape[1] != 3:
            raise ValueError("points must be an (n, 3) array of (x, y, value)")
        if not np.all(np.isfinite(p)):
            raise ValueError("scattered points must be finite")
        object.__setattr__(self, "points", _locked(p.copy()))

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class Ensemble:
    """A list of realizations sharing one grid."""

    fields: tuple
    labels: tuple | None = None

    def __post_init__(self) -> None:
        fields = tuple(self.fields)
        if len(fields) < 1:
            raise ValueError("ensemble must contain at least one field")
        spec = fields[0].spec
        for f in fields[1:]:
            if f.spec != spec:
                raise ValueError("all ensemble members must share one grid spec")
        labels = None if self.labels is None else tuple(self.labels)
        if labels is not None and len(labels) != len(fields):
            raise ValueError("labels must match the number of fields")
        object.__setattr__(self, "fields", fields)
        object.__setattr__(self, "labels", labels)

    @property
    def spec(self) -> GridSpec:
        return self.fields[0].spec

    def __len__(self) -> int:
        return len(self.fields)

    def stack(self) -> np.ndarray:
        """All members as one (L, ny, nx) array."""
        return np.stack([f.values for f in self.fields])


def project_scattered(data: ScatteredField, spec: GridSpec, method: str = "idw",
                      power: float = 2.0, neighbors: int = 4) -> GridField:
    """Project scattered points onto a regular grid.

    method "nearest" copies the value of the nearest point; "idw" takes the
    inverse-distance-weighted mean of the ``neighbors`` nearest points with
    exponent ``power``. Grid nodes outside the data bounding box inflated by
    one grid cell are refused (no extrapolation).
    """
    if len(data) == 0:
        raise ValueError("no data")
    if method not in ("nearest", "idw"):
        raise ValueError(f"unknown projection method {method!r}")
    if method == "idw" and (power <= 0.0 or neighbors < 1):
        raise ValueError("inverse-distance projection needs power > 0 and neighbors >= 1")

    pts = data.points
    xs, ys = spec.x_coords(), spec.y_coords()
    if (xs.min() < pts[:, 0].min() - spec.dx or xs.max() > pts[:, 0].max() + spec.dx
            or ys.min() < pts[:, 1].min() - spec.dy or ys.max() > pts[:, 1].max() + spec.dy):
        raise ValueError("extrapolation beyond data support")

    X, Y = np.meshgrid(xs, ys)
    nodes = np.column_stack([X.ravel(), Y.ravel()])
    tree = cKDTree(pts[:, :2])
    if method == "nearest":
        _, idx = tree.query(nodes, k=1)
        out = pts[idx, 2]
    else:
        k = min(neighbors, len(data))
        d, idx = tree.query(nodes, k=k)
        d = np.atleast_2d(d.reshape(len(nodes), k))
        idx = idx.reshape(len(nodes), k)
        vals = pts[idx, 2]
        exact = d[:, 0] == 0.0
        with np.errstate(divide="ignore"):
            w = d ** (-power)
        w[exact] = 0.0  # placeholder rows, overwritten below
        out = np.where(exact, vals[:, 0], (w * vals).sum(axis=1) / np.where(exact, 1.0, w.sum(axis=1)))
    return GridField(spec, out.reshape(spec.ny, spec.nx))


def trim_margin(f: GridField, fraction: float) -> GridField:
    """Drop floor(fraction*n) rows/columns from each edge (boundary-effect strip)."""
    if not (0.0 <= fraction < 0.5):
        raise ValueError("trim fraction must be in [0, 0.5)")
    spec = f.spec
    # tiny epsilon guards fp noise in fraction*n (e.g. 0.3*10 = 2.9999...)
    cut_x = int(math.floor(fraction * spec.nx + 1e-9))
    cut_y = int(math.floor(fraction * spec.ny + 1e-9))
    nx = spec.nx - 2 * cut_x
    ny = spec.ny - 2 * cut_y
    if nx < 2 or ny < 2:
        raise ValueError("over-trimmed")
    new_spec = GridSpec(nx, ny, spec.dx, spec.dy,
                        spec.origin_x + cut_x * spec.dx,
                        spec.origin_y + cut_y * spec.dy)
    return GridField(new_spec, f.values[cut_y:spec.ny - cut_y, cut_x:spec.nx - cut_x])


def spatial_stats(f: GridField) -> tuple[float, float, float]:
    """Spatial mean, population variance, and coefficient of variation.

    Zero spatial mean makes the CV undefined; it is reported as NaN rather
    than raising or returning infinity.
    """
    v = f.values
    mean = float(v.mean())
    var = float(v.var())
    if mean != 0.0:
        cv = math.sqrt(var) / mean
    else:
        # a constant-zero field has no variation; nonzero variation about a
        # zero mean has no meaningful CV
        cv = 0.0 if var == 0.0 else math.nan
    return mean, var, cv


_FMT = "%.17g"  # round-trips float64 exactly


def save_grid(f: GridField, path) -> None:
    """Write a field in the RFGRID 1 text format."""
    s = f.spec
    lines = ["RFGRID 1 %d %d %s %s %s %s" % (s.nx, s.ny, _FMT % s.dx, _FMT % s.dy,
                                             _FMT % s.origin_x, _FMT % s.origin_y)]
    for row in f.values:
        lines.append(" ".join(_FMT % v for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_grid(path) -> GridField:
    """Read a field in the RFGRID 1 text format, validating exhaustively."""
    with open(path) as fh:
        raw = fh.read().splitlines()
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(raw) if ln.strip()]
    if not lines:
        raise GridParseError(f"{path}: empty file")
    lineno, header = lines[0]
    tok = header.split()
    if len(tok) != 8 or tok[0] != "RFGRID" or tok[1] != "1":
        raise GridParseError(f"{path}:{lineno}: malformed header {header!r}")
    try:
        nx, ny = int(tok[2]), int(tok[3])
        dx, dy, ox, oy = (float(t) for t in tok[4:8])
    except ValueError as exc:
        raise GridParseError(f"{path}:{lineno}: malformed header: {exc}") from None
    values = np.empty((ny, nx))
    rows = lines[1:]
    if len(rows) != ny:
        raise GridParseError(f"{path}: expected {ny} value rows, found {len(rows)}")
    for j, (lineno, ln) in enumerate(rows):
        tok = ln.split()
        if len(tok) != nx:
            msg = f"{path}:{lineno}: expected {nx} values, got {len(tok)}"
            if len(tok) < nx:
                msg += f" ({nx - len(tok)} missing)"
            raise GridParseError(msg)
        for i, t in enumerate(tok):
            try:
                v = float(t)
            except ValueError:
                raise GridParseError(f"{path}:{lineno}: bad token {t!r}") from None
            if not math.isfinite(v):
                raise GridParseError(f"{path}:{lineno}: non-finite value {t!r}")
            values[j, i] = v
    try:
        return GridField(GridSpec(nx, ny, dx, dy, ox, oy), values)
    except ValueError as exc:
        raise GridParseError(f"{path}: {exc}") from None


def save_scattered(data: ScatteredField, path) -> None:
    """Write scattered points as CSV with header x,y,value."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "value"])
        for x, y, v in data.points:
            w.writerow([_FMT % x, _FMT % y, _FMT % v])


def load_scattered(path) -> ScatteredField:
    """Read scattered points from CSV with header x,y,value."""
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        try:
            header = next(rd)
        except StopIteration:
            raise GridParseError(f"{path}: empty file") from None
        if [h.strip().lower() for h in header] != ["x", "y", "value"]:
            raise GridParseError(f"{path}:1: expected header x,y,value, got {header!r}")
        pts = []
        for lineno, row in enumerate(rd, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise GridParseError(f"{path}:{lineno}: expected 3 columns, got {len(row)}")
            try:
                x, y, v = (float(t) for t in row)
            except ValueError:
                raise GridParseError(f"{path}:{lineno}: bad row {row!r}") from None
            if not all(math.isfinite(t) for t in (x, y, v)):
                raise GridParseError(f"{path}:{lineno}: non-finite value in {row!r}")
            pts.append((x, y, v))
    if not pts:
        raise GridParseError(f"{path}: no data rows")
    return ScatteredField(np.array(pts))

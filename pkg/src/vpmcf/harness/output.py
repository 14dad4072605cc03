"""CSV and SVG writers/readers for run output."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from ..profile import GridSpec, RadialProfile

SNAPSHOT_COLUMNS = ("x", "rho", "d1", "d2", "y", "v", "p", "q", "k", "H", "A2")
TIMESERIES_COLUMNS = (
    "t", "h", "volume", "area", "min_rho", "max_A2", "max_v", "max_vy",
    "max_H", "min_H", "zeros_d1", "zeros_d2", "zeros_H", "neck_positions", "status",
    "frac_breve", "frac_sharp", "min_y_breve", "max_v_sharp", "boundary_height_flat",
)
CENSUS_COLUMNS = ("t", "zeros_d1", "zeros_d2", "zeros_H", "neck_positions",
                  "multiplicity_flag_count")
TEMPLATE_COLUMNS = ("t", "alpha", "cyl_r", "cyl_resid", "cat_c5", "cat_resid")


def fmt(value) -> str:
    """Shortest round-trip text for floats; plain str otherwise."""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (list, tuple)):
        return ";".join(fmt(v) for v in value)
    return str(value)


def write_rows(path, columns, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt(row[c]) for c in columns])


def write_snapshot_csv(path, state, extra=None):
    """One row per node; ``extra`` maps additional column names to arrays."""
    fld = state.field
    cols = {"x": state.profile.grid.x, "rho": state.profile.rho, **fld.as_columns()}
    if extra:
        cols.update(extra)
    names = list(SNAPSHOT_COLUMNS) + [k for k in (extra or {}) if k not in SNAPSHOT_COLUMNS]
    rows = [{c: float(cols[c][i]) for c in names} for i in range(len(cols["x"]))]
    write_rows(path, names, rows)


def read_columns(path):
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ValueError(f"{path}: empty file")
        data = {name: [] for name in reader.fieldnames}
        for row in reader:
            for k, v in row.items():
                data[k].append(v)
    return data


def read_snapshot_csv(path, n: int = 2, time: float = 0.0) -> RadialProfile:
    """Profile from a CSV with at least ``x`` and ``rho`` columns on a uniform grid."""
    data = read_columns(path)
    for col in ("x", "rho"):
        if col not in data:
            raise ValueError(f"{path}: missing column {col!r}")
    x = np.array(data["x"], dtype=float)
    rho = np.array(data["rho"], dtype=float)
    grid = GridSpec(x[0], x[-1], x.size - 1, n)
    if not np.allclose(x, grid.x, rtol=0, atol=1e-9 * (grid.b - grid.a)):
        raise ValueError(f"{path}: x is not a uniform grid")
    return RadialProfile(grid, rho, time)


def write_profile_svg(path, profile, width=600, height=300, rho_max=None, title=None):
    """Generating curve and its mirror image as two polylines."""
    grid = profile.grid
    x = grid.x
    rho = profile.rho
    top = rho_max if rho_max is not None else float(rho.max())
    top = top if top > 0 else 1.0
    margin = 10.0

    def px(xv):
        return margin + (xv - grid.a) / (grid.b - grid.a) * (width - 2 * margin)

    def py(yv):
        return height / 2 - yv / top * (height / 2 - margin)

    def line(sign):
        return " ".join(f"{px(a):.3f},{py(sign * b):.3f}" for a, b in zip(x, rho))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" '
        f'width="{width}" height="{height}">',
        f'<line x1="{margin}" y1="{height / 2}" x2="{width - margin}" y2="{height / 2}" '
        'stroke="#999" stroke-dasharray="4 3"/>',
        f'<polyline fill="none" stroke="black" points="{line(1)}"/>',
        f'<polyline fill="none" stroke="black" points="{line(-1)}"/>',
    ]
    if title:
        parts.append(f'<text x="{margin}" y="{margin + 10}" font-size="12">{title}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")


def isnan(v) -> bool:
    return isinstance(v, float) and math.isnan(v)

"""Per-state statistics of a trajectory and the run monitors built on them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from ..profile import enclosed_volume, surface_area
from ..singularity import RegionMask, classify_regions
from ..sturm import DEFAULT_TOL, ZeroCensus, monotonicity_report, zero_census

PASS = "pass"
FAIL = "fail"
OBSERVED = "observed"

AREA_TOL = 1e-8
BOUND_TOL = 1e-3
HEIGHT_FRACTION = 0.5


@dataclass(frozen=True)
class MonitorReport:
    name: str
    status: str
    worst_value: float
    worst_time: float
    tolerance: float
    note: str = ""

    @property
    def failed(self) -> bool:
        return self.status == FAIL

    def line(self) -> str:
        text = (f"{self.name}: {self.status} worst_value={self.worst_value!r} "
                f"worst_time={self.worst_time!r} tolerance={self.tolerance!r}")
        return text + (f" ({self.note})" if self.note else "")


@dataclass
class RunAnalysis:
    """Statistics of every recorded state of one trajectory."""

    traj: object
    censuses: List[ZeroCensus]
    regions: List[Optional[RegionMask]]
    rows: List[Dict]
    c2_obs: float
    c3_obs: float
    census_tol: float

    def column(self, name) -> np.ndarray:
        return np.array([r[name] for r in self.rows], dtype=float)


def analyze(traj, census_tol: float = DEFAULT_TOL, c00: float = 4.0) -> RunAnalysis:
    """Censuses, region masks and time-series rows of a trajectory.

    The region split needs the observed lower bound ``c2_obs = min h``;
    when ``h`` is not positive throughout, the region columns are NaN.
    """
    states = list(traj)
    hs = np.array([s.h for s in states])
    c2_obs, c3_obs = float(hs.min()), float(hs.max())
    censuses = [zero_census(s, census_tol) for s in states]
    regions = [classify_regions(s, c2_obs, c00) if c2_obs > 0 else None for s in states]
    nan = float("nan")
    rows = []
    for s, c, reg in zip(states, censuses, regions):
        fld = s.field
        rows.append({
            "t": s.t,
            "h": s.h,
            "volume": enclosed_volume(s.profile),
            "area": surface_area(s.profile),
            "min_rho": float(s.rho.min()),
            "max_A2": float(fld.A2.max()),
            "max_v": float(fld.v.max()),
            "max_vy": float((fld.v * fld.y).max()),
            "max_H": float(fld.H.max()),
            "min_H": float(fld.H.min()),
            "max_k_over_p": float((fld.k / fld.p).max()),
            "zeros_d1": c.zeros_d1,
            "zeros_d2": c.zeros_d2,
            "zeros_H": c.zeros_H,
            "neck_positions": list(c.necks),
            "multiplicity_flag_count": c.multiplicity_flag_count,
            "status": s.status.value,
            "frac_breve": reg.frac_breve if reg else nan,
            "frac_sharp": reg.frac_sharp if reg else nan,
            "min_y_breve": reg.min_y_breve if reg else nan,
            "max_v_sharp": reg.max_v_sharp if reg else nan,
            "boundary_height_flat": reg.boundary_height_flat if reg else nan,
        })
    return RunAnalysis(traj, censuses, regions, rows, c2_obs, c3_obs, census_tol)


def _report(name, ok, values, times, tol, worst="max", note=""):
    values = np.asarray(values, dtype=float)
    if values.size == 0 or np.all(np.isnan(values)):
        return MonitorReport(name, PASS if ok is not None else OBSERVED, float("nan"),
                             float("nan"), tol, note or "no data")
    i = int(np.nanargmax(values) if worst == "max" else np.nanargmin(values))
    status = OBSERVED if ok is None else (PASS if ok else FAIL)
    return MonitorReport(name, status, float(values[i]), float(times[i]), tol, note)


def monitor_volume(an: RunAnalysis, vol_tol: float) -> MonitorReport:
    t = an.column("t")
    vol = an.column("volume")
    drift = np.abs(vol - vol[0]) / vol[0]
    if not an.traj.config.volume_preserving:
        return _report("volume", None, drift, t, vol_tol, note="plain_mcf: volume not conserved")
    return _report("volume", bool(drift.max() <= vol_tol), drift, t, vol_tol)


def monitor_area(an: RunAnalysis) -> MonitorReport:
    t = an.column("t")
    area = an.column("area")
    inc = np.concatenate(([0.0], np.diff(area)))
    return _report("area", bool(inc.max() <= AREA_TOL), inc, t, AREA_TOL,
                   note="largest increase between records")


def monitor_h_positive(an: RunAnalysis) -> MonitorReport:
    t = an.column("t")
    h = an.column("h")
    if not an.traj.config.volume_preserving:
        return _report("h_positive", None, h, t, 0.0, worst="min", note="plain_mcf")
    return _report("h_positive", bool(h.min() > 0), h, t, 0.0, worst="min")


def vy_slope(an: RunAnalysis) -> float:
    """Growth rate allowed for ``max(vy)``: ``c3_obs``, or 0 without forcing."""
    return an.c3_obs if an.traj.config.volume_preserving else 0.0


def vy_excess(an: RunAnalysis) -> np.ndarray:
    """``max(vy)(t) - max(vy)(0) - c3 t``; the bound asks for ``<= tol``."""
    t = an.column("t")
    c3 = vy_slope(an)
    vy = an.column("max_vy")
    return vy - vy[0] - c3 * (t - t[0])


def monitor_vy(an: RunAnalysis) -> MonitorReport:
    ex = vy_excess(an)
    return _report("vy_bound", bool(ex.max() <= BOUND_TOL), ex, an.column("t"), BOUND_TOL,
                   note=f"excess over max(vy)(0) + c3 t, c3={vy_slope(an)!r}")


def monitor_k_over_p(an: RunAnalysis) -> MonitorReport:
    kp = an.column("max_k_over_p")
    bound = float(max(1.0, kp[0]))
    ex = kp - bound
    return _report("k_over_p", bool(ex.max() <= BOUND_TOL), ex, an.column("t"), BOUND_TOL,
                   note=f"excess over max(1, initial max k/p) = {bound!r}")


def monitor_min_H(an: RunAnalysis) -> MonitorReport:
    return _report("min_H", None, an.column("min_H"), an.column("t"), 0.0, worst="min",
                   note="observed constant C^2 = max(0, -min H)")


def monitor_breve_height(an: RunAnalysis) -> MonitorReport:
    t = an.column("t")
    y = an.column("min_y_breve")
    nonempty = np.flatnonzero(~np.isnan(y))
    if nonempty.size == 0:
        return MonitorReport("breve_height", PASS, float("nan"), float("nan"), HEIGHT_FRACTION,
                             "low-curvature region empty on every record (vacuous)")
    floor = HEIGHT_FRACTION * y[nonempty[0]]
    ok = bool(np.nanmin(y) >= floor)
    return _report("breve_height", ok, y, t, HEIGHT_FRACTION, worst="min",
                   note=f"floor {floor!r} = {HEIGHT_FRACTION} x first nonempty value")


def monitor_sturm(an: RunAnalysis) -> MonitorReport:
    viol = monotonicity_report(an.traj, an.census_tol, an.censuses)
    if viol:
        v = viol[0]
        return MonitorReport("sturm", FAIL, float(len(viol)), float(v.t), 0.0,
                             f"first: {v.quantity} {v.before}->{v.after}")
    return MonitorReport("sturm", PASS, 0.0, float("nan"), 0.0, "no increases")


def monitor_sharp_v(an: RunAnalysis) -> MonitorReport:
    return _report("sharp_v", None, an.column("max_v_sharp"), an.column("t"), 0.0,
                   note="max v over the high-slope region")


def run_monitors(an: RunAnalysis, names, vol_tol: float = 1e-6) -> List[MonitorReport]:
    table = {
        "volume": lambda: monitor_volume(an, vol_tol),
        "area": lambda: monitor_area(an),
        "h_positive": lambda: monitor_h_positive(an),
        "vy_bound": lambda: monitor_vy(an),
        "k_over_p": lambda: monitor_k_over_p(an),
        "min_H": lambda: monitor_min_H(an),
        "breve_height": lambda: monitor_breve_height(an),
        "sturm": lambda: monitor_sturm(an),
        "sharp_v": lambda: monitor_sharp_v(an),
    }
    return [table[name]() for name in names]

"""Execute a configured run and write its output directory."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

from ..errors import EmptyWindow, InsufficientBlowupData
from ..flow import Trajectory, run
from ..singularity import (BlowupFit, auto_center_alpha, fit_blowup_rate, fit_templates,
                           rescale)
from .analysis import MonitorReport, RunAnalysis, analyze, run_monitors
from .config import SimConfig
from .output import (CENSUS_COLUMNS, TEMPLATE_COLUMNS, TIMESERIES_COLUMNS, write_profile_svg,
                     write_rows, write_snapshot_csv)

TEMPLATE_HALF_WIDTH = 1.0
TEMPLATE_RECORDS = 50


@dataclass
class RunResult:
    traj: Trajectory
    analysis: RunAnalysis
    monitors: List[MonitorReport]
    fit: Optional[BlowupFit]
    fit_error: Optional[str]
    out_dir: Path

    @property
    def monitor_failed(self) -> bool:
        return any(m.failed for m in self.monitors)


def template_rows(traj, last: int = TEMPLATE_RECORDS, half_width: float = TEMPLATE_HALF_WIDTH):
    """Cylinder/catenoid fits of the rescaled neck over the last records."""
    rows = []
    for s in list(traj)[-last:]:
        center, alpha = auto_center_alpha(s)
        try:
            tf = fit_templates(rescale(s, center, alpha, half_width))
        except EmptyWindow:
            continue
        rows.append({"t": s.t, "alpha": alpha, "cyl_r": tf.cyl_r, "cyl_resid": tf.cyl_resid,
                     "cat_c5": tf.cat_c5, "cat_resid": tf.cat_resid})
    return rows


def execute(cfg: SimConfig, out_dir=None) -> RunResult:
    """Run the flow, analyze it and write every output file."""
    out = Path(out_dir) if out_dir is not None else cfg.output_dir()
    out.mkdir(parents=True, exist_ok=True)
    traj = run(cfg.initial_profile(), cfg.flow)
    an = analyze(traj, cfg.census_tol, cfg.c00)
    monitors = run_monitors(an, cfg.monitors, traj.config.vol_tol)

    write_rows(out / "timeseries.csv", TIMESERIES_COLUMNS, an.rows)
    write_rows(out / "census.csv", CENSUS_COLUMNS, an.rows)
    snap_dir = out / "snapshots"
    snap_dir.mkdir(exist_ok=True)
    rho_max = max(float(s.rho.max()) for s in traj)
    for i, s in enumerate(traj):
        write_snapshot_csv(snap_dir / f"{i:04d}.csv", s)
        if cfg.svg:
            write_profile_svg(snap_dir / f"{i:04d}.svg", s.profile, rho_max=rho_max,
                              title=f"t = {s.t:.6g}")
    (out / "monitors.txt").write_text("".join(m.line() + "\n" for m in monitors))

    fit = None
    fit_error = None
    if traj.status.singular:
        try:
            fit = fit_blowup_rate(an.column("t"), an.column("max_A2"))
            text = fit.report()
        except InsufficientBlowupData as exc:
            fit_error = str(exc)
            text = f"classification = unavailable\nerror = {exc}\n"
        (out / "fit.txt").write_text(f"status = {traj.status.value}\n" + text)
        write_rows(out / "templates.csv", TEMPLATE_COLUMNS, template_rows(traj))
    return RunResult(traj, an, monitors, fit, fit_error, out)

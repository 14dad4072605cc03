"""Acceptance criteria: exact-solution oracles and property checks on a
standard set of scenarios.

Each criterion returns a :class:`CriterionResult`.  Scenario runs are
cached per process, so criteria that share a run pay for it once.
"""

from __future__ import annotations

import hashlib
import tempfile
import time
from dataclasses import dataclass, replace
from functools import lru_cache
from pathlib import Path
from typing import Callable, Dict, List, Sequence

import numpy as np

from ..flow import FlowConfig, Mode, Status, initial_state, run, step
from ..operators import evolution_residual
from ..profile import (GridSpec, RadialProfile, curvature_fields, enclosed_volume,
                       surface_area)
from ..singularity import fit_templates, fit_type1, rescale
from ..sturm import monotonicity_report
from . import presets
from .analysis import analyze, vy_excess
from .config import parse_config
from .runner import execute


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    measured: str
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number:2d} {self.name}: {self.measured} ({self.seconds:.1f} s)"


# Scenario definitions ---------------------------------------------------------

DUMBBELL_R = 0.2
DUMBBELL_AMP = 0.12
DUMBBELL_T_END = 0.05
DUMBBELL_N = 1600
DUMBBELL_N_COARSE = 800
RECORD_FACTOR = 0.95

PERTURBED_CONFIG = """\
# perturbed cylinder, second mode
a = 0
b = 1
N = 400
n = 2
mode = volume_preserving
t_end = 0.5
initial = perturbed(1.0, 0.1, 2)
output_every = 2000
"""


@lru_cache(maxsize=None)
def stationary():
    grid = GridSpec(0.0, 1.0, 200, 2)
    return run(presets.cylinder(grid, 1.0), FlowConfig(t_end=1.0, output_every=5000))


@lru_cache(maxsize=None)
def collapsing():
    grid = GridSpec(0.0, 1.0, 64, 2)
    cfg = FlowConfig(t_end=1.0, mode=Mode.PLAIN_MCF, output_every=2000,
                     record_rho_factor=RECORD_FACTOR)
    return run(presets.cylinder(grid, 1.0), cfg)


@lru_cache(maxsize=None)
def perturbed(projection: bool = True):
    cfg = parse_config(PERTURBED_CONFIG)
    flow = replace(cfg.flow, volume_projection=projection)
    return run(cfg.initial_profile(), flow)


def _dumbbell_run(N, amp):
    grid = GridSpec(0.0, 1.0, N, 2)
    cfg = FlowConfig(t_end=DUMBBELL_T_END, output_every=2000, stop_rho_min=8 * grid.dx,
                     record_rho_factor=RECORD_FACTOR)
    return run(presets.dumbbell(grid, DUMBBELL_R, amp), cfg)


@lru_cache(maxsize=None)
def dumbbell(N: int = DUMBBELL_N):
    """Dumbbell pinch; escalates the amplitude once if the neck does not pinch.

    Returns ``(trajectory, amplitudes tried)``.
    """
    amps = [DUMBBELL_AMP]
    traj = _dumbbell_run(N, amps[-1])
    if not traj.status.singular:
        amps.append(presets.escalated_amplitude(DUMBBELL_R, amps[-1]))
        traj = _dumbbell_run(N, amps[-1])
    return traj, tuple(amps)


@lru_cache(maxsize=None)
def _analysis(key):
    traj = {"stationary": stationary, "collapsing": collapsing,
            "perturbed": perturbed, "dumbbell": lambda: dumbbell()[0]}[key]()
    return analyze(traj)


# Criteria ---------------------------------------------------------------------

def _random_profile(rng):
    N = 2 * int(rng.integers(8, 200))
    n = int(rng.integers(2, 6))
    a = float(rng.uniform(-2, 2))
    L = float(rng.uniform(0.2, 5))
    grid = GridSpec(a, a + L, N, n)
    s = (grid.x - a) / L
    m = int(rng.integers(1, 6))
    r = float(rng.uniform(0.05, 3))
    coef = rng.uniform(-1, 1, m)
    coef *= rng.uniform(0, 0.95) * r / np.abs(coef).sum()
    rho = r + sum(c * np.cos(np.pi * (j + 1) * s) for j, c in enumerate(coef))
    return RadialProfile(grid, rho)


def criterion_1(samples: int = 1000, seed: int = 12345):
    """Pointwise algebraic identities on random profiles."""
    rng = np.random.default_rng(seed)
    worst = dict.fromkeys(("pvy", "p2q2", "H", "A2"), 0.0)
    for _ in range(samples):
        prof = _random_profile(rng)
        f = curvature_fields(prof)
        n = prof.grid.n
        worst["pvy"] = max(worst["pvy"], float(np.max(np.abs(f.p * f.v * f.y - 1))))
        worst["p2q2"] = max(worst["p2q2"],
                            float(np.max(np.abs((f.p ** 2 + f.q ** 2) * f.y ** 2 - 1))))
        scale_H = np.abs(f.k) + (n - 1) * f.p
        worst["H"] = max(worst["H"], float(np.max(np.abs(f.H - f.k - (n - 1) * f.p) / scale_H)))
        scale_A = f.k ** 2 + (n - 1) * f.p ** 2
        worst["A2"] = max(worst["A2"], float(np.max(
            np.abs(f.A2 - f.k ** 2 - (n - 1) * f.p ** 2) / scale_A)))
    ok = all(v <= 1e-12 for v in worst.values())
    text = ", ".join(f"{k} {v:.2e}" for k, v in worst.items()) + " (tol 1e-12 rel)"
    return ok, f"{samples} profiles: {text}"


def criterion_2():
    traj = stationary()
    drift = max(float(np.max(np.abs(s.rho - 1.0))) for s in traj)
    hdev = max(abs(s.h - 1.0) for s in traj)
    ok = drift <= 1e-8 and hdev <= 1e-8 and traj.status is Status.REACHED_T_END
    return ok, (f"sup drift {drift:.2e} (tol 1e-8), max |h-1| {hdev:.2e} (tol 1e-8), "
                f"{traj.steps} steps, status {traj.status.value}")


def criterion_3():
    traj = collapsing()
    n = traj.grid.n
    r0 = 1.0
    T = r0 ** 2 / (2 * (n - 1))
    err = 0.0
    for s in traj:
        exact2 = r0 ** 2 - 2 * (n - 1) * s.t
        if exact2 <= 0 or np.sqrt(exact2) < 0.1 * r0:
            continue
        exact = np.sqrt(exact2)
        err = max(err, float(np.max(np.abs(s.rho - exact))) / exact)
    t_term = traj.final.t
    rel_T = abs(t_term - T) / T
    ok = err <= 1e-4 and rel_T <= 5e-3 and traj.status.singular
    return ok, (f"max rel error {err:.2e} (tol 1e-4), termination t={t_term:.8f} vs {T} "
                f"rel {rel_T:.2e} (tol 5e-3), status {traj.status.value}")


def criterion_4():
    traj = collapsing()
    fit = fit_type1(traj)
    T = 0.5
    eC = abs(fit.C_est - 0.5) / 0.5
    eT = abs(fit.T_est - T) / T
    ok = eC <= 0.02 and eT <= 5e-3 and fit.classification == "type_I"
    return ok, (f"C_est {fit.C_est:.6f} (rel {eC:.1e}, tol 2e-2), T_est {fit.T_est:.6f} "
                f"(rel {eT:.1e}, tol 5e-3), r2 {fit.r2:.6f}, {fit.classification}, "
                f"{fit.n_points} points")


def _max_drift(traj):
    V0 = traj[0].V0
    return max(abs(enclosed_volume(s.profile) - V0) / V0 for s in traj)


def criterion_5():
    on, off = perturbed(True), perturbed(False)
    d_on, d_off = _max_drift(on), _max_drift(off)
    reached = on.final.t >= 0.5 and off.final.t >= 0.5
    ok = d_on <= 1e-12 and d_off <= 1e-6 and reached
    return ok, (f"drift with projection {d_on:.2e} (tol 1e-12), without {d_off:.2e} "
                f"(tol 1e-6), t_end reached {reached}")


def _all_runs():
    return {
        "stationary": stationary(),
        "collapsing": collapsing(),
        "perturbed": perturbed(True),
        "perturbed_noproj": perturbed(False),
        "dumbbell": dumbbell()[0],
        "dumbbell_coarse": dumbbell(DUMBBELL_N_COARSE)[0],
    }


def criterion_6():
    bad = []
    parts = []
    for name, traj in _all_runs().items():
        area = np.array([surface_area(s.profile) for s in traj])
        inc = float(np.max(np.diff(area))) if area.size > 1 else 0.0
        hmin = min(s.h for s in traj)
        if inc > 1e-8 or not hmin > 0:
            bad.append(name)
        parts.append(f"{name}: dA_max {inc:.1e}, min h {hmin:.3g}")
    return not bad, "; ".join(parts) + (f"; failing {bad}" if bad else "")


def criterion_7():
    parts = []
    ok = True
    for key in ("stationary", "collapsing", "perturbed", "dumbbell"):
        an = _analysis(key)
        viol = monotonicity_report(an.traj, an.census_tol, an.censuses)
        ok &= not viol
        first = an.censuses[0]
        last = an.censuses[-1]
        parts.append(f"{key}: {len(viol)} violations "
                     f"(d1 {first.zeros_d1}->{last.zeros_d1}, d2 {first.zeros_d2}->"
                     f"{last.zeros_d2}, H {first.zeros_H}->{last.zeros_H})")
    return ok, "; ".join(parts)


def criterion_8():
    traj, amps = dumbbell()
    coarse, _ = dumbbell(DUMBBELL_N_COARSE)
    if not traj.status.singular:
        return False, f"dumbbell did not pinch (amplitudes {amps})"
    an = _analysis("dumbbell")
    vy = float(vy_excess(an).max())
    kp = an.column("max_k_over_p")
    kp_ex = float(kp.max() - max(1.0, kp[0]))
    mh_fine = float(an.column("min_H").min())
    mh_coarse = min(float(s.field.H.min()) for s in coarse)
    C2 = max(0.0, -mh_fine)
    stable = abs(mh_coarse - mh_fine) <= 0.2 * abs(mh_fine)
    yb = an.column("min_y_breve")
    nonempty = np.flatnonzero(~np.isnan(yb))
    if nonempty.size:
        y0 = float(yb[nonempty[0]])
        ymin = float(np.nanmin(yb))
        breve_ok = ymin >= 0.5 * y0
        breve = f"min y on low-H set {ymin:.4g} vs 0.5 x {y0:.4g}"
    else:
        breve_ok = True
        breve = "low-H set empty on every record (vacuous)"
    ok = vy <= 1e-3 and kp_ex <= 1e-3 and mh_fine >= -C2 and stable and breve_ok
    return ok, (f"vy excess {vy:.2e} (tol 1e-3, c3_obs {an.c3_obs:.4g}); k/p excess "
                f"{kp_ex:.2e} (tol 1e-3); min H {mh_fine:.4f} >= -C^2 = {-C2:.4g}, "
                f"N={DUMBBELL_N_COARSE} gives {mh_coarse:.4f} "
                f"(rel {abs(mh_coarse - mh_fine) / abs(mh_fine):.1e}, tol 0.2); {breve}")


def _three_states(profile, mode, dt):
    cfg = FlowConfig(t_end=1.0, mode=mode)
    s0 = initial_state(profile, cfg)
    s1 = step(s0, dt)
    return [s0, s1, step(s1, dt)]


CONVERGENCE_GRIDS = (64, 128, 256, 512)


def convergence_series(quantity="k", grids=CONVERGENCE_GRIDS, t0=0.005, dt=1e-7):
    """Max residual of one equation on a perturbed volume preserving flow
    at time ``t0``, for each grid size."""
    out = []
    for N in grids:
        grid = GridSpec(0.0, 1.0, N, 2)
        traj = run(presets.perturbed(grid, 1.0, 0.1, (1,)),
                   FlowConfig(t_end=t0, output_every=10**9))
        states = _three_states(traj.final.profile, Mode.VOLUME_PRESERVING, dt)
        out.append(float(evolution_residual(states, quantity).max()))
    return np.array(out)


def criterion_9():
    traj = collapsing()
    # The collapsing cylinder stays x-independent, so its recorded radii
    # lift exactly to the finer grid.
    grid = GridSpec(0.0, 1.0, 512, 2)
    early = [s for s in traj if s.rho.min() > 0.5]
    picks = [early[i] for i in np.unique(np.linspace(0, len(early) - 1, 6).astype(int))]
    worst = {"y": 0.0, "k": 0.0}
    for s in picks:
        prof = RadialProfile(grid, np.full(grid.N + 1, float(s.rho.mean())), s.t)
        states = _three_states(prof, Mode.PLAIN_MCF, 1e-5)
        for q in worst:
            worst[q] = max(worst[q], float(evolution_residual(states, q).max()))
    res_k = convergence_series("k")
    ratios = res_k[:-1] / res_k[1:]
    res_y = convergence_series("y")
    conv_ok = bool(np.all(np.abs(ratios - 4) <= 1.0))
    y_exact = bool(res_y.max() <= 1e-6)
    ok = max(worst.values()) <= 1e-3 and conv_ok and y_exact
    return ok, (f"collapsing N=512: res(y) {worst['y']:.1e}, res(k) {worst['k']:.1e} "
                f"(tol 1e-3, {len(picks)} times); perturbed flow res(k) "
                f"{', '.join(f'{r:.2e}' for r in res_k)} on N={list(CONVERGENCE_GRIDS)}, "
                f"ratios {', '.join(f'{r:.2f}' for r in ratios)} (4 +/- 1); "
                f"res(y) <= {res_y.max():.1e} on every grid (spatially exact)")


def rescaled_necks(traj, last: int = 10, half_width: float = 1.0, samples: int = 201):
    """Rescaled neck profiles of the last records on a common window.

    Returns ``(x_common, rows, template fit of the final record)``.
    """
    states = list(traj)[-last:]
    profs = []
    for s in states:
        i = int(np.argmin(s.rho))
        alpha = 1.0 / float(s.rho[i])
        profs.append(rescale(s, float(s.grid.x[i]), alpha, half_width))
    lo = max(p.grid.a for p in profs)
    hi = min(p.grid.b for p in profs)
    xc = np.linspace(lo, hi, samples)
    rows = np.array([np.interp(xc, p.grid.x, p.rho) for p in profs])
    return xc, rows, fit_templates(profs[-1])


def criterion_10():
    traj, amps = dumbbell()
    if not traj.status.singular:
        return False, (f"no pinch before t_end={DUMBBELL_T_END} with amplitudes {amps}; "
                       f"final min rho {traj.final.rho.min():.3g}")
    xc, rows, tf = rescaled_necks(traj)
    pair = max(float(np.max(np.abs(a - b))) for a in rows for b in rows)
    best = tf.best_resid
    which = "cylinder" if best == tf.cyl_resid else "catenoid"
    esc = "" if len(amps) == 1 else f", escalated amplitude {amps[0]} -> {amps[-1]}"
    ok = pair <= 0.05 and best <= 0.05
    return ok, (f"pinch at t={traj.final.t:.6f}, window [{xc[0]:.3f}, {xc[-1]:.3f}], "
                f"pairwise sup {pair:.4f} (tol 0.05), best template {which} {best:.4f} "
                f"(cyl {tf.cyl_resid:.4f}, cat {tf.cat_resid:.4f}; tol 0.05){esc}")


def criterion_11():
    cfg = parse_config(PERTURBED_CONFIG)
    digests = []
    with tempfile.TemporaryDirectory() as tmp:
        for k in range(2):
            res = execute(cfg, Path(tmp) / f"run{k}")
            digests.append(hashlib.sha256((res.out_dir / "timeseries.csv").read_bytes())
                           .hexdigest())
    return digests[0] == digests[1], f"sha256 {digests[0][:16]}... vs {digests[1][:16]}..."


CRITERIA: Dict[int, tuple] = {
    1: ("algebraic identities", criterion_1),
    2: ("stationary cylinder", criterion_2),
    3: ("collapsing-cylinder oracle", criterion_3),
    4: ("type-I fit oracle", criterion_4),
    5: ("volume conservation", criterion_5),
    6: ("monotone area and positive h", criterion_6),
    7: ("Sturm monotonicity", criterion_7),
    8: ("curvature and height bounds on dumbbell pinch", criterion_8),
    9: ("evolution-equation residuals", criterion_9),
    10: ("rescaling stabilization", criterion_10),
    11: ("determinism", criterion_11),
}

SUITES: Dict[str, Sequence[int]] = {
    "identities": (1,),
    "oracles": (2, 3, 4, 5, 9, 11),
    "sturm": (7,),
    "blowup": (8, 10),
    "all": tuple(range(1, 12)),
}


def run_criterion(number: int) -> CriterionResult:
    name, fn = CRITERIA[number]
    start = time.perf_counter()
    ok, measured = fn()
    return CriterionResult(number, name, bool(ok), measured, time.perf_counter() - start)


def run_suite(suite: str, echo: Callable[[str], None] = print) -> List[CriterionResult]:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; expected one of {sorted(SUITES)}")
    results = []
    for number in SUITES[suite]:
        res = run_criterion(number)
        echo(res.line())
        results.append(res)
    return results

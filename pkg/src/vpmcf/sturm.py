"""Zero censuses of rho', rho'' and H along a flow, and neck tracking.

For solutions of one-dimensional parabolic equations the number of sign
changes cannot grow in time.  The tools here count sign changes on the
discrete profile and flag any recorded increase.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple

import numpy as np

from .profile import diff_mirrored

CENSUS_FIELDS = ("d1", "d2", "H")
DEFAULT_TOL = 1e-8


def sign_change_count(values, tol: float = 0.0) -> int:
    """Number of strict sign changes after zeroing entries with ``|v| < tol``.

    A run of zeroed samples between opposite signs counts once; between
    equal signs it counts nothing.
    """
    if tol < 0:
        raise ValueError("tol must be >= 0")
    vals = np.asarray(values, dtype=float)
    signs = np.sign(np.where(np.abs(vals) < tol, 0.0, vals))
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def _sign_change_locations(x, vals, tol):
    """Linear-interpolated x positions of the sign changes counted above."""
    clamped = np.where(np.abs(vals) < tol, 0.0, vals)
    nz = np.flatnonzero(clamped)
    out = []
    for i, j in zip(nz[:-1], nz[1:]):
        if np.sign(clamped[i]) != np.sign(clamped[j]):
            vi, vj = vals[i], vals[j]
            out.append(x[i] + vi * (x[j] - x[i]) / (vi - vj))
    return out


def _scale(name, values, rho):
    # Floor keeps roundoff-level fields (a decayed perturbation) from being
    # censused relative to their own noise.
    floor = 1.0 if name == "d1" else 1.0 / float(np.max(rho))
    return max(float(np.max(np.abs(values))), floor)


def neck_positions(x, rho) -> List[float]:
    """Strict local minima of ``rho``; endpoints use the mirror neighbour."""
    rho = np.asarray(rho)
    ext = np.concatenate(([rho[1]], rho, [rho[-2]]))
    mid = ext[1:-1]
    is_min = (mid < ext[:-2]) & (mid < ext[2:])
    return [float(xi) for xi in np.asarray(x)[is_min]]


@dataclass(frozen=True)
class ZeroCensus:
    t: float
    zeros_d1: int
    zeros_d2: int
    zeros_H: int
    zero_locations_d2: List[float]
    necks: List[float]
    multiplicity_flags: Dict[str, np.ndarray] = field(default_factory=dict)

    def count(self, name: str) -> int:
        return getattr(self, f"zeros_{name}")

    @property
    def multiplicity_flag_count(self) -> int:
        return int(sum(int(np.count_nonzero(f)) for f in self.multiplicity_flags.values()))


def zero_census(state, tol: float = DEFAULT_TOL) -> ZeroCensus:
    """Census sign changes of ``rho'``, ``rho''`` and ``H`` over interior nodes.

    ``H/p`` has the zeros of ``H`` since ``p > 0``, so ``H`` is censused
    directly.  Values below ``tol * scale`` are treated as zero, where the
    scale is the field's max norm (floored at 1 for ``rho'`` and at
    ``1/max(rho)`` for the curvatures).
    """
    fld = state.field
    grid = state.profile.grid
    x = grid.x
    rho = state.profile.rho
    counts = {}
    flags = {}
    locations_d2: List[float] = []
    for name in CENSUS_FIELDS:
        vals = getattr(fld, name)
        scale = _scale(name, vals, rho)
        thresh = tol * scale
        interior = vals[1:-1]
        counts[name] = sign_change_count(interior, thresh)
        if name == "d2":
            locations_d2 = [float(z) for z in _sign_change_locations(x[1:-1], interior, thresh)]
        small = np.abs(interior) < thresh
        if small.all():
            flags[name] = np.zeros_like(small)
            continue
        deriv, _ = diff_mirrored(vals, grid.dx)
        dscale = max(float(np.max(np.abs(deriv))), scale / (grid.b - grid.a))
        flags[name] = small & (np.abs(deriv[1:-1]) < tol * dscale)
    return ZeroCensus(
        t=state.t,
        zeros_d1=counts["d1"],
        zeros_d2=counts["d2"],
        zeros_H=counts["H"],
        zero_locations_d2=sorted(locations_d2),
        necks=neck_positions(x, rho),
        multiplicity_flags=flags,
    )


class Violation(NamedTuple):
    quantity: str
    t: float
    before: int
    after: int


def _confirmed(counts):
    """Counts with single-record blips removed.

    A count only takes effect once it persists for two consecutive
    records; the last record has no successor and never raises the count.
    """
    c = np.asarray(counts)
    out = np.minimum(c[:-1], c[1:]) if len(c) > 1 else c.copy()
    return np.append(out, min(c[-1], out[-1])) if len(c) > 1 else out


def monotonicity_report(traj, tol: float = DEFAULT_TOL, censuses=None) -> List[Violation]:
    """Every recorded time at which a censused count strictly increases.

    An empty list certifies the counts nonincreasing at the recording
    resolution.
    """
    if censuses is None:
        censuses = [zero_census(s, tol) for s in traj]
    if len(censuses) < 2:
        return []
    times = [c.t for c in censuses]
    out = []
    for name in CENSUS_FIELDS:
        eff = _confirmed([c.count(name) for c in censuses])
        for j in range(1, len(eff)):
            if eff[j] > eff[j - 1]:
                out.append(Violation(name, times[j], int(eff[j - 1]), int(eff[j])))
    return out


@dataclass
class NeckSeries:
    times: List[float]
    positions: List[float]
    converged: bool = False


@dataclass
class NeckTracking:
    series: List[NeckSeries]
    lost: List[str] = field(default_factory=list)

    @property
    def converged(self) -> List[bool]:
        return [s.converged for s in self.series]


def neck_convergence(traj, censuses=None, cutoff_dx: float = 5.0,
                     converge_dx: float = 3.0) -> NeckTracking:
    """Follow each neck through the recorded censuses.

    Necks are matched to the nearest unclaimed neck of the next census
    within ``cutoff_dx`` grid spacings.  A series is converged when the
    positions in its last quarter span less than ``converge_dx`` spacings.
    Unmatched necks end their series and are listed in ``lost``.
    """
    states = list(traj)
    dx = states[0].profile.grid.dx
    if censuses is None:
        censuses = [zero_census(s) for s in states]
    active: List[NeckSeries] = []
    done: List[NeckSeries] = []
    lost: List[str] = []
    for c in censuses:
        free = list(c.necks)
        still = []
        for s in active:
            if free:
                d = np.abs(np.asarray(free) - s.positions[-1])
                j = int(np.argmin(d))
                if d[j] <= cutoff_dx * dx:
                    s.times.append(c.t)
                    s.positions.append(free.pop(j))
                    still.append(s)
                    continue
            lost.append(f"neck at x={s.positions[-1]:.6g} lost after t={s.times[-1]:.6g}")
            done.append(s)
        for pos in free:
            still.append(NeckSeries([c.t], [pos]))
        active = still
    series = done + active
    for s in series:
        m = max(1, int(np.ceil(len(s.positions) / 4)))
        tail = s.positions[-m:]
        s.converged = (max(tail) - min(tail)) < converge_dx * dx
    series.sort(key=lambda s: s.positions[0])
    return NeckTracking(series, lost)

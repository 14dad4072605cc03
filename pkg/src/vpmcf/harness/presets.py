"""Initial profiles used by the run harness and the verification suites."""

from __future__ import annotations

import numpy as np

from ..profile import GridSpec, RadialProfile
from .output import read_snapshot_csv


def _symmetrized(grid, rho):
    # cos-based data is symmetric about the midpoint; remove the last-bit
    # asymmetry of evaluating it at mirrored nodes.
    rho = np.asarray(rho, dtype=float)
    return RadialProfile(grid, 0.5 * (rho + rho[::-1]))


def cylinder(grid: GridSpec, r: float = 1.0) -> RadialProfile:
    if not r > 0:
        raise ValueError("cylinder radius must be positive")
    return RadialProfile(grid, np.full(grid.N + 1, float(r)))


def perturbed(grid: GridSpec, r: float, amp: float, modes=(1,)) -> RadialProfile:
    """``r + amp * sum_m cos(2 pi m (x - a)/(b - a))``."""
    modes = tuple(int(m) for m in np.atleast_1d(modes))
    if not abs(amp) * len(modes) < r:
        raise ValueError(f"need |amp| * {len(modes)} < r for a positive profile")
    s = (grid.x - grid.a) / (grid.b - grid.a)
    rho = r + amp * sum(np.cos(2 * np.pi * m * s) for m in modes)
    return _symmetrized(grid, rho)


def dumbbell(grid: GridSpec, r: float, amp: float) -> RadialProfile:
    """Bulges at both planes, one neck at the midpoint:
    ``r + amp cos(2 pi (x - a)/(b - a))``."""
    if not 0 < amp < r:
        raise ValueError("dumbbell needs 0 < amp < r")
    return perturbed(grid, r, amp, (1,))


def escalated_amplitude(r: float, amp: float) -> float:
    """Next amplitude to try when a dumbbell fails to pinch: halfway to r."""
    return amp + 0.5 * (r - amp)


def from_file(path, n: int = 2) -> RadialProfile:
    return read_snapshot_csv(path, n=n)


PRESETS = {
    "cylinder": cylinder,
    "perturbed": perturbed,
    "dumbbell": dumbbell,
}

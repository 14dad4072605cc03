"""Surface Laplacian of rotationally symmetric fields and residuals of the
intrinsic evolution equations along a computed flow."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import InsufficientHistory
from .profile import RHO_FLOOR, RadialProfile, curvature_fields, diff_mirrored

QUANTITIES = ("y", "H", "v", "p", "q", "k")


def _as_field(profile: RadialProfile, f) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape != profile.rho.shape:
        raise ValueError(f"field has shape {f.shape}, profile has {profile.rho.shape}")
    return f


def surface_laplacian(profile: RadialProfile, f, rho_floor: float = RHO_FLOOR) -> np.ndarray:
    """Laplace-Beltrami operator of an axially symmetric scalar field.

    In the x1 coordinate::

        Lf = f''/v^2 + f' * ((n-1) rho'/(rho v^2) - rho' rho''/v^4)

    ``f`` is differenced with the same mirrored stencils as ``rho``.
    """
    f = _as_field(profile, f)
    fld = curvature_fields(profile, rho_floor)
    f1, f2 = diff_mirrored(f, profile.grid.dx)
    n = profile.grid.n
    v2 = fld.v * fld.v
    drift = (n - 1) * fld.d1 / (profile.rho * v2) - fld.d1 * fld.d2 / (v2 * v2)
    return f2 / v2 + f1 * drift


def _rhs(quantity, fld, lap, f1, h, n):
    y, v, p, q, k, H, A2 = fld.y, fld.v, fld.p, fld.q, fld.k, fld.H, fld.A2
    if quantity == "y":
        return lap - (n - 1) / y + h * p * y
    if quantity == "H":
        return lap + (H - h) * A2
    if quantity == "v":
        grad_v2 = (f1 / v) ** 2
        return lap - A2 * v + (n - 1) * v / y ** 2 - 2.0 / v * grad_v2
    if quantity == "p":
        return lap + A2 * p + 2.0 * q * q * (k - p) - h * p * p
    if quantity == "q":
        return lap + A2 * q + q * ((n - 1) * p * p + (n - 3) * q * q - 2.0 * k * p) - h * p * q
    if quantity == "k":
        return lap + A2 * k - 2.0 * (n - 1) * q * q * (k - p) - h * k * k
    raise ValueError(f"unknown quantity {quantity!r}; expected one of {QUANTITIES}")


def evolution_residual(traj, quantity: str, index: int | None = None) -> np.ndarray:
    """Pointwise ``|LHS - RHS|`` of one evolution equation at a middle state.

    ``traj`` is a sequence of states (or a :class:`~vpmcf.flow.Trajectory`)
    with at least three entries at equal time spacing.  The residual is
    evaluated at ``traj[index]`` (default: the middle of the first three),
    using a centered difference between its neighbours for the time
    derivative.

    The flow is computed at fixed x1, while the equations follow points
    moving along the normal.  Those points drift in x1 with speed
    ``(H - h) rho'/v``, so the material derivative is
    ``df/dt|_x1 + (H - h) (rho'/v) f'``.

    Returns the residual on interior nodes only (length ``N - 1``).
    """
    states: Sequence = getattr(traj, "states", traj)
    if len(states) < 3:
        raise InsufficientHistory(f"need >= 3 states, got {len(states)}")
    if quantity not in QUANTITIES:
        raise ValueError(f"unknown quantity {quantity!r}; expected one of {QUANTITIES}")
    j = 1 if index is None else index
    if not 1 <= j <= len(states) - 2:
        raise InsufficientHistory(f"index {j} has no neighbour on both sides")
    prev, mid, nxt = states[j - 1], states[j], states[j + 1]
    dt_back = mid.t - prev.t
    dt_fwd = nxt.t - mid.t
    if dt_back <= 0 or abs(dt_fwd - dt_back) > 1e-9 * max(dt_back, dt_fwd):
        raise ValueError("states must be at equal, increasing time spacing")

    def values(state):
        return getattr(state.field, quantity)

    fld = mid.field
    h = mid.forcing
    n = mid.profile.grid.n
    f = values(mid)
    f1, _ = diff_mirrored(f, mid.profile.grid.dx)
    dfdt = (values(nxt) - values(prev)) / (dt_fwd + dt_back)
    material = dfdt + (fld.H - h) * fld.d1 / fld.v * f1
    lap = surface_laplacian(mid.profile, f)
    res = np.abs(material - _rhs(quantity, fld, lap, f1, h, n))
    return res[1:-1]

"""Blow-up rate fitting, region classification and parabolic rescaling."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import EmptyWindow, InsufficientBlowupData, NoInteriorMinimum
from .profile import GridSpec, RadialProfile

TYPE_I = "type_I"
INCONCLUSIVE = "inconclusive"
TYPE_II_SUSPECT = "type_II_suspect"

R2_TYPE_I = 0.99
R2_TYPE_II = 0.95
BEND_LIMIT = 0.1


@dataclass(frozen=True)
class BlowupFit:
    """Affine fit of ``1/max|A|^2 = (T - t)/C`` over the blow-up window.

    ``bend`` is the relative change of slope across the window from a
    quadratic fit; positive means ``1/max|A|^2`` flattens out towards the
    end, i.e. curvature grows faster than ``1/(T - t)``.
    """

    T_est: float
    C_est: float
    r2: float
    window: Tuple[float, float]
    classification: str
    n_points: int
    bend: float

    def report(self) -> str:
        lines = [
            f"T_est = {self.T_est!r}",
            f"C_est = {self.C_est!r}",
            f"r2 = {self.r2!r}",
            f"classification = {self.classification}",
            f"window = {self.window[0]!r} {self.window[1]!r}",
            f"n_points = {self.n_points}",
            f"bend = {self.bend!r}",
        ]
        return "\n".join(lines) + "\n"


def fit_blowup_rate(t, max_A2, min_growth: float = 10.0, min_points: int = 10) -> BlowupFit:
    """Fit the type-I ansatz to a sampled ``max|A|^2`` series.

    Only samples with ``max_A2 > min_growth * max_A2[0]`` enter the fit.
    """
    t = np.asarray(t, dtype=float)
    a2 = np.asarray(max_A2, dtype=float)
    if t.shape != a2.shape or t.ndim != 1:
        raise ValueError("t and max_A2 must be 1-d arrays of equal length")
    mask = np.isfinite(a2) & (a2 > min_growth * a2[0])
    if np.count_nonzero(mask) < min_points:
        raise InsufficientBlowupData(
            f"{np.count_nonzero(mask)} samples exceed {min_growth} x initial max|A|^2, "
            f"need {min_points}")
    tw, u = t[mask], 1.0 / a2[mask]
    slope, intercept = np.polyfit(tw, u, 1)
    pred = slope * tw + intercept
    ss_res = float(np.sum((u - pred) ** 2))
    ss_tot = float(np.sum((u - u.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    span = tw[-1] - tw[0]
    c2, c1, _ = np.polyfit(tw - tw[0], u, 2)
    bend = float(2.0 * c2 * span / abs(c1 + c2 * span)) if span > 0 else 0.0
    C = -1.0 / slope if slope < 0 else np.inf
    T = intercept * C if slope < 0 else np.inf
    if slope < 0 and r2 >= R2_TYPE_I and bend <= BEND_LIMIT:
        label = TYPE_I
    elif r2 < R2_TYPE_II and bend > BEND_LIMIT:
        label = TYPE_II_SUSPECT
    else:
        label = INCONCLUSIVE
    return BlowupFit(T_est=float(T), C_est=float(C), r2=float(r2),
                     window=(float(tw[0]), float(tw[-1])), classification=label,
                     n_points=int(tw.size), bend=bend)


def fit_type1(traj, min_growth: float = 10.0) -> BlowupFit:
    """Type-I rate fit on a recorded trajectory."""
    t = np.array([s.t for s in traj])
    a2 = np.array([float(s.field.A2.max()) for s in traj])
    return fit_blowup_rate(t, a2, min_growth)


def auto_center_alpha(state, alpha_rule: str = "neck"):
    """Default rescaling center (thinnest node) and factor.

    ``alpha_rule="neck"`` gives ``1/min(rho)``; ``"curvature"`` gives
    ``max|A|``.
    """
    rho = state.profile.rho
    i = int(np.argmin(rho))
    center = float(state.profile.grid.x[i])
    if alpha_rule == "neck":
        return center, 1.0 / float(rho[i])
    if alpha_rule == "curvature":
        return center, float(np.sqrt(state.field.A2.max()))
    raise ValueError(f"unknown alpha rule {alpha_rule!r}")


def rescale(state, center_x: float, alpha: float, half_width: Optional[float] = None,
            n_out: Optional[int] = None) -> RadialProfile:
    """Parabolically rescaled profile ``(alpha (x - center), alpha rho)``.

    ``half_width`` limits the window to ``|x~| <= half_width`` (rescaled
    units); by default the whole profile is kept.  The result sits on the
    original nodes inside the window, which already form a uniform grid,
    unless ``n_out`` asks for linear resampling onto ``n_out`` intervals.

    Raises
    ------
    EmptyWindow
        If the window covers fewer than 8 grid intervals.
    """
    profile = getattr(state, "profile", state)
    grid = profile.grid
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if not grid.a <= center_x <= grid.b:
        raise ValueError(f"center {center_x} outside [{grid.a}, {grid.b}]")
    x = grid.x
    xt = alpha * (x - center_x)
    rt = alpha * profile.rho
    if half_width is not None:
        keep = np.abs(xt) <= half_width * (1 + 1e-12)
        xt, rt = xt[keep], rt[keep]
    if xt.size - 1 < 8:
        raise EmptyWindow(f"window holds {max(xt.size - 1, 0)} intervals, need 8")
    if n_out is not None:
        xs = np.linspace(xt[0], xt[-1], n_out + 1)
        rt = np.interp(xs, xt, rt)
        xt = xs
    new_grid = GridSpec(float(xt[0]), float(xt[-1]), xt.size - 1, grid.n)
    return RadialProfile(new_grid, rt, profile.time)


@dataclass(frozen=True)
class TemplateFit:
    cyl_r: float
    cyl_resid: float
    cat_c5: float
    cat_resid: float

    @property
    def best_resid(self) -> float:
        return float(np.nanmin([self.cyl_resid, self.cat_resid]))


def fit_cylinder(profile: RadialProfile):
    rho = profile.rho
    r = float(rho.mean())
    resid = float(np.sqrt(np.mean((rho - r) ** 2)) / rho.min())
    return r, resid


def fit_catenoid(profile: RadialProfile):
    """Least-squares ``c cosh((x - x0)/c)`` with ``x0`` at the profile minimum.

    ``c`` is searched in ``[min/2, 2 min]``.  Returns ``(c, normalized RMS)``.
    """
    rho = profile.rho
    x = profile.grid.x
    i = int(np.argmin(rho))
    rmin = float(rho[i])
    if i == 0 or i == rho.size - 1 or not (rho[0] > rmin and rho[-1] > rmin):
        raise NoInteriorMinimum("profile has no interior minimum")
    s = x - x[i]

    def sse(c):
        return float(np.sum((rho - c * np.cosh(s / c)) ** 2))

    res = minimize_scalar(sse, bounds=(0.5 * rmin, 2.0 * rmin), method="bounded",
                          options={"xatol": 1e-12 * rmin})
    c = float(res.x)
    return c, float(np.sqrt(sse(c) / rho.size) / rmin)


def fit_templates(profile: RadialProfile) -> TemplateFit:
    """Cylinder and catenoid fits; catenoid entries are NaN without an
    interior minimum."""
    cyl_r, cyl_resid = fit_cylinder(profile)
    try:
        c5, cat_resid = fit_catenoid(profile)
    except NoInteriorMinimum:
        c5, cat_resid = float("nan"), float("nan")
    return TemplateFit(cyl_r, cyl_resid, c5, cat_resid)


def flat_threshold(c00: float) -> float:
    """Bound on ``|k|/p`` that separates the flat and sharp regions."""
    return float(np.sqrt(c00 / (2.0 * (c00 - 1.0))))


@dataclass(frozen=True)
class RegionMask:
    """Per-node region labels of one state.

    ``in_breve``: ``H <= c2/2``; ``in_hat``: the rest.  ``in_flat``:
    ``|k|/p <= flat_threshold(c00)``; ``in_sharp``: the rest.
    """

    t: float
    in_breve: np.ndarray
    in_hat: np.ndarray
    in_flat: np.ndarray
    in_sharp: np.ndarray
    c2_obs: float
    c00: float
    threshold: float
    boundary_height_flat: float
    max_k_over_p_Hpos: float
    max_v_sharp: float
    min_y_breve: float

    @property
    def frac_breve(self) -> float:
        return float(self.in_breve.mean())

    @property
    def frac_sharp(self) -> float:
        return float(self.in_sharp.mean())


def classify_regions(state, c2_obs: float, c00: float = 4.0) -> RegionMask:
    """Label nodes by mean curvature level and by ``|k|/p``.

    Equality goes to the closed regions (``in_breve``, ``in_flat``).
    ``boundary_height_flat`` is the least height on either side of a
    flat/sharp interface (NaN without an interface).
    """
    if not c2_obs > 0:
        raise ValueError("c2_obs must be positive")
    if not c00 > 2:
        raise ValueError("c00 must exceed 2")
    fld = state.field
    in_breve = fld.H <= 0.5 * c2_obs
    ratio = np.abs(fld.k) / fld.p
    thr = flat_threshold(c00)
    in_flat = ratio <= thr
    edge = np.flatnonzero(in_flat[1:] != in_flat[:-1])
    if edge.size:
        nodes = np.union1d(edge, edge + 1)
        bh = float(fld.y[nodes].min())
    else:
        bh = float("nan")
    hpos = fld.H >= 0
    in_sharp = ~in_flat
    return RegionMask(
        t=state.t,
        in_breve=in_breve,
        in_hat=~in_breve,
        in_flat=in_flat,
        in_sharp=in_sharp,
        c2_obs=float(c2_obs),
        c00=float(c00),
        threshold=thr,
        boundary_height_flat=bh,
        max_k_over_p_Hpos=float(ratio[hpos].max()) if hpos.any() else float("nan"),
        max_v_sharp=float(fld.v[in_sharp].max()) if in_sharp.any() else float("nan"),
        min_y_breve=float(fld.y[in_breve].min()) if in_breve.any() else float("nan"),
    )

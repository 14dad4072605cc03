"""Discretized generating curve and its pointwise geometry.

The surface is obtained by rotating the graph of ``rho`` over ``[a, b]``
about the x1-axis.  All fields live on the ``N + 1`` nodes of a uniform
grid; the Neumann condition ``rho'(a) = rho'(b) = 0`` is imposed through
mirror ghost nodes ``rho[-1] = rho[1]`` and ``rho[N+1] = rho[N-1]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gamma, pi

import numpy as np

from .errors import AxisContact, OddIntervalCount

RHO_FLOOR = 1e-12


def sphere_area(m: int) -> float:
    """Area of the unit m-sphere in R^(m+1)."""
    return 2.0 * pi ** ((m + 1) / 2.0) / gamma((m + 1) / 2.0)


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid of ``N`` intervals on ``[a, b]`` for an ``n``-surface."""

    a: float
    b: float
    N: int
    n: int = 2

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError(f"need b > a, got a={self.a}, b={self.b}")
        if int(self.N) != self.N or self.N < 8:
            raise ValueError(f"N must be an integer >= 8, got {self.N}")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))

    @property
    def dx(self) -> float:
        return (self.b - self.a) / self.N

    @property
    def x(self) -> np.ndarray:
        # i*dx + a rather than linspace: node i and node N-i then sit at
        # mirror-exact offsets from the two ends.
        return self.a + self.dx * np.arange(self.N + 1)

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.a + self.b)

    def scaled(self, alpha: float) -> "GridSpec":
        return GridSpec(alpha * self.a, alpha * self.b, self.N, self.n)


@dataclass(frozen=True)
class RadialProfile:
    """Sampled radius function ``rho`` on a :class:`GridSpec`."""

    grid: GridSpec
    rho: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        rho = np.array(self.rho, dtype=float)
        if rho.shape != (self.grid.N + 1,):
            raise ValueError(
                f"rho has shape {rho.shape}, expected ({self.grid.N + 1},)")
        if self.time < 0:
            raise ValueError("time must be >= 0")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    @classmethod
    def from_function(cls, grid: GridSpec, func, time: float = 0.0):
        return cls(grid, func(grid.x), time)

    def with_rho(self, rho, time=None) -> "RadialProfile":
        return RadialProfile(self.grid, rho, self.time if time is None else time)


@dataclass(frozen=True)
class CurvatureField:
    """Per-node geometric quantities of a radial profile.

    ``p`` is the principal curvature of multiplicity ``n - 1`` (rotation
    directions), ``k`` the one along the profile, ``q`` the signed
    companion with ``p**2 + q**2 = 1/y**2``.
    """

    d1: np.ndarray
    d2: np.ndarray
    y: np.ndarray
    v: np.ndarray
    p: np.ndarray
    q: np.ndarray
    k: np.ndarray
    H: np.ndarray
    A2: np.ndarray
    C3: np.ndarray
    n: int = field(default=2)

    def as_columns(self) -> dict:
        return {name: getattr(self, name)
                for name in ("d1", "d2", "y", "v", "p", "q", "k", "H", "A2")}


def _extend(values: np.ndarray) -> np.ndarray:
    """Pad with mirror ghost nodes."""
    return np.concatenate(([values[1]], values, [values[-2]]))


def diff_mirrored(values, dx: float):
    """Centered first and second differences with mirror ghosts."""
    ext = _extend(np.asarray(values, dtype=float))
    d1 = (ext[2:] - ext[:-2]) / (2.0 * dx)
    d2 = (ext[2:] - 2.0 * ext[1:-1] + ext[:-2]) / (dx * dx)
    return d1, d2


def derivatives(profile: RadialProfile):
    """Return ``(rho', rho'')`` on every node.

    Endpoint values use the mirror ghosts, so ``d1[0] == d1[N] == 0``
    exactly.
    """
    return diff_mirrored(profile.rho, profile.grid.dx)


def curvature_fields(profile: RadialProfile, rho_floor: float = RHO_FLOOR) -> CurvatureField:
    """Compute ``v, p, q, k, H, |A|^2`` and the cubic invariant on each node.

    Raises
    ------
    AxisContact
        If any ``rho[i] <= rho_floor``.
    """
    rho = profile.rho
    if not np.all(rho > rho_floor):
        i = int(np.argmin(rho))
        raise AxisContact(f"rho[{i}] = {rho[i]:.3e} <= floor {rho_floor:.1e}")
    n = profile.grid.n
    d1, d2 = derivatives(profile)
    w = 1.0 + d1 * d1
    v = np.sqrt(w)
    p = 1.0 / (rho * v)
    q = -d1 / (rho * v)
    k = -d2 / (w * v)
    H = k + (n - 1) * p
    A2 = k * k + (n - 1) * p * p
    C3 = k ** 3 + (n - 1) * p ** 3
    return CurvatureField(d1=d1, d2=d2, y=rho.copy(), v=v, p=p, q=q, k=k,
                          H=H, A2=A2, C3=C3, n=n)


def simpson_weights(N: int, dx: float) -> np.ndarray:
    """Composite Simpson weights for ``N`` (even) intervals of width ``dx``."""
    if N % 2:
        raise OddIntervalCount(f"Simpson quadrature needs even N, got N={N}")
    w = np.full(N + 1, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return w * (dx / 3.0)


def integrate(values, grid: GridSpec) -> float:
    return float(simpson_weights(grid.N, grid.dx) @ np.asarray(values, dtype=float))


def enclosed_volume(profile: RadialProfile) -> float:
    """Volume of the solid of revolution, ``(|S^(n-1)|/n) * int rho^n dx``."""
    n = profile.grid.n
    return sphere_area(n - 1) / n * integrate(profile.rho ** n, profile.grid)


def surface_area(profile: RadialProfile) -> float:
    """Lateral area ``|S^(n-1)| * int rho^(n-1) sqrt(1 + rho'^2) dx``."""
    n = profile.grid.n
    d1, _ = derivatives(profile)
    return sphere_area(n - 1) * integrate(profile.rho ** (n - 1) * np.sqrt(1.0 + d1 * d1),
                                          profile.grid)


def averaged_mean_curvature(field: CurvatureField, profile: RadialProfile) -> float:
    """Area-weighted mean of ``H`` over the surface."""
    weight = profile.rho ** (profile.grid.n - 1) * field.v
    return integrate(field.H * weight, profile.grid) / integrate(weight, profile.grid)

"""Time integration of (volume preserving) mean curvature flow of a profile.

The evolved equation is

    rho_t = rho''/(1 + rho'^2) - (n - 1)/rho + h sqrt(1 + rho'^2)

with ``h`` the area-averaged mean curvature (``h = 0`` for plain mean
curvature flow).  Space is discretized by centered differences with mirror
ghosts, time by classical RK4 under a diffusion/reaction step limit.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import List, Optional

import numpy as np

from . import _kernels as K
from .errors import AxisContact
from .profile import (RHO_FLOOR, CurvatureField, RadialProfile,
                      averaged_mean_curvature, curvature_fields, derivatives,
                      enclosed_volume, simpson_weights, sphere_area)


class Mode(str, Enum):
    VOLUME_PRESERVING = "volume_preserving"
    PLAIN_MCF = "plain_mcf"


class Status(str, Enum):
    RUNNING = "running"
    REACHED_T_END = "reached_t_end"
    AXIS_CONTACT = "axis_contact"
    CURVATURE_BLOWUP = "curvature_blowup"
    STEP_UNDERFLOW = "step_underflow"

    @property
    def singular(self) -> bool:
        return self in (Status.AXIS_CONTACT, Status.CURVATURE_BLOWUP,
                        Status.STEP_UNDERFLOW)


_STATUS_CODES = {
    K.RUNNING: Status.RUNNING,
    K.REACHED_T_END: Status.REACHED_T_END,
    K.AXIS_CONTACT: Status.AXIS_CONTACT,
    K.CURVATURE_BLOWUP: Status.CURVATURE_BLOWUP,
    K.STEP_UNDERFLOW: Status.STEP_UNDERFLOW,
}


@dataclass(frozen=True)
class FlowConfig:
    """Integration settings.

    ``stop_rho_min`` and ``stop_A2_max`` default to ``1e-3 * min(rho0)``
    and ``1e8 * max(|A|^2 at t=0)``; they are resolved against the
    initial profile by :func:`initial_state`.

    States are recorded every ``output_every`` steps.  With
    ``record_rho_factor`` set, a state is also recorded whenever
    ``min(rho)`` falls below that factor times its value at the previous
    record, which samples a pinching neck evenly in ``log(rho_min)``.
    """

    t_end: float = 1.0
    mode: Mode = Mode.VOLUME_PRESERVING
    dt_safety: float = 0.2
    stop_rho_min: Optional[float] = None
    stop_A2_max: Optional[float] = None
    volume_projection: bool = True
    output_every: int = 100
    rho_floor: float = RHO_FLOOR
    vol_tol: float = 1e-6
    record_rho_factor: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if not 0 < self.dt_safety <= 1:
            raise ValueError("dt_safety must lie in (0, 1]")
        for name in ("stop_rho_min", "stop_A2_max"):
            val = getattr(self, name)
            if val is not None and not val > 0:
                raise ValueError(f"{name} must be positive")
        if int(self.output_every) != self.output_every or self.output_every < 1:
            raise ValueError("output_every must be a positive integer")
        if self.record_rho_factor is not None and not 0 < self.record_rho_factor < 1:
            raise ValueError("record_rho_factor must lie in (0, 1)")

    @property
    def volume_preserving(self) -> bool:
        return self.mode is Mode.VOLUME_PRESERVING


@dataclass(frozen=True)
class FlowState:
    """Profile at one instant together with its geometry.

    ``h`` is the averaged mean curvature of the surface; ``forcing`` is
    the value that enters the flow (``h`` in volume preserving mode, 0
    for plain mean curvature flow).
    """

    profile: RadialProfile
    field: CurvatureField
    h: float
    t: float
    V0: float
    config: FlowConfig
    status: Status = Status.RUNNING
    dt_last: float = 0.0

    @property
    def forcing(self) -> float:
        return self.h if self.config.volume_preserving else 0.0

    @property
    def grid(self):
        return self.profile.grid

    @property
    def rho(self):
        return self.profile.rho


@dataclass
class Trajectory:
    """Recorded states of one run, oldest first."""

    states: List[FlowState]
    config: FlowConfig
    steps: int = 0

    @property
    def status(self) -> Status:
        return self.states[-1].status

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    @property
    def grid(self):
        return self.states[0].grid

    @property
    def final(self) -> FlowState:
        return self.states[-1]

    def __len__(self):
        return len(self.states)

    def __getitem__(self, i):
        return self.states[i]

    def __iter__(self):
        return iter(self.states)


def _resolve_config(profile: RadialProfile, config: FlowConfig, field: CurvatureField) -> FlowConfig:
    changes = {}
    if config.stop_rho_min is None:
        changes["stop_rho_min"] = 1e-3 * float(profile.rho.min())
    if config.stop_A2_max is None:
        changes["stop_A2_max"] = 1e8 * float(field.A2.max())
    return replace(config, **changes) if changes else config


def make_state(profile: RadialProfile, config: FlowConfig, V0: float,
               status: Status = Status.RUNNING, dt_last: float = 0.0) -> FlowState:
    fld = curvature_fields(profile, config.rho_floor)
    h = averaged_mean_curvature(fld, profile)
    return FlowState(profile=profile, field=fld, h=h, t=profile.time, V0=V0,
                     config=config, status=status, dt_last=dt_last)


def initial_state(profile: RadialProfile, config: FlowConfig) -> FlowState:
    """Wrap an initial profile; fixes the target volume and stop thresholds."""
    fld = curvature_fields(profile, config.rho_floor)
    config = _resolve_config(profile, config, fld)
    return make_state(profile, config, enclosed_volume(profile))


def _kernel_args(grid):
    return grid.dx, grid.n, simpson_weights(grid.N, grid.dx), sphere_area(grid.n - 1)


def stage_derivative(profile: RadialProfile, mode=Mode.VOLUME_PRESERVING) -> np.ndarray:
    """Right-hand side ``d rho/dt`` of the semi-discrete system."""
    dx, n, w, _ = _kernel_args(profile.grid)
    out = np.empty_like(profile.rho)
    K.rhs(np.array(profile.rho), dx, n, w, Mode(mode) is Mode.VOLUME_PRESERVING, out,
          np.empty_like(out))
    return out


def step(state: FlowState, dt: float) -> FlowState:
    """Advance one RK4 step of size ``dt``.

    Singular outcomes are reported through ``status`` of the returned
    state, which then keeps the last valid profile.
    """
    if state.status is not Status.RUNNING:
        raise ValueError(f"cannot step a state with status {state.status.value}")
    if not dt > 0:
        raise ValueError("dt must be positive")
    cfg = state.config
    grid = state.grid
    dx, n, w, omega = _kernel_args(grid)
    rho = np.array(state.rho)
    out = np.empty_like(rho)
    code = K.rk4(rho, dt, dx, n, w, cfg.volume_preserving, cfg.rho_floor, out)
    if code:
        return replace(state, status=_STATUS_CODES[code])
    if cfg.volume_preserving and cfg.volume_projection:
        K.project(out, state.V0, n, w, omega)
    profile = state.profile.with_rho(out, time=state.t + dt)
    try:
        return make_state(profile, cfg, state.V0, dt_last=dt)
    except AxisContact:
        return replace(state, status=Status.AXIS_CONTACT)


def adaptive_dt(state: FlowState) -> float:
    """Stable step size for the current state.

    ``dt_safety * min(dx^2 min(1 + rho'^2)/2, min(rho)^2/(4(n-1)))``, cut
    to the time left before ``t_end``.  The first term is the explicit
    diffusion limit, the second resolves the ``-(n-1)/rho`` reaction near
    pinch-off.
    """
    cfg = state.config
    grid = state.grid
    d1, _ = derivatives(state.profile)
    diffusion = grid.dx ** 2 * float(np.min(1.0 + d1 * d1)) / 2.0
    reaction = float(state.rho.min()) ** 2 / (4.0 * (grid.n - 1))
    return min(cfg.dt_safety * min(diffusion, reaction), cfg.t_end - state.t)


def run(initial: RadialProfile, config: FlowConfig, max_steps: int = 10**9) -> Trajectory:
    """Integrate until ``t_end`` or the first singular event.

    States are recorded every ``config.output_every`` steps, plus the
    initial and final ones.
    """
    state = initial_state(initial, config)
    cfg = state.config
    grid = initial.grid
    dx, n, w, omega = _kernel_args(grid)
    rho = np.array(initial.rho)
    t = initial.time
    states = [state]
    total = 0
    status = Status.RUNNING
    factor = cfg.record_rho_factor or 0.0
    pending = 0
    while status is Status.RUNNING and total < max_steps:
        chunk = min(cfg.output_every - pending, max_steps - total)
        t, code, taken, dt_last = K.advance(
            rho, t, cfg.t_end, chunk, dx, n, w, cfg.volume_preserving,
            cfg.volume_projection, state.V0, omega, cfg.dt_safety, cfg.rho_floor,
            cfg.stop_rho_min, cfg.stop_A2_max, factor * float(rho.min()))
        total += taken
        pending = (pending + taken) % cfg.output_every if factor else 0
        status = _STATUS_CODES[code]
        if taken == 0 and status is not Status.RUNNING:
            states[-1] = replace(states[-1], status=status)
            break
        profile = RadialProfile(grid, rho.copy(), t)
        try:
            states.append(make_state(profile, cfg, state.V0, status, dt_last))
        except AxisContact:
            states[-1] = replace(states[-1], status=Status.AXIS_CONTACT)
            status = Status.AXIS_CONTACT
    return Trajectory(states=states, config=cfg, steps=total)

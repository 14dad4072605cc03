"""``key = value`` run configuration files."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple

from ..errors import ConfigError
from ..flow import FlowConfig, Mode
from ..profile import RHO_FLOOR, GridSpec, RadialProfile
from . import presets

MONITOR_NAMES = ("volume", "area", "h_positive", "vy_bound", "k_over_p", "min_H",
                 "breve_height", "sturm", "sharp_v")

_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


def _bool(text):
    low = text.lower()
    if low in _TRUE:
        return True
    if low in _FALSE:
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _optional_float(text):
    return None if text.lower() in ("none", "auto", "") else float(text)


def _monitors(text):
    low = text.strip().lower()
    if low == "all":
        return MONITOR_NAMES
    if low == "none":
        return ()
    names = tuple(s.strip() for s in text.split(",") if s.strip())
    bad = [m for m in names if m not in MONITOR_NAMES]
    if bad:
        raise ValueError(f"unknown monitor(s) {', '.join(bad)}")
    return names


_PARSERS = {
    "a": float,
    "b": float,
    "N": int,
    "n": int,
    "mode": lambda s: Mode(s.strip()),
    "dt_safety": float,
    "t_end": float,
    "stop_rho_min": _optional_float,
    "stop_A2_max": _optional_float,
    "volume_projection": _bool,
    "output_every": int,
    "record_rho_factor": _optional_float,
    "rho_floor": float,
    "vol_tol": float,
    "initial": str,
    "monitors": _monitors,
    "census_tol": float,
    "c00": float,
    "out_dir": str,
    "svg": _bool,
}

_CALL = re.compile(r"^\s*(\w+)\s*\((.*)\)\s*$")


@dataclass(frozen=True)
class InitialSpec:
    """Parsed ``initial = name(args...)`` entry."""

    kind: str
    args: Tuple = ()

    def build(self, grid: GridSpec, base_dir: Optional[Path] = None) -> RadialProfile:
        if self.kind == "from_file":
            path = Path(self.args[0])
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            prof = presets.from_file(path, n=grid.n)
            if (prof.grid.N, prof.grid.a, prof.grid.b) != (grid.N, grid.a, grid.b):
                raise ValueError(f"{path}: grid does not match a, b, N of the config")
            return prof
        if self.kind == "perturbed":
            r, amp, *modes = self.args
            return presets.perturbed(grid, r, amp, tuple(int(m) for m in modes) or (1,))
        return presets.PRESETS[self.kind](grid, *self.args)

    def __str__(self):
        return f"{self.kind}({', '.join(str(a) for a in self.args)})"


def parse_initial(text: str) -> InitialSpec:
    m = _CALL.match(text)
    if not m:
        raise ValueError(f"expected name(args), got {text!r}")
    kind, inner = m.group(1), m.group(2).strip()
    parts = [p.strip() for p in inner.split(",")] if inner else []
    if kind == "from_file":
        if len(parts) != 1:
            raise ValueError("from_file takes one path")
        return InitialSpec(kind, (parts[0].strip("'\""),))
    if kind not in presets.PRESETS:
        raise ValueError(f"unknown initial profile {kind!r}")
    args = tuple(float(p) for p in parts)
    need = {"cylinder": (0, 1), "dumbbell": (2, 2), "perturbed": (2, 99)}[kind]
    if not need[0] <= len(args) <= need[1]:
        raise ValueError(f"{kind} got {len(args)} arguments")
    return InitialSpec(kind, args)


@dataclass(frozen=True)
class SimConfig:
    """Everything a run needs: grid, flow settings, initial data, analysis."""

    grid: GridSpec
    flow: FlowConfig
    initial: InitialSpec
    monitors: Tuple[str, ...] = MONITOR_NAMES
    census_tol: float = 1e-8
    c00: float = 4.0
    out_dir: str = "out"
    svg: bool = False
    base_dir: Optional[Path] = field(default=None, compare=False)

    def initial_profile(self) -> RadialProfile:
        return self.initial.build(self.grid, self.base_dir)

    def output_dir(self) -> Path:
        """``out_dir``, overridden by the ``VPMCF_OUT`` environment variable."""
        env = os.environ.get("VPMCF_OUT")
        path = Path(env) if env else Path(self.out_dir)
        if not path.is_absolute() and self.base_dir is not None and not env:
            path = self.base_dir / path
        return path


_DEFAULTS = {"a": 0.0, "b": 1.0, "N": 200, "n": 2}


def parse_config(text: str, base_dir: Optional[Path] = None) -> SimConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment.

    Raises
    ------
    ConfigError
        On unknown or repeated keys, bad values, or a missing ``initial``.
    """
    raw = {}
    lines = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in raw:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        try:
            raw[key] = (parse_initial(value) if key == "initial" else _PARSERS[key](value))
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}", lineno) from None
        lines[key] = lineno

    def build(keys, fn):
        try:
            return fn()
        except ValueError as exc:
            first = min((lines[k] for k in keys if k in lines), default=None)
            raise ConfigError(str(exc), first) from None

    if "initial" not in raw:
        raise ConfigError("missing required key 'initial'")
    g = {k: raw.get(k, d) for k, d in _DEFAULTS.items()}
    grid = build(_DEFAULTS, lambda: GridSpec(g["a"], g["b"], g["N"], g["n"]))
    flow_keys = ("t_end", "mode", "dt_safety", "stop_rho_min", "stop_A2_max",
                 "volume_projection", "output_every", "rho_floor", "vol_tol",
                 "record_rho_factor")
    flow_kw = {k: raw[k] for k in flow_keys if k in raw}
    flow_kw.setdefault("rho_floor", RHO_FLOOR)
    flow = build(flow_keys, lambda: FlowConfig(**flow_kw))
    c00 = raw.get("c00", 4.0)
    if not c00 > 2:
        raise ConfigError("c00 must exceed 2", lines["c00"])
    census_tol = raw.get("census_tol", 1e-8)
    if not census_tol >= 0:
        raise ConfigError("census_tol must be >= 0", lines["census_tol"])
    return SimConfig(grid=grid, flow=flow, initial=raw["initial"],
                     monitors=raw.get("monitors", MONITOR_NAMES), census_tol=census_tol,
                     c00=c00, out_dir=raw.get("out_dir", "out"), svg=raw.get("svg", False),
                     base_dir=base_dir)


def load_config(path) -> SimConfig:
    path = Path(path)
    return parse_config(path.read_text(), base_dir=path.parent)

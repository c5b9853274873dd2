"""Experiment specs: unit-suffixed JSON configs and the running-example defaults."""
from __future__ import annotations

import dataclasses
import json
import re
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from .errors import ConfigError
from .model import SystemParams
from .simulator import SimConfig

# REQ length that puts omega_{-1} at 318us for the running example with the
# exact attempt probability; see stability.derive_req_len.
PINNED_REQ_LEN = 2.5295859677258377e-06

RUNNING_EXAMPLE = SystemParams(
    n_onus=512,
    tau_a=60.0,
    tau_f=30.0,
    cycle=0.5,
    req_len=PINNED_REQ_LEN,
    max_wait=350e-6,
    one_trip=100e-6,
)

KINDS = ("analyze", "sweep_omega", "sweep_h", "simulate", "fig6", "fig7", "fig8", "fig9", "fig11")
SWEEP_KINDS = {"sweep_omega", "sweep_h", "fig6", "fig8", "fig9", "fig11"}
SIM_KINDS = {"simulate", "fig7", "fig11"}
TIME_FIELDS = ("tau_a", "tau_f", "cycle", "req_len", "max_wait", "one_trip")

_UNITS = {"s": 1.0, "ms": 1e-3, "us": 1e-6, "µs": 1e-6, "μs": 1e-6, "ns": 1e-9}
_TIME_RE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([a-zA-Zµμ]*)\s*$")


def parse_time(value: Any) -> float:
    """Seconds from a number or a string such as ``"350us"``, ``"500ms"``, ``"60s"``."""
    if isinstance(value, bool):
        raise ConfigError(f"not a time: {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    m = _TIME_RE.match(str(value))
    if not m:
        raise ConfigError(f"cannot parse time {value!r}")
    number, unit = m.groups()
    unit = unit or "s"
    if unit not in _UNITS:
        raise ConfigError(f"unknown time unit {unit!r} in {value!r}")
    return float(number) * _UNITS[unit]


@dataclass(frozen=True)
class Sweep:
    start: float
    stop: float
    points: int
    scale: str = "linear"

    def values(self) -> list[float]:
        if self.points == 1:
            return [self.start]
        if self.scale == "log":
            return [float(v) for v in np.geomspace(self.start, self.stop, self.points)]
        return [float(v) for v in np.linspace(self.start, self.stop, self.points)]


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str
    params: SystemParams
    sweep: Optional[Sweep] = None
    sim: Optional[SimConfig] = None
    output_path: str = ""
    exact_h: bool = True
    options: dict = dataclasses.field(default_factory=dict)


# presets fill whatever the config leaves out
DEFAULT_SWEEPS = {
    "sweep_omega": Sweep(10e-6, 800e-6, 80),
    "fig6": Sweep(10e-6, 800e-6, 400),
    "sweep_h": Sweep(1e-3, 0.135, 100),
    "fig8": Sweep(1e-3, 0.135, 200),
    "fig9": Sweep(1e-3, 0.135, 200),
    "fig11": Sweep(317.8e-6, 800e-6, 6),
}
DEFAULT_SIM = {"simulate": 10_000, "fig7": 5_000, "fig11": 20_000}


def _time_or_number(value: Any, kind: str) -> float:
    # h sweeps are dimensionless; everything else is a time
    if kind in ("sweep_h", "fig8", "fig9"):
        try:
            return float(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"not a number: {value!r}") from exc
    return parse_time(value)


def params_from_dict(data: dict, base: SystemParams = RUNNING_EXAMPLE) -> SystemParams:
    known = {f.name for f in dataclasses.fields(SystemParams)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
    changes: dict[str, Any] = {}
    for key, value in data.items():
        if key == "n_onus":
            if isinstance(value, bool) or int(value) != float(value):
                raise ConfigError(f"n_onus must be an integer, got {value!r}")
            changes[key] = int(value)
        else:
            changes[key] = parse_time(value)
    return dataclasses.replace(base, **changes)


def spec_from_dict(data: dict, kind: Optional[str] = None) -> ExperimentSpec:
    if not isinstance(data, dict):
        raise ConfigError("experiment config must be a JSON object")
    kind = (kind or data.get("kind") or "").replace("-", "_")
    if kind not in KINDS:
        raise ConfigError(f"unknown experiment kind {kind!r}")
    params = params_from_dict(data.get("params", {}))

    h_mode = data.get("h_mode", "exact")
    if h_mode not in ("exact", "approx"):
        raise ConfigError(f"h_mode must be 'exact' or 'approx', got {h_mode!r}")

    sweep = None
    if kind in SWEEP_KINDS:
        raw = data.get("sweep")
        default = DEFAULT_SWEEPS[kind]
        if raw is None:
            sweep = default
        else:
            scale = raw.get("scale", "linear")
            if scale not in ("linear", "log"):
                raise ConfigError(f"sweep scale must be linear or log, got {scale!r}")
            sweep = Sweep(
                _time_or_number(raw.get("start", default.start), kind),
                _time_or_number(raw.get("stop", default.stop), kind),
                int(raw.get("points", default.points)),
                scale,
            )
            if sweep.points < 1:
                raise ConfigError("sweep points must be >= 1")

    sim = None
    if kind in SIM_KINDS:
        raw = dict(data.get("sim", {}))
        known = {"init_fraction_r", "n_cycles", "burn_in_cycles", "seed", "replications"}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown sim field(s): {', '.join(sorted(unknown))}")
        raw.setdefault("n_cycles", DEFAULT_SIM[kind])
        sim = SimConfig(params=params, **raw)

    return ExperimentSpec(
        kind=kind,
        params=params,
        sweep=sweep,
        sim=sim,
        output_path=str(data.get("output_path", "")),
        exact_h=h_mode == "exact",
        options=dict(data.get("options", {})),
    )


def load_spec(path: str, kind: Optional[str] = None) -> ExperimentSpec:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    return spec_from_dict(data, kind)

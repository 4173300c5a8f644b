"""YAML experiment configs: flat keys, list-valued ``sweep.<key>`` entries, unknown keys rejected."""
from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from ehaoi.harness.trace import EventLog, Update
from ehaoi.model import START_STATE, ModelParams, SystemState, is_valid_state


class ConfigError(ValueError):
    """Invalid or unreadable configuration; the message names the offending key."""


PARAM_KEYS = ("pe", "ps", "p01", "p10", "e_max", "d_max0", "d_max1", "gamma")
SWEEP_KEYS = PARAM_KEYS + ("p01_p10",)
INT_KEYS = {"e_max", "d_max0", "d_max1", "seed", "episodes", "horizon"}
MAX_SWEEP_AXES = 2


@dataclass(frozen=True)
class ExperimentConfig:
    # baseline: Pz = [[0.9, 0.1], [0.2, 0.8]], ps = pe = 0.8, five-unit buffer
    pe: float = 0.8
    ps: float = 0.8
    p01: float = 0.1
    p10: float = 0.2
    e_max: int = 5
    d_max0: int = 10
    d_max1: int = 10
    gamma: float = 0.99
    tol: float | None = None
    seed: int = 0
    episodes: int = 10_000
    horizon: int = 1200
    start_state: SystemState = START_STATE
    sweep: dict[str, list] = field(default_factory=dict)

    def params(self, **overrides) -> ModelParams:
        values = {k: getattr(self, k) for k in PARAM_KEYS}
        values.update(overrides)
        return ModelParams(**values)

    def grid(self) -> list[dict[str, Any]]:
        """Parameter overrides for every grid point, first axis slowest."""
        axes = []
        for key, values in self.sweep.items():
            if key == "p01_p10":
                axes.append([{"p01": a, "p10": b} for a, b in values])
            else:
                axes.append([{key: v} for v in values])
        points = []
        for combo in itertools.product(*axes):
            point: dict[str, Any] = {}
            for part in combo:
                point.update(part)
            points.append(point)
        return points

    def swept_columns(self) -> list[str]:
        cols: list[str] = []
        for key in self.sweep:
            cols.extend(("p01", "p10") if key == "p01_p10" else (key,))
        return cols


def _as_number(key: str, value: Any) -> float | int:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    if key.split(".")[-1] in INT_KEYS:
        if int(value) != value:
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        return int(value)
    return float(value)


def _check_param(key: str, name: str, value: Any, base: dict[str, Any]) -> None:
    try:
        ModelParams(**{**base, name: value})
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from None


def read_mapping(path: str | Path) -> dict[str, Any]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file {path} is not valid YAML: {exc}") from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a key-value mapping")
    return data


def parse_config(data: dict[str, Any]) -> ExperimentConfig:
    known = {f.name for f in dataclasses.fields(ExperimentConfig)} - {"sweep"}
    values: dict[str, Any] = {}
    sweep_raw: dict[str, Any] = {}
    flat: dict[str, Any] = {}
    for key, value in data.items():
        if key == "sweep" and isinstance(value, dict):
            flat.update({f"sweep.{axis}": v for axis, v in value.items()})
        else:
            flat[str(key)] = value
    for key, value in flat.items():
        if key.startswith("sweep."):
            axis = key[len("sweep."):]
            if axis not in SWEEP_KEYS:
                raise ConfigError(f"{key}: unknown sweep axis (allowed: {', '.join(SWEEP_KEYS)})")
            sweep_raw[axis] = value
        elif key not in known:
            raise ConfigError(f"{key}: unknown config key")
        elif key == "start_state":
            values[key] = _parse_state(value)
        elif key == "tol":
            tol = None if value is None else _as_number(key, value)
            if tol is not None and tol <= 0:
                raise ConfigError(f"tol: must be positive, got {value!r}")
            values[key] = tol
        else:
            values[key] = _as_number(key, value)

    for key in ("episodes", "horizon"):
        minimum = 2 if key == "episodes" else 1
        if key in values and values[key] < minimum:
            raise ConfigError(f"{key}: must be >= {minimum}, got {values[key]}")

    cfg = ExperimentConfig(**values)
    base = {k: getattr(cfg, k) for k in PARAM_KEYS}
    for name in PARAM_KEYS:
        _check_param(name, name, base[name], base)

    if len(sweep_raw) > MAX_SWEEP_AXES:
        raise ConfigError(f"sweep: at most {MAX_SWEEP_AXES} axes per run, got {len(sweep_raw)}")
    if "p01_p10" in sweep_raw and ({"p01", "p10"} & sweep_raw.keys()):
        raise ConfigError("sweep.p01_p10: cannot be combined with sweep.p01 or sweep.p10")
    sweep: dict[str, list] = {}
    for axis, raw in sweep_raw.items():
        key = f"sweep.{axis}"
        if not isinstance(raw, list) or not raw:
            raise ConfigError(f"{key}: expected a non-empty list")
        if axis == "p01_p10":
            pairs = []
            for item in raw:
                if not isinstance(item, list) or len(item) != 2:
                    raise ConfigError(f"{key}: expected [p01, p10] pairs, got {item!r}")
                a, b = (_as_number(key, v) for v in item)
                _check_param(key, "p01", a, base)
                _check_param(key, "p10", b, base)
                pairs.append((a, b))
            sweep[axis] = pairs
        else:
            vals = [_as_number(key, v) for v in raw]
            for v in vals:
                _check_param(key, axis, v, base)
            sweep[axis] = vals

    cfg = dataclasses.replace(cfg, sweep=sweep)
    for point in cfg.grid() or [{}]:
        if not is_valid_state(cfg.start_state, cfg.params(**point)):
            raise ConfigError(f"start_state: {list(cfg.start_state)} outside the state space at {point}")
    return cfg


def _parse_state(value: Any) -> SystemState:
    if not isinstance(value, list) or len(value) != 5:
        raise ConfigError(f"start_state: expected [z, zd, e, d0, d1], got {value!r}")
    if any(isinstance(v, bool) or not isinstance(v, int) for v in value):
        raise ConfigError(f"start_state: entries must be integers, got {value!r}")
    state = SystemState(*value)
    if state.z not in (0, 1) or state.zd not in (0, 1) or min(state) < 0:
        raise ConfigError(f"start_state: invalid state {value!r}")
    return state


def load_config(path: str | Path) -> ExperimentConfig:
    return parse_config(read_mapping(path))


TRACE_KEYS = ("changes", "updates", "horizon", "d_max0", "d_max1", "initial_state")


def parse_event_log(data: dict[str, Any]) -> EventLog:
    for key in data:
        if key not in TRACE_KEYS:
            raise ConfigError(f"{key}: unknown trace key (allowed: {', '.join(TRACE_KEYS)})")
    if "horizon" not in data:
        raise ConfigError("horizon: required for trace")
    changes = data.get("changes", [])
    if not isinstance(changes, list) or any(isinstance(t, bool) or not isinstance(t, int) for t in changes):
        raise ConfigError(f"changes: expected a list of integer slots, got {changes!r}")
    updates = []
    for item in data.get("updates", []):
        if (
            not isinstance(item, list)
            or len(item) != 3
            or any(isinstance(v, bool) or not isinstance(v, int) for v in item)
        ):
            raise ConfigError(f"updates: expected [generated, delivered, state] integer triples, got {item!r}")
        updates.append(Update(*item))
    kwargs = {}
    for key in ("horizon", "d_max0", "d_max1", "initial_state"):
        if key in data:
            v = data[key]
            if isinstance(v, bool) or not isinstance(v, int):
                raise ConfigError(f"{key}: expected an integer, got {v!r}")
            kwargs[key] = v
    try:
        return EventLog(changes=tuple(changes), updates=tuple(updates), **kwargs)
    except ValueError as exc:
        raise ConfigError(f"event log: {exc}") from None


def load_event_log(path: str | Path) -> EventLog:
    return parse_event_log(read_mapping(path))

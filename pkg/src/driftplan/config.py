"""Run configuration files (JSON).

Lengths are kilometres and angles degrees in the file; conversion to
the planner's SI units happens here.  Every key is optional except
``n_select``; unknown keys are rejected so typos cannot silently fall
back to defaults.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .bnb import SearchConfig
from .errors import ConfigError
from .orbital import OrbitalElements
from .planner import PlannerConfig
from .units import KM, deg_to_rad

_START_KEYS = {"a_km", "e", "i_deg", "raan_deg"}
_KEYS = {
    "n_select", "t_max_days", "t_deorb_days", "altitude_bounds_km",
    "dv_max", "per_debris_cost", "t_cap_init_days", "alpha_half_width_km",
    "date_half_width_days", "shrink_factor", "max_iterations", "cost_tol",
    "slack_tol_days", "order_sep_days", "refine", "refine_max_sweeps",
    "strategy", "branch_rule", "max_nodes", "start_orbit",
}


@dataclass(frozen=True)
class RunConfig:
    """Everything a planning run needs besides the catalog."""

    n_select: int
    planner: PlannerConfig
    search: SearchConfig
    start: OrbitalElements | None = None


def _number(raw: dict, key: str, default: float) -> float:
    value = raw.get(key, default)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"key {key!r} must be a number, got {value!r}")
    return float(value)


def _parse_start(value: object) -> OrbitalElements | None:
    if value is None:
        return None
    if not isinstance(value, dict) or set(value) != _START_KEYS:
        raise ConfigError(
            "key 'start_orbit' must be null or an object with keys "
            f"{sorted(_START_KEYS)}")
    try:
        return OrbitalElements(
            float(value["a_km"]) * KM, float(value["e"]),
            deg_to_rad(float(value["i_deg"])),
            deg_to_rad(float(value["raan_deg"])))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"key 'start_orbit': {exc}") from exc


def load_config(path: str | Path) -> RunConfig:
    """Read and validate a run configuration.

    Raises:
        ConfigError: unreadable file, bad JSON, unknown or ill-typed
            keys, or inconsistent values.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    unknown = set(raw) - _KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    try:
        return _build(raw)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _build(raw: dict) -> RunConfig:
    if "n_select" not in raw:
        raise ConfigError("key 'n_select' is required")
    n_select = raw["n_select"]
    if not isinstance(n_select, int) or isinstance(n_select, bool) \
            or n_select < 2:
        raise ConfigError(f"key 'n_select' must be an integer >= 2, "
                          f"got {n_select!r}")

    bounds = raw.get("altitude_bounds_km")
    if bounds is None:
        altitude_bounds = PlannerConfig().altitude_bounds
    else:
        if (not isinstance(bounds, list) or len(bounds) != 2
                or not all(isinstance(v, (int, float)) for v in bounds)
                or not bounds[0] < bounds[1]):
            raise ConfigError(
                "key 'altitude_bounds_km' must be [low, high] with "
                f"low < high, got {bounds!r}")
        altitude_bounds = (bounds[0] * KM, bounds[1] * KM)

    t_cap = raw.get("t_cap_init_days")
    if t_cap is not None:
        t_cap = _number(raw, "t_cap_init_days", 0.0)
        if t_cap <= 0.0:
            raise ConfigError("key 't_cap_init_days' must be positive")

    refine = raw.get("refine", True)
    if not isinstance(refine, bool):
        raise ConfigError(f"key 'refine' must be a boolean, got {refine!r}")

    defaults = PlannerConfig()
    planner = PlannerConfig(
        t_max_days=_number(raw, "t_max_days", defaults.t_max_days),
        dv_max=_number(raw, "dv_max", defaults.dv_max),
        t_cap_init_days=t_cap,
        altitude_bounds=altitude_bounds,
        alpha_half_width=_number(raw, "alpha_half_width_km",
                                 defaults.alpha_half_width / KM) * KM,
        date_half_width_days=_number(raw, "date_half_width_days",
                                     defaults.date_half_width_days),
        shrink_factor=_number(raw, "shrink_factor", defaults.shrink_factor),
        max_iterations=int(_number(raw, "max_iterations",
                                   defaults.max_iterations)),
        cost_tol=_number(raw, "cost_tol", defaults.cost_tol),
        slack_tol_days=_number(raw, "slack_tol_days",
                               defaults.slack_tol_days),
        t_deorb_days=_number(raw, "t_deorb_days", defaults.t_deorb_days),
        order_sep_days=_number(raw, "order_sep_days",
                               defaults.order_sep_days),
        per_debris_cost=_number(raw, "per_debris_cost",
                                defaults.per_debris_cost),
        refine=refine,
        refine_max_sweeps=int(_number(raw, "refine_max_sweeps",
                                      defaults.refine_max_sweeps)),
    )
    if planner.t_max_days <= n_select * planner.t_deorb_days:
        raise ConfigError(
            f"t_max_days ({planner.t_max_days:g}) must exceed "
            f"n_select*t_deorb_days ({n_select * planner.t_deorb_days:g})")

    strategy = raw.get("strategy", SearchConfig().strategy)
    branch_rule = raw.get("branch_rule", SearchConfig().branch_rule)
    try:
        search = SearchConfig(
            strategy=strategy, branch_rule=branch_rule,
            max_nodes=int(_number(raw, "max_nodes",
                                  SearchConfig().max_nodes)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    return RunConfig(n_select=n_select, planner=planner, search=search,
                     start=_parse_start(raw.get("start_orbit")))

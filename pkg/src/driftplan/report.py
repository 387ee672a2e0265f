"""Plan reports and plot-data files.

Everything here is a pure function of the finished plan, so repeated
runs on identical inputs emit byte-identical bytes.  Plot data goes
out as plain columnar text, one file per figure, with a comment
header naming the columns and units.
"""

from __future__ import annotations

import math
from pathlib import Path

from .catalog import Catalog
from .orbital import (
    DEFAULT_CONSTANTS,
    Constants,
    OrbitalElements,
    raan_at,
    raan_precession_rate,
)
from .planner import LegPlan, MissionPlan
from .units import DAY, KM, rad_to_deg

RAAN_SAMPLES = 33


def _fmt_path(path: list[int]) -> str:
    return " -> ".join(str(p) for p in path)


def render_plan_report(plan: MissionPlan, catalog: Catalog) -> str:
    """The mission plan as a structured text document."""
    lines = [
        "mission plan",
        "============",
        f"catalog epoch     : {catalog.epoch or '(unspecified)'}",
        f"debris in catalog : {len(catalog)}",
        f"debris collected  : {len(set(plan.path) & set(catalog.rows))}",
        f"time budget       : {plan.t_max_days:.3f} days",
        "",
        f"path: {_fmt_path(plan.path)}",
        "",
        "leg  from    to  side          a_drift_km  i_drift_deg  "
        "depart_d  duration_d    dv_ms",
    ]
    for k, leg in enumerate(plan.legs):
        lines.append(
            f"{k + 1:3d}  {leg.from_id:4d}  {leg.to_id:4d}  "
            f"{leg.side.value:<12s}  {leg.a_drift / KM:10.3f}  "
            f"{rad_to_deg(leg.i_drift):11.5f}  {leg.t_depart_days:8.3f}  "
            f"{leg.duration_days:10.3f}  {leg.dv:7.3f}")
    lines += [
        "",
        f"total dv    : {plan.total_dv:.3f} m/s",
        f"duration    : {plan.duration_days:.3f} days",
        f"slack       : {plan.slack_days:.3f} days",
        "",
        f"iterations  : {plan.n_iterations} "
        f"({'converged' if plan.converged else 'not converged'}"
        f"{', oscillating' if plan.oscillating else ''})",
        f"refinement  : {plan.refine_gain_dv:.3f} m/s saved",
        f"candidates  : {plan.candidate_edges} viable transfers",
    ]
    return "\n".join(lines) + "\n"


def render_iteration_history(plan: MissionPlan) -> str:
    """The outer loop's trace as a fixed-width table."""
    lines = [
        "iteration history",
        "=================",
        " it  width_km  model_dv_ms  exact_dv_ms  duration_d  nodes  "
        "pivots  flips  path",
    ]
    for r in plan.iterations:
        dv = f"{r.exact_dv:11.3f}" if math.isfinite(r.exact_dv) \
            else "        inf"
        lines.append(
            f"{r.index:3d}  {r.half_width_km:8.3f}  "
            f"{r.model_objective:11.3f}  {dv}  "
            f"{r.exact_duration_days:10.3f}  {r.nodes:5d}  {r.pivots:6d}  "
            f"{r.side_flips:5d}  {'-'.join(str(p) for p in r.path)}")
    return "\n".join(lines) + "\n"


def orbit_timeline_rows(
    plan: MissionPlan, elements: dict[int, OrbitalElements]
) -> list[tuple[float, float, float, float, str]]:
    """Stepwise (t_begin_d, t_end_d, a_km, i_deg, tag) orbit segments."""
    rows = []
    for leg in plan.legs:
        rows.append((leg.t_depart_days, leg.t_depart_days + leg.duration_days,
                     leg.a_drift / KM, rad_to_deg(leg.i_drift),
                     f"{leg.from_id}->{leg.to_id}"))
    if plan.legs:
        last = plan.legs[-1]
        el = elements[last.to_id]
        t = last.t_depart_days + last.duration_days
        rows.append((t, t, el.a / KM, rad_to_deg(el.i), f"at-{last.to_id}"))
    return rows


def raan_gap_rows(
    plan: MissionPlan,
    elements: dict[int, OrbitalElements],
    const: Constants = DEFAULT_CONSTANTS,
    samples: int = RAAN_SAMPLES,
) -> list[tuple[str, float, float]]:
    """(tag, t_d, gap_deg) samples of each leg's node closure.

    The drift orbit inherits the chaser's node at departure (tangential
    burns move the axis, not the node) and precesses at its own rate;
    the gap to the target shrinks to zero by arrival.
    """
    rows = []
    for leg in plan.legs:
        tag = f"{leg.from_id}->{leg.to_id}"
        dep = leg.t_depart_days
        rate = raan_precession_rate(leg.a_drift, 0.0, leg.i_drift, const)
        node0 = raan_at(elements[leg.from_id], dep * DAY, const)
        for k in range(samples):
            t = dep + leg.duration_days * k / (samples - 1)
            chaser = node0 + rate * (t - dep) * DAY
            gap = rad_to_deg(raan_at(elements[leg.to_id], t * DAY, const)
                             - chaser)
            gap = (gap + 180.0) % 360.0 - 180.0
            rows.append((tag, t, gap))
    return rows


def _dv_steps(legs: list[LegPlan]) -> list[tuple[float, float]]:
    points = [(0.0, 0.0)]
    cum = 0.0
    for leg in legs:
        points.append((leg.t_depart_days, cum))
        cum += leg.dv
        points.append((leg.t_depart_days, cum))
        points.append((leg.t_depart_days + leg.duration_days, cum))
    return points


def cumulative_dv_rows(plan: MissionPlan) -> list[tuple[str, float, float]]:
    """(series, t_d, dv_cum_ms) staircases before and after optimizing."""
    rows = [("final", t, dv) for t, dv in _dv_steps(plan.legs)]
    if plan.initial_legs:
        rows = [("initial", t, dv) for t, dv in _dv_steps(plan.initial_legs)
                ] + rows
    return rows


def write_outputs(
    plan: MissionPlan,
    catalog: Catalog,
    out_dir: str | Path,
    const: Constants = DEFAULT_CONSTANTS,
) -> list[Path]:
    """Write the report, history and plot data; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    elements = catalog.elements()

    timeline = ["# orbit timeline: t_begin_d t_end_d a_km i_deg tag"]
    timeline += [f"{t0:.6f} {t1:.6f} {a:.6f} {i:.6f} {tag}"
                 for t0, t1, a, i, tag in orbit_timeline_rows(plan, elements)]

    gaps = ["# node gap per leg: tag t_d gap_deg"]
    gaps += [f"{tag} {t:.6f} {gap:.6f}"
             for tag, t, gap in raan_gap_rows(plan, elements, const)]

    cumdv = ["# cumulative cost: series t_d dv_cum_ms"]
    cumdv += [f"{series} {t:.6f} {dv:.6f}"
              for series, t, dv in cumulative_dv_rows(plan)]

    files = {
        "plan.txt": render_plan_report(plan, catalog),
        "iterations.txt": render_iteration_history(plan),
        "orbit_timeline.dat": "\n".join(timeline) + "\n",
        "raan_gap.dat": "\n".join(gaps) + "\n",
        "cumulative_dv.dat": "\n".join(cumdv) + "\n",
    }
    paths = []
    for name, text in files.items():
        target = out / name
        target.write_text(text)
        paths.append(target)
    return paths

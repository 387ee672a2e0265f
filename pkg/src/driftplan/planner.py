"""Iterative mission planning: linearize, search, re-evaluate, repeat.

One round trips through four stages.  A model is assembled from the
current per-leg linearizations (`linmodel`), its binary optimum found
(`bnb`), the decoded path re-evaluated exactly leg by leg (`transfer`),
and the exact solutions become the next round's linearization anchors.
The drift-axis boxes open at a configured half-width once real anchors
exist and shrink geometrically while the path stays put, so early
rounds explore orderings and late rounds polish one schedule.

Round zero is special: every ordered pair is pre-optimized at mission
start inside one equal time slot, transfers too expensive or too slow
are dropped for good, and the first model is frozen (zero-width boxes)
so the opening path comes from comparable anchored costs.

Once the loop settles, a last pass re-splits the mission clock: the
hand-over dates between consecutive legs are tuned one at a time by
golden-section search, each leg re-optimized inside its slot, until a
full sweep buys less than the cost tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .bnb import SearchConfig, greedy_incumbent, solve
from .errors import DecodeError, InfeasibleMission
from .linmodel import (
    LinearizedTransfer,
    PathModel,
    build_path_model,
    linearize_transfer,
)
from .orbital import DEFAULT_CONSTANTS, Constants, OrbitalElements
from .transfer import (
    ALTITUDE_BOUNDS_DEFAULT,
    DV_MAX_DEFAULT,
    TransferSolution,
    admissible_interval,
    drift_duration,
    pre_optimize,
    transfer_cost,
)
from .units import DAY, KM

START_ID = 0


@dataclass(frozen=True)
class PlannerConfig:
    """Knobs of the outer loop; lengths in metres, dates in days."""

    t_max_days: float = 366.0
    dv_max: float = DV_MAX_DEFAULT
    t_cap_init_days: float | None = None
    altitude_bounds: tuple[float, float] = ALTITUDE_BOUNDS_DEFAULT
    alpha_half_width: float = 50.0 * KM
    date_half_width_days: float = 60.0
    shrink_factor: float = 0.5
    max_iterations: int = 20
    cost_tol: float = 1.0
    slack_tol_days: float = 0.5
    t_deorb_days: float = 0.0
    order_sep_days: float = 0.5
    per_debris_cost: float = 0.0
    refine: bool = True
    refine_max_sweeps: int = 8


@dataclass(frozen=True)
class LegPlan:
    """One flown transfer of the final plan (SI lengths, day dates)."""

    from_id: int
    to_id: int
    side: object
    i_drift: float
    a_drift: float
    t_depart_days: float
    duration_days: float
    dv: float
    dv_breakdown: tuple[float, float, float, float]


@dataclass
class IterationRecord:
    index: int
    path: tuple[int, ...]
    half_width_km: float
    model_objective: float
    exact_dv: float
    exact_duration_days: float
    nodes: int
    pivots: int
    feasible: bool
    side_flips: int
    width_restored: bool


@dataclass
class MissionPlan:
    path: list[int]
    legs: list[LegPlan]
    total_dv: float
    duration_days: float
    slack_days: float
    t_max_days: float
    converged: bool
    oscillating: bool
    candidate_edges: int
    iterations: list[IterationRecord]
    refine_gain_dv: float = 0.0
    initial_legs: list[LegPlan] = field(default_factory=list)

    @property
    def n_iterations(self) -> int:
        return len(self.iterations)


def decode_solution(model: PathModel, x) -> tuple[list[int], dict, dict, list[float]]:
    """Path, axis offsets (m), dates (days) and believed leg durations
    (days) encoded in a binary-feasible model point.

    Raises:
        DecodeError: the selected edges do not chain into one open path.
    """
    ci = model.col_index
    edges = [(i, j) for (i, j) in model.legs if x[ci[("s", i, j)]] > 0.5]
    if len(edges) != model.n_edges:
        raise DecodeError(
            f"{len(edges)} selected edges, expected {model.n_edges}")
    succ = dict(edges)
    heads = {i for i, _ in edges} - {j for _, j in edges}
    if len(succ) != len(edges) or len(heads) != 1:
        raise DecodeError("selected edges do not form one open chain")
    path = [heads.pop()]
    while path[-1] in succ:
        path.append(succ[path[-1]])
        if len(path) > len(edges) + 1:
            raise DecodeError("selected edges close a loop")
    if len(path) != len(edges) + 1:
        raise DecodeError("selected edges split into several chains")
    alphas = {e: float(x[ci[("alpha", *e)]]) * KM for e in edges}
    taus = {k: float(x[ci[("tau", k)]]) for k in model.debris_ids}
    durations = [
        model.legs[e].duration_at(alphas[e], taus[e[0]] * DAY) / DAY
        for e in edges
    ]
    return path, alphas, taus, durations


def validate_side_choices(
    model_legs: dict[tuple[int, int], LinearizedTransfer],
    exact_legs: list[TransferSolution],
) -> list[tuple[int, int]]:
    """Edges whose exact re-evaluation left the linearized drift side."""
    flips = []
    for sol in exact_legs:
        key = (sol.from_id, sol.to_id)
        if key in model_legs and model_legs[key].side is not sol.side:
            flips.append(key)
    return flips


def _linearize_all(
    anchors: dict[tuple[int, int], TransferSolution],
    refs_days: dict[int, float],
    half_width: float,
    cfg: PlannerConfig,
    catalog: dict[int, OrbitalElements],
    const: Constants,
) -> dict[tuple[int, int], LinearizedTransfer]:
    """Re-date every anchor to its debris' reference and box it.

    Transfer cost carries no date dependence and the node-gap closure is
    linear in the departure date, so moving an anchor in time is exact;
    `linearize_transfer` recomputes the duration values at the new date.
    """
    legs = {}
    for (i, j), anchor in anchors.items():
        ref = refs_days.get(i, 0.0)
        sol = replace(anchor, t_depart=ref * DAY)
        band = admissible_interval(catalog[j], sol.side, sol.i_drift,
                                   cfg.altitude_bounds, const=const)
        if band is None:
            continue
        lo = max(sol.a_drift - half_width, band[0])
        hi = min(sol.a_drift + half_width, band[1])
        if lo > hi:
            lo = hi = min(max(sol.a_drift, band[0]), band[1])
        legs[(i, j)] = linearize_transfer(
            sol, catalog[i], catalog[j],
            (lo - sol.a_drift, hi - sol.a_drift),
            (-ref * DAY, (cfg.t_max_days - ref) * DAY),
            const,
        )
    return legs


def _exact_evaluate(
    catalog: dict[int, OrbitalElements],
    path: list[int],
    caps_days: list[float],
    cfg: PlannerConfig,
    const: Constants,
) -> tuple[list[TransferSolution], dict[int, float], float, bool]:
    """Fly the path for real: sequential pre-optimizations, each capped
    by its time slot and by the time still left in the mission.

    Returns (legs, intervention dates, mission end, all-legs-feasible).
    """
    legs: list[TransferSolution] = []
    dates = {path[0]: 0.0}
    t = 0.0
    for k, (i, j) in enumerate(zip(path, path[1:])):
        cap = min(max(caps_days[k], cfg.order_sep_days), cfg.t_max_days - t)
        if cap <= 0.0:
            return legs, dates, t, False
        sol = pre_optimize(catalog[i], catalog[j], t * DAY, cap * DAY,
                           cfg.altitude_bounds, math.inf,
                           from_id=i, to_id=j, const=const)
        if not sol.feasible:
            return legs, dates, t, False
        legs.append(sol)
        t += max(sol.duration / DAY + cfg.t_deorb_days, cfg.order_sep_days)
        dates[j] = t
    return legs, dates, t, True


def _trust_evaluate(
    catalog: dict[int, OrbitalElements],
    path: list[int],
    alphas: dict[tuple[int, int], float],
    model: PathModel,
    cfg: PlannerConfig,
    const: Constants,
) -> tuple[list[TransferSolution], dict[int, float], float]:
    """Evaluate the decoded model point exactly.

    Each leg is flown at the model's chosen drift axis, back to back:
    a leg departs the moment the previous one ends.  Node phasing is
    bought with longer or shorter drifts (the axis offsets), never by
    parking, so the mission end equals the sum of the durations the
    model just budgeted — date offsets only steer that accounting.
    Returns (legs, intervention dates, mission end).
    """
    legs: list[TransferSolution] = []
    dates: dict[int, float] = {}
    t_dep = 0.0
    t_free = 0.0
    for (i, j) in zip(path, path[1:]):
        lin = model.legs[(i, j)]
        a_star = lin.a_ref + alphas[(i, j)]
        t_dep = max(t_free, t_dep + cfg.order_sep_days) if legs else 0.0
        dur = drift_duration(catalog[i], catalog[j], a_star, lin.i_drift,
                             t_dep * DAY, const) / DAY
        dv, breakdown = transfer_cost(catalog[i], catalog[j], a_star,
                                      lin.i_drift, const)
        legs.append(TransferSolution(
            from_id=i, to_id=j, side=lin.side, a_drift=a_star,
            i_drift=lin.i_drift, e_drift=0.0, t_depart=t_dep * DAY,
            duration=dur * DAY, dv_total=dv, dv_breakdown=breakdown,
            feasible=True,
        ))
        dates[i] = t_dep
        t_free = t_dep + dur + cfg.t_deorb_days
    dates[path[-1]] = t_free
    return legs, dates, t_free


def _leg_plans(sols: list[TransferSolution]) -> list[LegPlan]:
    return [
        LegPlan(
            from_id=s.from_id, to_id=s.to_id, side=s.side,
            i_drift=s.i_drift, a_drift=s.a_drift,
            t_depart_days=s.t_depart / DAY, duration_days=s.duration / DAY,
            dv=s.dv_total, dv_breakdown=s.dv_breakdown,
        )
        for s in sols
    ]


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_GOLDEN_ITERS = 24


def _golden_min(f, lo: float, hi: float) -> tuple[float, float]:
    """Argmin and minimum of a unimodal ``f`` over ``[lo, hi]``."""
    a, d = lo, hi
    c = d - _INV_PHI * (d - a)
    x = a + _INV_PHI * (d - a)
    fc, fx = f(c), f(x)
    for _ in range(_GOLDEN_ITERS):
        if fc < fx:
            d, x, fx = x, c, fc
            c = d - _INV_PHI * (d - a)
            fc = f(c)
        else:
            a, c, fc = c, x, fx
            x = a + _INV_PHI * (d - a)
            fx = f(x)
    return (c, fc) if fc < fx else (x, fx)


def _refine_schedule(
    catalog: dict[int, OrbitalElements],
    path: list[int],
    bounds: list[float],
    cfg: PlannerConfig,
    const: Constants,
) -> tuple[list[TransferSolution], float]:
    """Re-split the mission clock between the legs of a settled path.

    ``bounds`` holds the departure date of every leg plus the budget
    end; leg k flies inside ``[bounds[k], bounds[k+1]]``.  Interior
    dates are tuned one at a time by golden-section search with their
    neighbours held, sweeping until a full pass buys less than the
    cost tolerance — that last sweep is discarded, since below the
    tolerance the split is noise and chasing it just wanders along
    the flat of the valley.

    Returns the re-optimized legs, or an empty list on breakdown.
    """
    edges = list(zip(path, path[1:]))
    margin = cfg.t_deorb_days + cfg.order_sep_days

    def leg(k: int, b: list[float]) -> TransferSolution | None:
        cap = b[k + 1] - cfg.t_deorb_days - b[k]
        if cap <= 0.0:
            return None
        i, j = edges[k]
        sol = pre_optimize(catalog[i], catalog[j], b[k] * DAY, cap * DAY,
                           cfg.altitude_bounds, math.inf,
                           from_id=i, to_id=j, const=const)
        return sol if sol.feasible else None

    def total(b: list[float]) -> float:
        s = 0.0
        for k in range(len(edges)):
            sol = leg(k, b)
            if sol is None:
                return math.inf
            s += sol.dv_total
        return s

    b = list(bounds)
    cur = total(b)
    if not math.isfinite(cur):
        return []
    for _ in range(cfg.refine_max_sweeps):
        nb = list(b)
        nv = cur
        for k in range(1, len(nb) - 1):
            def f(val: float, k: int = k) -> float:
                trial = list(nb)
                trial[k] = val
                return total(trial)

            val, fv = _golden_min(f, nb[k - 1] + margin, nb[k + 1] - margin)
            if fv < nv - 1e-12:
                nb[k] = val
                nv = fv
        if cur - nv < cfg.cost_tol:
            break
        b, cur = nb, nv
    return [leg(k, b) for k in range(len(edges))]


def plan(
    catalog: dict[int, OrbitalElements],
    n_select: int,
    config: PlannerConfig = PlannerConfig(),
    search: SearchConfig = SearchConfig(),
    start: OrbitalElements | None = None,
    const: Constants = DEFAULT_CONSTANTS,
) -> MissionPlan:
    """Select ``n_select`` debris from ``catalog`` and plan the visit.

    With ``start`` given, the mission departs from that orbit and flies
    ``n_select`` transfers; otherwise it opens at the first selected
    debris and flies one fewer.

    Raises:
        InfeasibleMission: no feasible plan exists for the budget.
        ValueError: malformed inputs (reserved id, bad selection size).
    """
    if START_ID in catalog and start is not None:
        raise ValueError(f"catalog id {START_ID} is reserved for the start orbit")
    if n_select < 2:
        raise ValueError("a mission needs at least two debris")
    cat = dict(catalog)
    ids = sorted(catalog)
    start_id = None
    if start is not None:
        cat[START_ID] = start
        ids = [START_ID] + ids
        start_id = START_ID
    n_edges = n_select if start_id is not None else n_select - 1
    slot = (config.t_cap_init_days if config.t_cap_init_days is not None
            else config.t_max_days / (n_edges + 2))

    # -- candidate transfers: one equal slot at mission start ------------
    anchors: dict[tuple[int, int], TransferSolution] = {}
    for i in ids:
        for j in ids:
            if i == j or j == start_id:
                continue
            sol = pre_optimize(cat[i], cat[j], 0.0, slot * DAY,
                               config.altitude_bounds, config.dv_max,
                               from_id=i, to_id=j, const=const)
            if sol.feasible:
                anchors[(i, j)] = sol
    candidate_edges = len(anchors)
    if candidate_edges < n_edges:
        raise InfeasibleMission(
            f"only {candidate_edges} viable transfers for {n_edges} legs "
            f"within {config.t_max_days:g} days and {config.dv_max:g} m/s")

    refs: dict[int, float] = {}
    width = 0.0
    width_t = config.date_half_width_days
    streak = 0
    restored = False
    oscillating = False
    converged = False
    seen_paths: list[tuple[int, ...]] = []
    records: list[IterationRecord] = []
    prev: IterationRecord | None = None
    best: tuple[float, list[TransferSolution], dict[int, float], float] | None = None
    init_exact: list[TransferSolution] = []

    for m in range(config.max_iterations + 1):
        legs_m = _linearize_all(anchors, refs, width if m else 0.0,
                                config, cat, const)
        model = build_path_model(
            ids, legs_m, n_select, config.t_max_days, config.t_deorb_days,
            config.order_sep_days, config.per_debris_cost, start_id,
            tau_half_width_days=None if m == 0 else width_t)
        seed = greedy_incumbent(model)
        res = solve(model.to_lp_problem(), model.binary_mask, search,
                    incumbent=seed[0] if seed else None)
        if res.status != "optimal":
            if best is not None:
                break
            raise InfeasibleMission(
                f"no ordering of {n_select} debris fits "
                f"{config.t_max_days:g} days")
        path, alphas, _, _ = decode_solution(model, res.x)
        if m == 0:
            exact, dates, t_end, feas = _exact_evaluate(
                cat, path, [slot] * n_edges, config, const)
            init_exact = list(exact)
        else:
            exact, dates, t_end = _trust_evaluate(
                cat, path, alphas, model, config, const)
            feas = t_end <= config.t_max_days + 1e-9
        dv = (sum(s.dv_total for s in exact)
              + config.per_debris_cost * n_select)
        if len(exact) < n_edges:
            dv, feas = math.inf, False

        # the exact values re-anchor the next round, improving or not;
        # the best feasible iterate is kept aside as the fallback answer
        for sol in exact:
            anchors[(sol.from_id, sol.to_id)] = sol
        refs = {k: min(max(d, 0.0), config.t_max_days)
                for k, d in dates.items()}
        if feas and (best is None or dv <= best[0]):
            best = (dv, exact, dates, t_end)

        path_t = tuple(path)
        rec = IterationRecord(
            index=m, path=path_t, half_width_km=(width if m else 0.0) / KM,
            model_objective=res.objective, exact_dv=dv,
            exact_duration_days=t_end, nodes=res.nodes, pivots=res.pivots,
            feasible=feas,
            side_flips=len(validate_side_choices(legs_m, exact)),
            width_restored=False,
        )

        if m == 0:
            width = config.alpha_half_width
        else:
            if prev is not None and feas and prev.feasible \
                    and path_t == prev.path \
                    and abs(dv - prev.exact_dv) < config.cost_tol \
                    and abs((config.t_max_days - t_end)
                            - (config.t_max_days - prev.exact_duration_days)
                            ) < config.slack_tol_days:
                converged = True
            if prev is not None and path_t == prev.path:
                streak += 1
            else:
                if path_t in seen_paths[:-1]:
                    if restored:
                        oscillating = True
                    else:
                        width = config.alpha_half_width
                        width_t = config.date_half_width_days
                        restored = True
                        rec.width_restored = True
                streak = 1
            if streak >= 2 and not rec.width_restored:
                width *= config.shrink_factor
                width_t *= config.shrink_factor

        seen_paths.append(path_t)
        records.append(rec)
        prev = rec
        if converged or oscillating:
            break

    if best is None:
        raise InfeasibleMission(
            "every candidate ordering broke down under exact re-evaluation")
    dv, exact, dates, t_end = best
    if converged:
        # the converged iterate is the self-consistent answer
        last = records[-1]
        dv, t_end = last.exact_dv, last.exact_duration_days
        exact = [anchors[(i, j)] for i, j in zip(last.path, last.path[1:])]
    gain = 0.0
    if config.refine and len(exact) == n_edges and n_edges >= 2:
        bounds = [s.t_depart / DAY for s in exact] + [config.t_max_days]
        refined = _refine_schedule(
            cat, [exact[0].from_id] + [s.to_id for s in exact],
            bounds, config, const)
        if refined:
            new_dv = (sum(s.dv_total for s in refined)
                      + config.per_debris_cost * n_select)
            if new_dv < dv:
                gain = dv - new_dv
                exact, dv = refined, new_dv
                t_end = (exact[-1].t_depart + exact[-1].duration) / DAY \
                    + config.t_deorb_days
    legs = _leg_plans(exact)
    path = [legs[0].from_id] + [l.to_id for l in legs] if legs else []
    return MissionPlan(
        path=path,
        legs=legs,
        total_dv=dv,
        duration_days=t_end,
        slack_days=config.t_max_days - t_end,
        t_max_days=config.t_max_days,
        converged=converged,
        oscillating=oscillating,
        candidate_edges=candidate_edges,
        iterations=records,
        refine_gain_dv=gain,
        initial_legs=_leg_plans(init_exact) if len(init_exact) == n_edges
        else [],
    )

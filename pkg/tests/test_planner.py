"""Outer planning loop: golden mission on the reference catalog, the
decode step, and the closing schedule refinement."""

import math

import numpy as np
import pytest

from driftplan.errors import DecodeError, InfeasibleMission
from driftplan.linmodel import build_path_model, encode_path
from driftplan.orbital import OrbitalElements
from driftplan.planner import (
    START_ID,
    PlannerConfig,
    decode_solution,
    plan,
    validate_side_choices,
)
from driftplan.transfer import DriftSide, TransferSolution
from driftplan.units import KM, deg_to_rad

# Frozen from a reference run; the catalog tables they descend from are
# checked separately against reference totals in the acceptance suite.
INIT_PATH = (5, 8, 2, 10, 6)
INIT_DV = 707.1964811066184
INIT_DURATION = 244.0
FINAL_PATH = [5, 8, 2, 6, 10]
FINAL_DV = 499.0013856280177
FINAL_DURATION = 366.0
REFINE_GAIN = 1.9458452485322523
FINAL_LEGS = {
    (5, 8): (7090438.276695871, 0.0, 102.67996802435623, 107.68111439214911),
    (8, 2): (7046524.881077458, 102.67996802442278, 103.54052472657634,
             161.66284049917135),
    (2, 6): (7026598.027872811, 206.2204927511206, 91.3409956772695,
             127.25827998056766),
    (6, 10): (7249141.9557704115, 297.5614884283906, 68.43851157153308,
              102.39915075612961),
}


def test_initial_iteration_golden(golden_plan):
    """Round zero reproduces the frozen slot-capped opening mission."""
    r0 = golden_plan.iterations[0]
    assert r0.path == INIT_PATH
    assert r0.half_width_km == 0.0
    assert r0.feasible
    assert r0.exact_dv == pytest.approx(INIT_DV, rel=1e-6)
    assert r0.exact_duration_days == pytest.approx(INIT_DURATION, abs=1e-6)


def test_convergence(golden_plan):
    assert golden_plan.converged
    assert not golden_plan.oscillating
    assert golden_plan.n_iterations <= 10
    assert golden_plan.candidate_edges == 20


def test_cost_trajectory_decreasing(golden_plan):
    objs = [r.model_objective for r in golden_plan.iterations]
    assert objs[0] > objs[-1]
    for prev, cur in zip(objs, objs[1:]):
        assert cur <= prev + 1.0
    stable = [r.exact_dv for r in golden_plan.iterations
              if list(r.path) == FINAL_PATH]
    for prev, cur in zip(stable, stable[1:]):
        assert cur <= prev + 1.0


def test_final_plan_golden(golden_plan):
    mp = golden_plan
    assert mp.path == FINAL_PATH
    assert mp.total_dv == pytest.approx(FINAL_DV, rel=1e-6)
    assert mp.duration_days == pytest.approx(FINAL_DURATION, abs=1e-6)
    assert mp.slack_days == pytest.approx(0.0, abs=1e-6)
    assert mp.refine_gain_dv == pytest.approx(REFINE_GAIN, abs=1e-3)
    assert mp.total_dv == pytest.approx(
        mp.iterations[-1].exact_dv - mp.refine_gain_dv, abs=1e-9)


def test_final_legs_frozen(golden_plan):
    assert len(golden_plan.legs) == 4
    for leg in golden_plan.legs:
        a, dep, dur, dv = FINAL_LEGS[(leg.from_id, leg.to_id)]
        assert leg.a_drift == pytest.approx(a, rel=1e-6)
        assert leg.t_depart_days == pytest.approx(dep, abs=0.01)
        assert leg.duration_days == pytest.approx(dur, abs=0.01)
        assert leg.dv == pytest.approx(dv, abs=1e-3)


def test_final_schedule_consistent(golden_plan):
    mp = golden_plan
    chain = [mp.legs[0].from_id] + [l.to_id for l in mp.legs]
    assert chain == mp.path
    t = 0.0
    for leg in mp.legs:
        assert leg.t_depart_days >= t - 1e-6
        t = leg.t_depart_days + leg.duration_days
        assert leg.dv == pytest.approx(sum(leg.dv_breakdown), abs=1e-9)
    assert t <= mp.t_max_days + 1e-9
    assert t == pytest.approx(mp.duration_days, abs=1e-9)
    assert sum(l.dv for l in mp.legs) == pytest.approx(mp.total_dv, abs=1e-9)


def test_decode_roundtrip(catalog11, legs61_shared):
    ids = sorted(catalog11)
    model = build_path_model(ids, legs61_shared, 5, 366.0)
    path = [5, 8, 2, 10, 6]
    taus = {5: 0.0, 8: 61.0, 2: 122.0, 10: 183.0, 6: 244.0}
    x = encode_path(model, path, taus)
    got_path, alphas, got_taus, durations = decode_solution(model, x)
    assert got_path == path
    assert len(alphas) == 4 and len(durations) == 4
    for k, d in taus.items():
        assert got_taus[k] == pytest.approx(d, abs=1e-9)


def test_decode_rejects_split_chains(catalog11, legs61_shared):
    ids = sorted(catalog11)
    model = build_path_model(ids, legs61_shared, 3, 366.0)
    x = np.zeros(len(model.col_names))
    x[model.col_index[("s", 5, 8)]] = 1.0
    x[model.col_index[("s", 2, 6)]] = 1.0
    with pytest.raises(DecodeError):
        decode_solution(model, x)


def test_decode_rejects_loop(catalog11, legs61_shared):
    ids = sorted(catalog11)
    model = build_path_model(ids, legs61_shared, 3, 366.0)
    x = np.zeros(len(model.col_names))
    x[model.col_index[("s", 5, 8)]] = 1.0
    x[model.col_index[("s", 8, 5)]] = 1.0
    with pytest.raises(DecodeError):
        decode_solution(model, x)


def test_validate_side_choices(legs61_shared):
    lin = legs61_shared[(5, 8)]
    flipped = DriftSide.ABOVE_TARGET if lin.side is DriftSide.BELOW_TARGET \
        else DriftSide.BELOW_TARGET

    def sol(side):
        return TransferSolution(
            from_id=5, to_id=8, side=side, a_drift=lin.a_ref,
            i_drift=lin.i_drift, e_drift=0.0, t_depart=0.0,
            duration=0.0, dv_total=0.0, dv_breakdown=(0, 0, 0, 0),
            feasible=True)

    assert validate_side_choices(legs61_shared, [sol(lin.side)]) == []
    assert validate_side_choices(legs61_shared, [sol(flipped)]) == [(5, 8)]


def test_rejects_bad_inputs(catalog11):
    with pytest.raises(ValueError):
        plan(catalog11, 1)
    bad = dict(catalog11)
    bad[START_ID] = catalog11[5]
    with pytest.raises(ValueError):
        plan(bad, 2, start=catalog11[5])


def test_infeasible_budget_raises(catalog11):
    small = {k: catalog11[k] for k in (1, 2, 3)}
    cfg = PlannerConfig(t_max_days=2.0)
    with pytest.raises(InfeasibleMission):
        plan(small, 3, cfg)


def test_start_orbit_mission(catalog11):
    small = {k: catalog11[k] for k in (2, 5, 8)}
    start = OrbitalElements(7120.0 * KM, 0.0, deg_to_rad(98.35),
                            deg_to_rad(176.0))
    mp = plan(small, 2, start=start)
    assert mp.path[0] == START_ID
    assert len(mp.legs) == 2
    assert len(set(mp.path)) == 3
    assert mp.duration_days <= mp.t_max_days + 1e-9
    assert math.isfinite(mp.total_dv) and mp.total_dv > 0.0


def test_refine_toggle(catalog11):
    small = {k: catalog11[k] for k in (2, 5, 8)}
    start = OrbitalElements(7120.0 * KM, 0.0, deg_to_rad(98.35),
                            deg_to_rad(176.0))
    off = plan(small, 2, PlannerConfig(refine=False), start=start)
    on = plan(small, 2, start=start)
    assert off.refine_gain_dv == 0.0
    assert on.total_dv <= off.total_dv + 1e-9
    assert on.refine_gain_dv >= 0.0

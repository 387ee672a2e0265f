import time

import pytest

from driftplan.linmodel import linearize_transfer
from driftplan.orbital import OrbitalElements
from driftplan.planner import plan
from driftplan.transfer import admissible_interval, pre_optimize
from driftplan.units import DAY, KM, deg_to_rad

# Reference catalog of 11 sun-synchronous debris (id: a km, e, i deg, raan deg).
CATALOG_ROWS = {
    1: (7030.5, 0.0001, 98.0, 221.1),
    2: (7055.3, 0.0001, 98.1, 188.3),
    3: (7080.0, 0.0001, 98.2, 164.4),
    4: (7104.4, 0.0003, 98.3, 235.0),
    5: (7128.5, 0.0000, 98.4, 174.7),
    6: (7152.5, 0.0001, 98.5, 194.1),
    7: (7176.3, 0.0001, 98.6, 149.0),
    8: (7200.0, 0.0001, 98.7, 180.3),
    9: (7223.2, 0.0002, 98.8, 200.6),
    10: (7246.4, 0.0001, 98.9, 191.0),
    11: (7269.3, 0.0003, 99.0, 160.2),
}


@pytest.fixture(scope="session")
def catalog11() -> dict[int, OrbitalElements]:
    return {
        k: OrbitalElements(a * KM, e, deg_to_rad(i), deg_to_rad(raan))
        for k, (a, e, i, raan) in CATALOG_ROWS.items()
    }


def clipped_alpha_bounds(sol, to_el, half_width):
    """Axis-offset box of +-half_width, clipped to the admissible band."""
    band = admissible_interval(to_el, sol.side, sol.i_drift)
    lo = max(sol.a_drift - half_width, band[0])
    hi = min(sol.a_drift + half_width, band[1])
    return (lo - sol.a_drift, hi - sol.a_drift)


@pytest.fixture(scope="session")
def golden_plan(catalog11):
    """Full five-debris mission plan on the reference catalog (slow).

    The wall-clock time of the planning call is attached as
    ``wall_seconds`` for the end-to-end runtime check.
    """
    t0 = time.perf_counter()
    mp = plan(catalog11, 5)
    mp.wall_seconds = time.perf_counter() - t0
    return mp


@pytest.fixture(scope="session")
def legs61_shared(catalog11):
    """Linearized transfers for every pair reachable within a 61-day cap."""
    legs = {}
    for i, from_el in catalog11.items():
        for j, to_el in catalog11.items():
            if i == j:
                continue
            sol = pre_optimize(from_el, to_el, 0.0, 61.0 * DAY,
                               from_id=i, to_id=j)
            if not sol.feasible:
                continue
            legs[(i, j)] = linearize_transfer(
                sol, from_el, to_el,
                clipped_alpha_bounds(sol, to_el, 50.0 * KM),
                (0.0, 366.0 * DAY),
            )
    return legs

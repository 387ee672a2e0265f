"""Drift-orbit transfers between non-coplanar near-circular orbits.

Rotating the ascending node directly with thrust is prohibitively
expensive in LEO.  Instead, a vehicle can descend or climb to an
intermediate *drift orbit* whose J2 nodal rate differs from the target's
and simply wait: the node gap closes at the differential rate, after
which a second Hohmann leg delivers the vehicle to the target.  A
transfer is therefore four burns (two Hohmann legs) plus a coast whose
duration is set by the node geometry at departure.

Two families of drift orbits exist for every pair: one precessing faster
than the target (below the co-rotation axis, for retrograde orbits) and
one precessing slower (above it).  Their inclinations follow the rule
that maximizes the differential rate: the larger of the two inclinations
below, the smaller above.  The side is picked once, by cost, and kept.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import AsymptoteError, DomainError, InfeasibleError
from .orbital import (
    DEFAULT_CONSTANTS,
    Constants,
    OrbitalElements,
    hohmann_dv,
    precession_rate,
    raan_at,
    raan_precession_rate,
)
from .units import wrap_angle

#: Half-width of the excluded band around the co-rotation axis (m).
ASYMPTOTE_GUARD = 10e3

#: Backstop on the differential nodal rate (rad/s); roughly the gap one
#: kilometre away from the co-rotation axis.
RATE_GAP_GUARD = 1e-10

#: Default altitude window for drift orbits (m above the surface).
ALTITUDE_BOUNDS_DEFAULT = (400e3, 1200e3)

#: Default budget above which a transfer is marked unusable (m/s).
DV_MAX_DEFAULT = 400.0

#: Coarse search step of the pre-optimizer (m).
PREOPT_GRID_STEP = 5e3

_GOLDEN_ITERATIONS = 60
_BISECT_ITERATIONS = 60
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class DriftSide(enum.Enum):
    """Which side of the co-rotation axis the drift orbit sits on.

    BELOW_TARGET drifts precess faster than the target plane (lower
    altitude for retrograde orbits), ABOVE_TARGET slower.
    """

    BELOW_TARGET = "below_target"
    ABOVE_TARGET = "above_target"


@dataclass(frozen=True)
class TransferSolution:
    """A fully specified drift transfer between two catalog entries.

    ``dv_breakdown`` holds the four burns in flight order: departure and
    circularization of the first Hohmann leg, then departure and
    circularization of the second.  ``duration`` includes the coast on
    the drift orbit (transfer-arc times are negligible at this scale and
    are not counted).  ``feasible`` is False when no admissible drift
    orbit meets the duration cap or the cost exceeds the budget.
    """

    from_id: int
    to_id: int
    side: DriftSide
    a_drift: float
    i_drift: float
    e_drift: float
    t_depart: float
    duration: float
    dv_total: float
    dv_breakdown: tuple[float, float, float, float]
    feasible: bool


def drift_inclination(i_from: float, i_to: float, side: DriftSide) -> float:
    """Inclination of the drift orbit for the chosen side.

    The differential nodal rate grows with |cos i|, so for retrograde
    pairs the faster (below) side uses the larger inclination and the
    slower (above) side the smaller one.
    """
    if side is DriftSide.BELOW_TARGET:
        return max(i_from, i_to)
    return min(i_from, i_to)


def rate_match_axis(
    to_el: OrbitalElements, i_drift: float, const: Constants = DEFAULT_CONSTANTS
) -> float | None:
    """Semi-major axis where a circular orbit at ``i_drift`` precesses
    exactly at the target's rate, or None when no such axis exists.

    This is the asymptote of the drift duration: transfers are only
    defined away from it.  It coincides with ``to_el.a`` when the drift
    inclination equals the target's.
    """
    rate_to = precession_rate(to_el, const)
    if rate_to == 0.0:
        return None
    ratio = -const.nodal_drift_coefficient * math.cos(i_drift) / rate_to
    if ratio <= 0.0:
        return None
    return ratio ** (2.0 / 7.0)


def admissible_interval(
    to_el: OrbitalElements,
    side: DriftSide,
    i_drift: float,
    altitude_bounds: tuple[float, float] = ALTITUDE_BOUNDS_DEFAULT,
    guard: float = ASYMPTOTE_GUARD,
    const: Constants = DEFAULT_CONSTANTS,
) -> tuple[float, float] | None:
    """Admissible drift semi-major axes for one side, or None if empty.

    The interval is the part of the altitude window where the
    differential rate has the side's sign, shrunk by ``guard`` metres
    away from the co-rotation axis.
    """
    lo = const.earth_radius + altitude_bounds[0]
    hi = const.earth_radius + altitude_bounds[1]
    if lo > hi:
        return None

    rate_to = precession_rate(to_el, const)
    axis = rate_match_axis(to_el, i_drift, const)
    want = 1.0 if side is DriftSide.BELOW_TARGET else -1.0

    if axis is None:
        # Single-signed gap over the whole window: keep or drop it whole.
        gap = raan_precession_rate(0.5 * (lo + hi), 0.0, i_drift, const) - rate_to
        return (lo, hi) if gap * want > 0.0 else None

    # The gap is monotone in a; its sign relative to the axis follows the
    # sign of the drift rate there (retrograde rates fall with altitude).
    rate_at_axis = raan_precession_rate(axis, 0.0, i_drift, const)
    positive_below_axis = rate_at_axis > 0.0
    if (want > 0.0) == positive_below_axis:
        lo_s, hi_s = lo, min(hi, axis - guard)
    else:
        lo_s, hi_s = max(lo, axis + guard), hi
    if lo_s > hi_s:
        return None
    return (lo_s, hi_s)


def drift_duration(
    from_el: OrbitalElements,
    to_el: OrbitalElements,
    a_drift: float,
    i_drift: float,
    t_depart: float,
    const: Constants = DEFAULT_CONSTANTS,
) -> float:
    """Coast duration on the drift orbit, in seconds.

    The vehicle leaves the departure plane at ``t_depart`` and waits on
    the (circular) drift orbit until its node coincides with the
    target's.  The node gap at departure, reduced modulo a full turn
    toward the side the differential rate can actually close, divided by
    that differential rate, gives the wait.

    Raises:
        AsymptoteError: drift and target rates differ by less than the
            guard; no finite wait exists.
        InfeasibleError: no non-negative wait closes the gap (defensive;
            unreachable once the asymptote guard holds).
    """
    rate_to = precession_rate(to_el, const)
    rate_drift = raan_precession_rate(a_drift, 0.0, i_drift, const)
    gap_rate = rate_drift - rate_to
    if abs(gap_rate) < RATE_GAP_GUARD:
        raise AsymptoteError(
            f"drift orbit a={a_drift:.0f} m precesses within "
            f"{RATE_GAP_GUARD} rad/s of the target"
        )

    node_gap = raan_at(to_el, t_depart, const) - raan_at(from_el, t_depart, const)
    if gap_rate > 0.0:
        node_gap = wrap_angle(node_gap)
    else:
        node_gap = -wrap_angle(-node_gap)
    duration = node_gap / gap_rate
    if duration < 0.0:
        raise InfeasibleError("no non-negative drift duration closes the node gap")
    return duration


def transfer_cost(
    from_el: OrbitalElements,
    to_el: OrbitalElements,
    a_drift: float,
    i_drift: float,
    const: Constants = DEFAULT_CONSTANTS,
) -> tuple[float, tuple[float, float, float, float]]:
    """Total impulse of the four burns of a drift transfer, in m/s.

    Both Hohmann legs fold their inclination change into the burn at the
    larger radius.  Exactly one leg carries a plane change because the
    drift inclination matches one endpoint (both legs are plane-free when
    the endpoints share their inclination).

    Returns:
        ``(dv_total, (dv1, dv2, dv3, dv4))`` with burns in flight order.

    Raises:
        DomainError: if any orbit violates the Earth guard radius.
    """
    leg1 = hohmann_dv(from_el.a, a_drift, from_el.i, i_drift, const=const)
    leg2 = hohmann_dv(a_drift, to_el.a, i_drift, to_el.i, const=const)
    breakdown = (leg1[0], leg1[1], leg2[0], leg2[1])
    return sum(breakdown), breakdown


def _golden_min(f, lo: float, hi: float) -> tuple[float, float]:
    """Golden-section minimum of ``f`` on [lo, hi]; fixed iteration count
    so results are bit-reproducible."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(_GOLDEN_ITERATIONS):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = c if fc < fd else d
    return (x, min(fc, fd))


def pre_optimize(
    from_el: OrbitalElements,
    to_el: OrbitalElements,
    t_depart: float,
    t_cap: float,
    altitude_bounds: tuple[float, float] = ALTITUDE_BOUNDS_DEFAULT,
    dv_max: float = DV_MAX_DEFAULT,
    *,
    from_id: int = -1,
    to_id: int = -1,
    sides: tuple[DriftSide, ...] = (DriftSide.BELOW_TARGET, DriftSide.ABOVE_TARGET),
    grid_step: float = PREOPT_GRID_STEP,
    guard: float = ASYMPTOTE_GUARD,
    const: Constants = DEFAULT_CONSTANTS,
) -> TransferSolution:
    """Cheapest admissible drift transfer for one ordered pair.

    For each side the duration cap ``t_cap`` (s) carves a feasible
    sub-interval out of the admissible axis range (the coast shortens
    monotonically away from the co-rotation axis, so the cap boundary is
    found by bisection); the cost is then minimized there with a coarse
    grid refined by a golden section.  The cheaper side wins; ties go to
    the faster-precessing (below) side.

    The returned solution has ``feasible=False`` when neither side meets
    the cap or the best cost exceeds ``dv_max`` (fields then describe the
    best attempt, or NaN when there is none).
    """
    best: tuple[float, DriftSide, float, float, float] | None = None

    for side in sides:
        i_d = drift_inclination(from_el.i, to_el.i, side)
        interval = admissible_interval(to_el, side, i_d, altitude_bounds, guard, const)
        if interval is None:
            continue
        lo, hi = interval

        def duration_at(a: float) -> float:
            return drift_duration(from_el, to_el, a, i_d, t_depart, const)

        # The wait grows toward the co-rotation axis: the endpoint with
        # the shorter wait is the far end.  Clip the interval at the cap.
        t_lo, t_hi = duration_at(lo), duration_at(hi)
        far_first = t_lo <= t_hi
        t_near = max(t_lo, t_hi)
        if min(t_lo, t_hi) > t_cap:
            continue
        if t_near > t_cap:
            a_far, a_near = (lo, hi) if far_first else (hi, lo)
            for _ in range(_BISECT_ITERATIONS):
                mid = 0.5 * (a_far + a_near)
                if duration_at(mid) <= t_cap:
                    a_far = mid
                else:
                    a_near = mid
            lo, hi = (lo, a_far) if far_first else (a_far, hi)

        def cost_at(a: float) -> float:
            return transfer_cost(from_el, to_el, a, i_d, const)[0]

        # Coarse grid, then a golden section around the best cell.
        n_cells = max(1, int(math.ceil((hi - lo) / grid_step)))
        grid = [lo + (hi - lo) * k / n_cells for k in range(n_cells + 1)]
        costs = [cost_at(a) for a in grid]
        k_best = min(range(len(grid)), key=lambda k: (costs[k], k))
        b_lo = grid[max(0, k_best - 1)]
        b_hi = grid[min(len(grid) - 1, k_best + 1)]
        a_star, dv_star = _golden_min(cost_at, b_lo, b_hi)
        if costs[k_best] < dv_star:
            a_star, dv_star = grid[k_best], costs[k_best]

        if best is None or dv_star < best[0]:
            best = (dv_star, side, i_d, a_star, duration_at(a_star))

    if best is None:
        return TransferSolution(
            from_id=from_id,
            to_id=to_id,
            side=DriftSide.BELOW_TARGET,
            a_drift=math.nan,
            i_drift=math.nan,
            e_drift=0.0,
            t_depart=t_depart,
            duration=math.inf,
            dv_total=math.inf,
            dv_breakdown=(math.inf, math.inf, math.inf, math.inf),
            feasible=False,
        )

    dv_star, side, i_d, a_star, t_star = best
    _, breakdown = transfer_cost(from_el, to_el, a_star, i_d, const)
    return TransferSolution(
        from_id=from_id,
        to_id=to_id,
        side=side,
        a_drift=a_star,
        i_drift=i_d,
        e_drift=0.0,
        t_depart=t_depart,
        duration=t_star,
        dv_total=sum(breakdown),
        dv_breakdown=breakdown,
        feasible=dv_star <= dv_max,
    )

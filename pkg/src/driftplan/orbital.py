"""Keplerian orbit utilities for near-circular low Earth orbits.

The planner only needs a small slice of astrodynamics:

* the secular drift of the ascending node caused by the Earth's
  oblateness (the J2 zonal harmonic), which is the effect the drift-orbit
  transfer strategy exploits,
* the vis-viva equation for speeds on circular and transfer orbits,
* the cost of a velocity-vector rotation combined with a magnitude
  change, used to fold inclination corrections into apsis burns.

Everything here is SI: metres, seconds, radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .units import wrap_angle

TWO_PI = 2.0 * math.pi

#: Minimum clearance above the Earth's surface for any orbit handled by
#: the transfer routines (collision guard, not an operational floor).
EARTH_GUARD_ALTITUDE = 100e3


@dataclass(frozen=True)
class Constants:
    """Physical constants of the central body.

    Attributes:
        earth_radius: equatorial radius in m.
        mu: gravitational parameter in m^3/s^2.
        j2: second zonal harmonic coefficient (dimensionless).
    """

    earth_radius: float = 6378137.0
    mu: float = 3.986e14
    j2: float = 1.086e-3

    @property
    def nodal_drift_coefficient(self) -> float:
        """Coefficient of the nodal regression rate, in m^3.5/s.

        The ascending node of an orbit with elements (a, e, i) drifts at

            raan_rate = -K * cos(i) / (a**3.5 * (1 - e**2)**2)

        with K = (3/2) * j2 * sqrt(mu) * earth_radius**2.
        """
        return 1.5 * self.j2 * math.sqrt(self.mu) * self.earth_radius**2


DEFAULT_CONSTANTS = Constants()


@dataclass(frozen=True)
class OrbitalElements:
    """Mean elements of a near-circular orbit at a reference date.

    Only the elements that matter to nodal-drift planning are kept:
    semi-major axis ``a`` (m), eccentricity ``e``, inclination ``i``
    (rad), right ascension of the ascending node ``raan`` (rad, stored
    normalized to [0, 2*pi)) and the ``epoch`` (s) the node value refers
    to.

    Raises:
        DomainError: if ``a`` is not positive or ``e`` is outside [0, 1).
    """

    a: float
    e: float
    i: float
    raan: float
    epoch: float = 0.0

    def __post_init__(self) -> None:
        if not self.a > 0.0:
            raise DomainError(f"semi-major axis must be positive, got {self.a}")
        if not 0.0 <= self.e < 1.0:
            raise DomainError(f"eccentricity must lie in [0, 1), got {self.e}")
        object.__setattr__(self, "raan", wrap_angle(self.raan))


def raan_precession_rate(
    a: float, e: float, i: float, const: Constants = DEFAULT_CONSTANTS
) -> float:
    """Secular rate of the ascending node due to J2, in rad/s.

    Positive for retrograde orbits (i > 90 deg), which is what makes
    sun-synchronous orbits possible.

    Args:
        a: semi-major axis in m.
        e: eccentricity.
        i: inclination in rad.
        const: physical constants.

    Raises:
        DomainError: for non-positive ``a`` or ``e`` outside [0, 1).
    """
    if not a > 0.0:
        raise DomainError(f"semi-major axis must be positive, got {a}")
    if not 0.0 <= e < 1.0:
        raise DomainError(f"eccentricity must lie in [0, 1), got {e}")
    return -const.nodal_drift_coefficient * math.cos(i) / (a**3.5 * (1.0 - e * e) ** 2)


def precession_rate(el: OrbitalElements, const: Constants = DEFAULT_CONSTANTS) -> float:
    """Nodal precession rate of ``el``, in rad/s."""
    return raan_precession_rate(el.a, el.e, el.i, const)


def raan_at(el: OrbitalElements, t: float, const: Constants = DEFAULT_CONSTANTS) -> float:
    """Ascending node of ``el`` propagated to date ``t`` (s), in [0, 2*pi)."""
    return wrap_angle(el.raan + precession_rate(el, const) * (t - el.epoch))


def orbital_velocity(a: float, r: float, const: Constants = DEFAULT_CONSTANTS) -> float:
    """Speed on an orbit of semi-major axis ``a`` at radius ``r`` (vis-viva).

    Args:
        a: semi-major axis in m.
        r: current radius in m; must satisfy r < 2*a (bound orbit).

    Returns:
        Speed in m/s.

    Raises:
        DomainError: if the (a, r) pair does not describe a bound orbit
            point (r <= 0, a <= 0 or r >= 2a).
    """
    if a <= 0.0 or r <= 0.0:
        raise DomainError(f"radii must be positive, got a={a}, r={r}")
    v2 = const.mu * (2.0 / r - 1.0 / a)
    if v2 <= 0.0:
        raise DomainError(f"point r={r} is not reachable on orbit a={a}")
    return math.sqrt(v2)


def combined_maneuver_dv(v_before: float, v_after: float, delta_i: float) -> float:
    """Cost of changing speed and rotating the orbital plane in one burn.

    Args:
        v_before: speed before the burn, m/s.
        v_after: speed after the burn, m/s.
        delta_i: plane rotation carried by the burn, rad.

    Returns:
        Velocity increment in m/s (law of cosines on the velocity
        triangle).
    """
    dv2 = (
        v_before * v_before
        + v_after * v_after
        - 2.0 * v_before * v_after * math.cos(delta_i)
    )
    # dv2 can round to a tiny negative when the burn is a no-op.
    return math.sqrt(max(dv2, 0.0))


def hohmann_dv(
    a_from: float,
    a_to: float,
    i_from: float = 0.0,
    i_to: float = 0.0,
    plane_change_at_apogee: bool = True,
    const: Constants = DEFAULT_CONSTANTS,
) -> tuple[float, float]:
    """Two-burn transfer between circular orbits with an inclination change.

    The whole plane rotation ``i_to - i_from`` is folded into a single
    burn: the one at the larger radius when ``plane_change_at_apogee`` is
    set (rotating the plane is cheaper where the vehicle is slow), the
    one at the smaller radius otherwise.

    Args:
        a_from: radius of the departure circular orbit, m.
        a_to: radius of the arrival circular orbit, m.
        i_from: departure inclination, rad.
        i_to: arrival inclination, rad.
        plane_change_at_apogee: where to place the plane rotation.
        const: physical constants.

    Returns:
        ``(dv_first, dv_second)`` in m/s: the burn leaving the departure
        orbit and the burn circularizing on the arrival orbit.

    Raises:
        DomainError: if either circular orbit dips below the guard
            radius ``earth_radius + EARTH_GUARD_ALTITUDE``.
    """
    r_guard = const.earth_radius + EARTH_GUARD_ALTITUDE
    if a_from < r_guard or a_to < r_guard:
        raise DomainError(
            f"orbit below guard radius {r_guard:.0f} m: a_from={a_from}, a_to={a_to}"
        )

    delta_i = i_to - i_from
    a_t = 0.5 * (a_from + a_to)
    v_from = orbital_velocity(a_from, a_from, const)
    v_to = orbital_velocity(a_to, a_to, const)
    v_t_from = orbital_velocity(a_t, a_from, const)
    v_t_to = orbital_velocity(a_t, a_to, const)

    # The plane change rides on the burn at the larger radius (or the
    # smaller one when requested); at equal radii it goes on the second.
    first_is_larger = a_from > a_to
    plane_on_first = first_is_larger == plane_change_at_apogee and a_from != a_to

    if plane_on_first:
        dv_first = combined_maneuver_dv(v_from, v_t_from, delta_i)
        dv_second = abs(v_to - v_t_to)
    else:
        dv_first = abs(v_t_from - v_from)
        dv_second = combined_maneuver_dv(v_t_to, v_to, delta_i)
    return dv_first, dv_second

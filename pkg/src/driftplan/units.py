"""Unit helpers.

All physics modules work in SI (metres, seconds, radians).  Kilometres,
days and degrees only appear at I/O boundaries; these constants and
converters keep those boundaries explicit.
"""

import math

KM = 1000.0
"""Metres per kilometre."""

DAY = 86400.0
"""Seconds per day."""


def km_to_m(x: float) -> float:
    return x * KM


def m_to_km(x: float) -> float:
    return x / KM


def days_to_s(x: float) -> float:
    return x * DAY


def s_to_days(x: float) -> float:
    return x / DAY


def deg_to_rad(x: float) -> float:
    return math.radians(x)


def rad_to_deg(x: float) -> float:
    return math.degrees(x)


def wrap_angle(x: float) -> float:
    """Reduce an angle to the interval [0, 2*pi)."""
    y = math.fmod(x, 2.0 * math.pi)
    if y < 0.0:
        y += 2.0 * math.pi
    return y

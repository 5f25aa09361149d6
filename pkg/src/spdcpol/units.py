"""Physical constants and boundary unit conversions.

The physics modules work in SI throughout (meters, seconds, rad/s, watts).
Interfaces accept the units experimentalists quote: nm, fs, ns, mW,
ps/(nm km) for the dispersion parameter, and degrees for analyzer angles.
Conversions happen once, here, at the boundary.
"""

import math

C_LIGHT = 299_792_458.0  # vacuum speed of light, m/s
HBAR = 1.054_571_817e-34  # reduced Planck constant, J s
TWO_PI = 2.0 * math.pi


def nm(value: float) -> float:
    """Nanometers to meters."""
    return value * 1e-9


def fs(value: float) -> float:
    """Femtoseconds to seconds."""
    return value * 1e-15


def to_fs(seconds: float) -> float:
    """Seconds to femtoseconds."""
    return seconds * 1e15


def ns(value: float) -> float:
    """Nanoseconds to seconds."""
    return value * 1e-9


def mw(value: float) -> float:
    """Milliwatts to watts."""
    return value * 1e-3


def d_ps_nm_km(value: float) -> float:
    """Dispersion parameter D from ps/(nm km) to s/m^2."""
    return value * 1e-6


def deg_to_rad(value: float) -> float:
    return math.radians(value)


def rad_to_deg(value: float) -> float:
    return math.degrees(value)


def omega_from_lambda(lambda_m: float) -> float:
    """Vacuum wavelength (m) to angular frequency (rad/s)."""
    return TWO_PI * C_LIGHT / lambda_m


def lambda_from_omega(omega: float) -> float:
    """Angular frequency (rad/s) to vacuum wavelength (m)."""
    return TWO_PI * C_LIGHT / omega

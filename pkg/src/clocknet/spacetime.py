"""Weak-field proper time and the clock phases it produces.

Optical clock phases reach ~1e16 rad over seconds of evolution, far beyond
what a double can hold to sub-radian accuracy.  Every phase here is therefore
split into a coordinate-time part ``omega * t`` (reduced mod 2*pi with mpmath
at extended precision) and a small redshift part ``omega * t * (rate - 1)``
computed directly from ``Phi/c^2 - v^2/(2 c^2)``, never from ``rate - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

C = 299_792_458.0
G_SURFACE = 9.80665
GM_EARTH = 3.986004418e14
R_EARTH = 6.371e6

WEAK_FIELD_LIMIT = 1e-6
TWO_PI = 2.0 * math.pi


class RegimeError(ValueError):
    """Site lies outside the weak-field, slow-motion regime."""


@dataclass(frozen=True)
class ClockSpec:
    """Level angular frequencies (E/hbar, rad/s) of the spin states g, a, b."""

    omega_g: float
    omega_a: float
    omega_b: float

    def __post_init__(self):
        if not self.omega_b > self.omega_a:
            raise ValueError("clock transition needs omega_b > omega_a")

    @property
    def delta_omega(self) -> float:
        return self.omega_b - self.omega_a

    @classmethod
    def from_wavelength(cls, wavelength: float, omega_ga: float = 0.0) -> "ClockSpec":
        """g and a split by ``omega_ga`` (default degenerate), b one optical photon above a."""
        return cls(omega_g=0.0, omega_a=omega_ga, omega_b=omega_ga + TWO_PI * C / wavelength)

    def levels(self) -> tuple[float, float, float]:
        return (self.omega_g, self.omega_a, self.omega_b)


@dataclass(frozen=True)
class SiteWorldline:
    """Gravitational potential ``potential`` (m^2/s^2) and speed ``speed`` (m/s) of a clock site."""

    potential: float
    speed: float = 0.0

    def __post_init__(self):
        if abs(self.potential) / C**2 > WEAK_FIELD_LIMIT or (self.speed / C) ** 2 > WEAK_FIELD_LIMIT:
            raise RegimeError(f"site {self} outside weak-field/slow-motion regime")

    @classmethod
    def at_height(cls, h: float, g: float = G_SURFACE) -> "SiteWorldline":
        """Uniform-field site, potential ``g*h`` relative to the reference height."""
        return cls(potential=g * h)

    @classmethod
    def above_earth(cls, h: float, orbiting: bool = False) -> "SiteWorldline":
        """Static (or circular-orbit) observer at altitude ``h`` in the Schwarzschild field."""
        r = R_EARTH + h
        v = math.sqrt(GM_EARTH / r) if orbiting else 0.0
        return cls(potential=-GM_EARTH / r, speed=v)


@dataclass(frozen=True)
class PhaseBundle:
    theta0: float
    theta: float
    theta1: float
    theta2: float
    delta_phi: float
    varphi: float
    delta: float
    # theta1 - theta2 carried separately so it keeps full relative precision
    clock_difference: float

    def __post_init__(self):
        if self.delta_phi != self.theta0 + self.theta:
            raise ValueError("delta_phi must equal theta0 + theta")

    @classmethod
    def from_phases(cls, theta0=0.0, theta=0.0, theta1=0.0, theta2=0.0, varphi=0.0, delta=0.0):
        return cls(theta0, theta, theta1, theta2, theta0 + theta, varphi, delta, theta1 - theta2)


def rate_offset(site: SiteWorldline) -> float:
    """``dtau/dt - 1`` evaluated without cancellation."""
    return site.potential / C**2 - site.speed**2 / (2.0 * C**2)


def proper_time_rate(site: SiteWorldline) -> float:
    return 1.0 + rate_offset(site)


def delta_tau(site1: SiteWorldline, site2: SiteWorldline, T: float) -> float:
    """Proper-time difference ``tau1 - tau2`` accumulated over coordinate time ``T``."""
    return (rate_offset(site1) - rate_offset(site2)) * T


def wrapped_phase(omega: float, t: float) -> float:
    """``omega * t`` reduced to [0, 2*pi) using the exact product of the two doubles."""
    if omega == 0.0 or t == 0.0:
        return 0.0
    with mpmath.workdps(60):
        x = mpmath.mpf(omega) * mpmath.mpf(t)
        return float(mpmath.fmod(x, 2 * mpmath.pi) % (2 * mpmath.pi))


def level_phase(omega: float, site: SiteWorldline, T: float) -> float:
    """Phase ``omega * tau`` (mod 2*pi) for a level of frequency ``omega`` over coordinate time ``T``."""
    return (wrapped_phase(omega, T) + omega * T * rate_offset(site)) % TWO_PI


def phase_bundle(clock: ClockSpec, site1: SiteWorldline, site2: SiteWorldline,
                 T_entangle: float, T_free: float, varphi: float = 0.0,
                 delta: float = 0.0) -> PhaseBundle:
    dtau_e = delta_tau(site1, site2, T_entangle)
    dtau_f = delta_tau(site1, site2, T_free)
    theta0 = (clock.omega_g - clock.omega_a) * dtau_e
    theta = (clock.omega_a - clock.omega_g) * (-dtau_f)
    dw = clock.delta_omega
    theta1 = (level_phase(dw, site1, T_free) + varphi) % TWO_PI
    theta2 = level_phase(dw, site2, T_free)
    return PhaseBundle(theta0=theta0, theta=theta, theta1=theta1, theta2=theta2,
                       delta_phi=theta0 + theta, varphi=varphi, delta=delta,
                       clock_difference=dw * dtau_f + varphi)

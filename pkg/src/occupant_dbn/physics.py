"""Single-zone CO2 model with buoyancy-driven exchange through large openings.

Units: concentrations in ppm, flows in m3/s, CO2 generation in m3/s of pure
CO2, temperatures in degC, time in seconds, lengths in metres.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from occupant_dbn.errors import (
    InvalidRatioError,
    NegativeDtError,
    NonPositiveVolumeError,
    PhysicsError,
)

GRAVITY = 9.81
R_DRY_AIR = 287.05
P_ATM = 101325.0
PPM = 1e6
# below this outflow the exponential solution is replaced by its linear limit
Q_EPSILON = 1e-9
# sedentary adult, about 0.3 L/min of exhaled CO2
CO2_PER_PERSON = 5e-6
CO2_LEVELS = ("low", "medium", "high")
DEFAULT_THRESHOLDS = (1000.0, 1700.0)


def air_density(temperature: float) -> float:
    """Dry air density (kg/m3) at atmospheric pressure, ideal gas."""
    return P_ATM / (R_DRY_AIR * (temperature + 273.15))


@dataclass(frozen=True)
class OpeningGeometry:
    height: float
    width: float
    cd: float = 0.6
    neutral_height: float | None = None
    boundary: str = "corridor"

    def __post_init__(self):
        if not self.height > 0 or not self.width > 0:
            raise PhysicsError("opening height and width must be positive")
        if not 0 < self.cd <= 1:
            raise PhysicsError(f"discharge coefficient must be in (0, 1], got {self.cd}")
        if self.neutral_height is None:
            object.__setattr__(self, "neutral_height", self.height / 2)
        if not 0 <= self.neutral_height <= self.height:
            raise PhysicsError("neutral plane must lie within the opening")


@dataclass(frozen=True)
class ZoneParams:
    volume: float = 50.0
    co2_per_person: float = CO2_PER_PERSON
    gravity: float = GRAVITY
    boundary_ppm: Mapping[str, float] = field(
        default_factory=lambda: {"corridor": 500.0, "outdoor": 400.0}
    )
    thresholds: tuple[float, float] = DEFAULT_THRESHOLDS
    density: Callable[[float], float] = field(default=air_density, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "boundary_ppm", dict(self.boundary_ppm))
        object.__setattr__(self, "thresholds", tuple(self.thresholds))
        if not self.volume > 0:
            raise NonPositiveVolumeError(f"zone volume must be positive, got {self.volume}")
        if self.co2_per_person < 0:
            raise PhysicsError("CO2 generation rate must be nonnegative")
        if len(self.thresholds) != 2 or not self.thresholds[0] < self.thresholds[1]:
            raise PhysicsError(f"thresholds must be two increasing values, got {self.thresholds}")


@dataclass(frozen=True)
class FlowPair:
    q_in: float = 0.0
    q_out: float = 0.0


def _band(z1: float, z2: float, hn: float) -> float:
    # height term |HN - z1|^1.5 - |HN - z2|^1.5, for a band on one side of HN
    return abs(abs(hn - z1) ** 1.5 - abs(hn - z2) ** 1.5)


def stack_airflow(
    geom: OpeningGeometry,
    t_in: float,
    t_out: float,
    opening_ratio: float = 1.0,
    gravity: float = GRAVITY,
    density: Callable[[float], float] = air_density,
) -> FlowPair:
    """Bidirectional buoyancy flow through a large opening.

    The warmer side exhausts above the neutral plane and draws air in
    below it. Both flows scale with ``opening_ratio``, read as the fraction
    of the slot during which the opening is open.
    """
    if not 0.0 <= opening_ratio <= 1.0:
        raise InvalidRatioError(f"opening ratio must be in [0, 1], got {opening_ratio}")
    dt = t_in - t_out
    if dt == 0 or opening_ratio == 0:
        return FlowPair(0.0, 0.0)
    rho_in, rho_out = density(t_in), density(t_out)
    rho = 0.5 * (rho_in + rho_out)
    drho = abs(rho_in - rho_out)
    coef = 2.0 / (3.0 * rho) * geom.cd * geom.width * math.sqrt(2.0 * rho * drho * gravity)
    hn = geom.neutral_height
    below = coef * _band(0.0, hn, hn)
    above = coef * _band(hn, geom.height, hn)
    if dt > 0:
        q_in, q_out = below, above
    else:
        q_in, q_out = above, below
    return FlowPair(opening_ratio * q_in, opening_ratio * q_out)


def total_flows(pairs: Iterable[tuple[FlowPair, float]]) -> tuple[float, float, float]:
    """Superpose openings: summed flows and inflow-weighted supply concentration.

    ``pairs`` holds ``(flows, boundary_ppm)`` per opening. With no inflow
    the supply concentration is the first boundary's.
    """
    pairs = list(pairs)
    q_in = sum(f.q_in for f, _ in pairs)
    q_out = sum(f.q_out for f, _ in pairs)
    if any(f.q_in < 0 or f.q_out < 0 for f, _ in pairs):
        raise PhysicsError("flows must be nonnegative")
    if q_in > 0:
        c_supply = sum(f.q_in * c for f, c in pairs) / q_in
    else:
        c_supply = pairs[0][1] if pairs else 0.0
    return q_in, q_out, c_supply


def steady_state(flows: FlowPair, s: float, c_supply: float) -> float:
    return (flows.q_in * c_supply + s * PPM) / flows.q_out


def co2_step(c_k: float, flows: FlowPair, s: float, c_supply: float, dt: float, volume: float) -> float:
    """Exact zone concentration after ``dt`` seconds with constant coefficients.

    Solves V dC/dt = Q_in C_supply + S 1e6 - Q_out C. When the outflow is
    negligible the linear limit ``C_k + (Q_in C_supply + S 1e6) dt / V`` is
    used instead.
    """
    if not volume > 0:
        raise NonPositiveVolumeError(f"volume must be positive, got {volume}")
    if not dt > 0:
        raise NegativeDtError(f"time step must be positive, got {dt}")
    source = flows.q_in * c_supply + s * PPM
    if flows.q_out < Q_EPSILON:
        return c_k + source * dt / volume
    c_inf = source / flows.q_out
    return c_inf + (c_k - c_inf) * math.exp(-flows.q_out * dt / volume)


def generation_rate(occupant_count: int, per_person: float = CO2_PER_PERSON) -> float:
    if occupant_count < 0:
        raise PhysicsError("occupant count must be nonnegative")
    return occupant_count * per_person


def discretize_co2(c: float, thresholds: tuple[float, float] = DEFAULT_THRESHOLDS) -> str:
    """Map a concentration to low / medium / high.

    Intervals are half-open: [0, t1) low, [t1, t2) medium, [t2, inf) high.
    """
    if c < thresholds[0]:
        return "low"
    if c < thresholds[1]:
        return "medium"
    return "high"

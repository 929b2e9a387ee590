"""Rotating directional antenna with a cosine-power main lobe.

The azimuth power pattern is cos(delta/2)**p with the exponent solved
analytically from the half-power beamwidth, so the gain at hpbw/2 off
boresight is exactly max_gain - 3 dB. Outside the main lobe a flat
side-lobe floor applies. A 360-degree beamwidth is an omnidirectional
antenna. Elevation is assumed flat.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class AntennaMode(enum.Enum):
    STATIC = "static"
    ROTATING = "rotating"


@dataclass(frozen=True)
class AntennaState:
    max_gain_dbi: float
    hpbw_deg: float
    rotation_speed_deg_per_s: float = 0.0
    initial_phase_deg: float = 0.0
    mode: AntennaMode = AntennaMode.STATIC
    sidelobe_floor_db: float = 40.0  # dB below max gain

    def __post_init__(self):
        if not (0.0 < self.hpbw_deg <= 360.0):
            raise ValueError(f"hpbw_deg must be in (0, 360], got {self.hpbw_deg}")
        if not math.isfinite(self.max_gain_dbi):
            raise ValueError("max_gain_dbi must be finite")
        if self.sidelobe_floor_db < 0.0:
            raise ValueError("sidelobe_floor_db is a positive attenuation in dB")

    def with_boresight(self, azimuth_deg: float) -> "AntennaState":
        """Copy of this antenna held static at the given boresight azimuth."""
        return AntennaState(
            max_gain_dbi=self.max_gain_dbi,
            hpbw_deg=self.hpbw_deg,
            rotation_speed_deg_per_s=self.rotation_speed_deg_per_s,
            initial_phase_deg=azimuth_deg % 360.0,
            mode=AntennaMode.STATIC,
            sidelobe_floor_db=self.sidelobe_floor_db,
        )

    @property
    def is_omni(self) -> bool:
        return self.hpbw_deg == 360.0

    @property
    def pattern_exponent(self) -> float:
        """Exponent p with 10*log10(cos(hpbw/4)**p) = -3 dB exactly."""
        if self.is_omni:
            return 0.0
        return -0.3 / math.log10(math.cos(math.radians(self.hpbw_deg) / 4.0))

    def rotation_period_s(self) -> float:
        if self.mode is not AntennaMode.ROTATING or self.rotation_speed_deg_per_s == 0.0:
            return math.inf
        return 360.0 / abs(self.rotation_speed_deg_per_s)


def wrap_angle_deg(delta: float) -> float:
    """Wrap an angle difference to (-180, 180]."""
    d = delta % 360.0
    return d - 360.0 if d > 180.0 else d


def boresight_at(ant: AntennaState, t: float) -> float:
    """Boresight azimuth at time t, degrees in [0, 360)."""
    if t < 0.0:
        raise ValueError(f"t must be >= 0, got {t}")
    if ant.mode is AntennaMode.ROTATING:
        return (ant.initial_phase_deg + ant.rotation_speed_deg_per_s * t) % 360.0
    return ant.initial_phase_deg % 360.0


def pattern_loss_db(ant: AntennaState, offaxis_deg: float) -> float:
    """Pattern attenuation (>= 0 dB) at an off-axis angle, floor-limited."""
    if ant.is_omni:
        return 0.0
    delta = abs(wrap_angle_deg(offaxis_deg))
    rel = math.cos(math.radians(delta) / 2.0) ** ant.pattern_exponent
    floor = 10.0 ** (-ant.sidelobe_floor_db / 10.0)
    return -10.0 * math.log10(max(rel, floor))


def gain_db(ant: AntennaState, direction_az: float, t: float = 0.0) -> float:
    """Antenna gain toward an azimuth at time t, in dBi."""
    delta = direction_az - boresight_at(ant, t)
    return ant.max_gain_dbi - pattern_loss_db(ant, delta)


def gain_db_array(ant: AntennaState, directions_az, t: float = 0.0):
    """Vectorized :func:`gain_db` over an array of azimuths."""
    import numpy as np

    az = np.asarray(directions_az, dtype=float)
    if ant.is_omni:
        return np.full(az.shape, ant.max_gain_dbi)
    delta = np.abs((az - boresight_at(ant, t) + 180.0) % 360.0 - 180.0)
    rel = np.cos(np.radians(delta) / 2.0) ** ant.pattern_exponent
    floor = 10.0 ** (-ant.sidelobe_floor_db / 10.0)
    return ant.max_gain_dbi + 10.0 * np.log10(np.maximum(rel, floor))


def halfwidth_for_loss_db(ant: AntennaState, loss_db: float) -> float:
    """Off-axis angle (deg) at which the pattern has rolled off by loss_db.

    Inverse of :func:`pattern_loss_db` on the main lobe; returns 180 for an
    omni antenna or when the requested loss is at/below the side-lobe floor.
    Used for closed-form alignment-window (duty cycle) calculations.
    """
    if loss_db <= 0.0:
        return 0.0
    if ant.is_omni or loss_db >= ant.sidelobe_floor_db:
        return 180.0
    target = 10.0 ** (-loss_db / (10.0 * ant.pattern_exponent))
    return math.degrees(2.0 * math.acos(min(1.0, target)))

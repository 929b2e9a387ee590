"""Link-budget primitives: path loss, molecular absorption, frequency grid."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import SPEED_OF_LIGHT


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(x)


def fspl_db(distance_m: float, frequency_hz) -> np.ndarray | float:
    """Free-space path loss 20*log10(4*pi*d*f/c) in dB (positive loss)."""
    if distance_m <= 0.0:
        raise ValueError(f"distance must be > 0, got {distance_m}")
    f = np.asarray(frequency_hz, dtype=float)
    return 20.0 * np.log10(4.0 * math.pi * distance_m * f / SPEED_OF_LIGHT)


def fspl_amplitude(distance_m: float, frequency_hz) -> np.ndarray | float:
    """Linear field amplitude c / (4*pi*d*f) corresponding to the FSPL."""
    if distance_m <= 0.0:
        raise ValueError(f"distance must be > 0, got {distance_m}")
    f = np.asarray(frequency_hz, dtype=float)
    return SPEED_OF_LIGHT / (4.0 * math.pi * distance_m * f)


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform partition of [carrier - B/2, carrier + B/2] into n_bins sub-bands."""

    carrier_hz: float
    bandwidth_hz: float
    n_bins: int = 64

    def __post_init__(self):
        if self.n_bins < 1:
            raise ValueError("n_bins must be >= 1")
        if self.bandwidth_hz <= 0.0:
            raise ValueError("bandwidth_hz must be > 0")
        if self.carrier_hz - self.bandwidth_hz / 2.0 <= 0.0:
            raise ValueError("lowest bin center must be positive")

    @property
    def bin_centers_hz(self) -> np.ndarray:
        lo = self.carrier_hz - self.bandwidth_hz / 2.0
        step = self.bandwidth_hz / self.n_bins
        return lo + step * (np.arange(self.n_bins) + 0.5)


@dataclass(frozen=True)
class AbsorptionTable:
    """Piecewise-constant molecular absorption, Hz -> dB/m.

    ``points`` is a sorted tuple of (frequency_hz, db_per_m) breakpoints;
    each value applies from its breakpoint up to the next one. Frequencies
    below the first breakpoint use the first value. The default is a flat
    placeholder for the 124-156 GHz band; real coefficients belong in the
    scenario config.
    """

    points: tuple = ((0.0, 0.0),)

    def __post_init__(self):
        if not self.points:
            raise ValueError("absorption table must have at least one breakpoint")
        freqs = [p[0] for p in self.points]
        if sorted(freqs) != freqs or len(set(freqs)) != len(freqs):
            raise ValueError("absorption breakpoints must be strictly increasing")
        if any(p[1] < 0.0 for p in self.points):
            raise ValueError("absorption must be >= 0 dB/m")

    @staticmethod
    def flat(db_per_m: float) -> "AbsorptionTable":
        return AbsorptionTable(points=((0.0, float(db_per_m)),))

    def db_per_m(self, frequency_hz) -> np.ndarray:
        f = np.atleast_1d(np.asarray(frequency_hz, dtype=float))
        freqs = np.array([p[0] for p in self.points])
        vals = np.array([p[1] for p in self.points])
        idx = np.clip(np.searchsorted(freqs, f, side="right") - 1, 0, len(vals) - 1)
        return vals[idx]

    def loss_db(self, distance_m: float, frequency_hz) -> np.ndarray:
        return self.db_per_m(frequency_hz) * distance_m


# Placeholder flat value for the 124-156 GHz band (roughly the ITU-R scale
# of specific gaseous attenuation there); override via the scenario config.
DEFAULT_ABSORPTION = AbsorptionTable(points=((0.0, 0.0), (124e9, 0.0015), (156e9, 0.0)))

"""Received power, SNR, achievable rate and packet airtime.

Reception is strongest-path: the link budget is evaluated on the single
Mpc with the highest gain-weighted band-integrated power, not on a
coherent sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .antenna import AntennaState
from .channels import Cir, strongest_path


class LinkDownError(RuntimeError):
    """Raised when a transmission is attempted on a zero-rate link."""


@dataclass(frozen=True)
class LinkBudget:
    tx_power_dbm: float
    noise_floor_dbm: float
    rx_power_dbm: float
    snr_db: float
    rate_bps: float

    def __post_init__(self):
        if abs(self.snr_db - (self.rx_power_dbm - self.noise_floor_dbm)) > 1e-9:
            raise ValueError("snr_db must equal rx_power_dbm - noise_floor_dbm")
        if self.rate_bps < 0.0:
            raise ValueError("rate_bps must be >= 0")


def rx_power(cir: Cir, tx_ant: AntennaState | None, rx_ant: AntennaState | None,
             tx_power_dbm: float = 0.0, t: float = 0.0) -> float:
    """Strongest-path received power in dBm, antenna gains evaluated at t."""
    _, power = strongest_path(cir, tx_ant, rx_ant, t=t, tx_power_dbm=tx_power_dbm)
    return power


def achievable_rate(snr_db: float, bandwidth_hz: float,
                    max_rate_bps: float | None = None,
                    decode_threshold_db: float = 0.0) -> float:
    """Capped Shannon rate; zero below the decode threshold."""
    if bandwidth_hz <= 0.0:
        raise ValueError(f"bandwidth must be > 0, got {bandwidth_hz}")
    if snr_db < decode_threshold_db:
        return 0.0
    rate = bandwidth_hz * math.log2(1.0 + 10.0 ** (snr_db / 10.0))
    if max_rate_bps is not None:
        rate = min(rate, max_rate_bps)
    return rate


def airtime(n_bytes: int, rate_bps: float) -> float:
    """Transmission time of a packet at a given PHY rate."""
    if n_bytes < 0:
        raise ValueError("byte count must be >= 0")
    if rate_bps <= 0.0:
        raise LinkDownError("cannot transmit at zero rate")
    return 8.0 * n_bytes / rate_bps


def link_budget(cir: Cir, tx_ant: AntennaState | None, rx_ant: AntennaState | None,
                tx_power_dbm: float, noise_floor_dbm: float, bandwidth_hz: float,
                max_rate_bps: float | None = None, decode_threshold_db: float = 0.0,
                t: float = 0.0) -> LinkBudget:
    """Full budget of the strongest path at time t."""
    p = rx_power(cir, tx_ant, rx_ant, tx_power_dbm, t)
    snr = p - noise_floor_dbm
    rate = achievable_rate(snr, bandwidth_hz, max_rate_bps, decode_threshold_db)
    return LinkBudget(tx_power_dbm=tx_power_dbm, noise_floor_dbm=noise_floor_dbm,
                      rx_power_dbm=p, snr_db=snr, rate_bps=rate)

"""Deterministic link-level event loop.

The run advances in channel-update slots. At every slot boundary the node
positions, the LOS state and the CIR are regenerated; within a slot the
link is evaluated into one or more constant-rate windows (several per slot
when an antenna rotates, one otherwise). Packet service inside a window is
a FIFO queue with constant service time, which the engine resolves in
closed form, so results are exact per-packet values independent of any
time-stepping resolution. Identical configs (including the seed) produce
bit-identical results.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import antenna as ant
from . import geometry as geo
from .channels import (Cir, FscParams, HbcParams, gen_fsc, gen_hbc,
                       gen_los_baseline, strongest_path)
from .geometry import SPEED_OF_LIGHT, Room
from .link import achievable_rate, rx_power
from .radio import AbsorptionTable, FrequencyGrid


class ConfigError(ValueError):
    """Scenario configuration violates an invariant."""


class ChannelType(enum.Enum):
    LOS_BASELINE = "LOS_BASELINE"
    FSC = "FSC"
    HBC = "HBC"


class Pointing(enum.Enum):
    FIXED = "fixed"          # boresight from initial phase / rotation only
    TRACK_PEER = "track_peer"  # boresight re-aimed at the peer every update


@dataclass(frozen=True)
class AntennaConfig:
    pattern: ant.AntennaState
    pointing: Pointing = Pointing.TRACK_PEER


@dataclass(frozen=True)
class ScenarioConfig:
    room: Room
    tx_waypoints: tuple
    rx_waypoints: tuple
    speed_mps: float
    channel_type: ChannelType
    grid: FrequencyGrid
    tx_antenna: AntennaConfig
    rx_antenna: AntennaConfig
    source_rate_bps: float
    packet_bytes: int
    duration_s: float
    channel_update_interval_s: float = 1e-3
    seed: int = 1
    tx_power_dbm: float = 0.0
    noise_floor_dbm: float = -160.0
    max_phy_rate_bps: float = 100e9
    decode_threshold_db: float = 0.0
    hbc: HbcParams = HbcParams()
    fsc: FscParams = FscParams()
    absorption: AbsorptionTable = AbsorptionTable()
    max_order: int = 2
    polarization: str = "TE"
    penetration_db: float = 30.0
    queue_timeout_s: float | None = None

    def __post_init__(self):
        if self.duration_s <= 0.0:
            raise ConfigError("duration_s must be > 0")
        if self.source_rate_bps <= 0.0:
            raise ConfigError("source_rate_bps must be > 0")
        if self.packet_bytes <= 0:
            raise ConfigError("packet_bytes must be > 0")
        if self.channel_update_interval_s <= 0.0:
            raise ConfigError("channel_update_interval_s must be > 0")
        if self.speed_mps < 0.0:
            raise ConfigError("speed_mps must be >= 0")
        if not self.tx_waypoints or not self.rx_waypoints:
            raise ConfigError("waypoint lists must be non-empty")
        for label, pts in (("tx", self.tx_waypoints), ("rx", self.rx_waypoints)):
            for p in pts:
                if not self.room.contains(p):
                    raise ConfigError(f"{label} waypoint {tuple(p)} is outside the room")
        if self.max_order not in (0, 1, 2):
            raise ConfigError("max_order must be 0, 1 or 2")
        if self.queue_timeout_s is not None and self.queue_timeout_s <= 0.0:
            raise ConfigError("queue_timeout_s must be > 0 when set")


@dataclass
class FlowStats:
    """Per-packet and per-slot results of one run."""

    packet_bits: int
    duration_s: float
    send_times: np.ndarray            # every generated packet
    served_send_times: np.ndarray     # packets whose transmission started
    recv_times: np.ndarray            # matching delivery instants
    latencies: np.ndarray             # recv - send
    dropped: int
    power_trace: np.ndarray           # rows: t, rx_dbm, strongest aoa [deg], los flag
    link_rates: np.ndarray            # per-slot achievable rate (0 = down)

    @property
    def generated(self) -> int:
        return len(self.send_times)

    @property
    def in_flight(self) -> int:
        return int(np.sum(self.recv_times > self.duration_s))

    @property
    def queued(self) -> int:
        return self.generated - len(self.recv_times) - self.dropped

    @property
    def delivered_bits(self) -> int:
        return int(np.sum(self.recv_times <= self.duration_s)) * self.packet_bits

    @property
    def mean_throughput_bps(self) -> float:
        return self.delivered_bits / self.duration_s

    def latency_percentiles(self, qs=(50.0, 90.0, 99.0)):
        if len(self.latencies) == 0:
            return {q: math.nan for q in qs}
        return {q: float(np.percentile(self.latencies, q)) for q in qs}


def position_at(waypoints, speed_mps: float, t: float):
    """Piecewise-linear waypoint interpolation at constant speed, clamped at the end."""
    pts = [tuple(map(float, p)) for p in waypoints]
    if len(pts) == 1 or speed_mps <= 0.0:
        return pts[0]
    travelled = speed_mps * t
    for a, b in zip(pts[:-1], pts[1:]):
        seg = math.dist(a, b)
        if travelled <= seg:
            if seg == 0.0:
                return a
            u = travelled / seg
            return tuple(a[i] + u * (b[i] - a[i]) for i in range(3))
        travelled -= seg
    return pts[-1]


def mac_link_up(tx_ant, rx_ant, cir: Cir, t: float, tx_power_dbm: float = 0.0,
                noise_floor_dbm: float = -160.0, decode_threshold_db: float = 0.0) -> bool:
    """True iff the strongest-path SNR at time t clears the decode threshold."""
    snr = rx_power(cir, tx_ant, rx_ant, tx_power_dbm, t) - noise_floor_dbm
    return snr >= decode_threshold_db


def ecdf(samples):
    """Empirical CDF: sorted values with cumulative fractions k/n."""
    arr = np.sort(np.asarray(list(samples), dtype=float))
    if arr.size == 0:
        raise ValueError("ecdf needs at least one sample")
    return arr, np.arange(1, arr.size + 1) / arr.size


def windowed_throughput(stats: FlowStats, window_s: float):
    """Delivered bits per window divided by the window length."""
    if window_s <= 0.0:
        raise ValueError("window must be > 0")
    n_windows = max(1, int(math.ceil(stats.duration_s / window_s - 1e-12)))
    edges = window_s * np.arange(n_windows + 1)
    recv = stats.recv_times[stats.recv_times <= stats.duration_s]
    counts, _ = np.histogram(recv, bins=edges)
    return edges[:-1], counts * stats.packet_bits / window_s


@dataclass
class _MacState:
    free_at: float = 0.0   # instant the server finishes its current packet
    next_pkt: int = 0      # index of the next packet to serve
    dropped: int = 0


def _serve_window(u0: float, u1: float, service_s: float, arrivals: np.ndarray,
                  inter_s: float, state: _MacState, timeout_s: float | None,
                  out_idx: list, out_starts: list) -> None:
    """Serve FIFO packets inside an up-window [u0, u1).

    Transmissions may only start inside the window; a started packet always
    completes. With a constant service time the Lindley recurrence has a
    closed form, evaluated here in batches.
    """
    n_total = len(arrivals)
    cursor = max(state.free_at, u0)
    while state.next_pkt < n_total and cursor < u1:
        if timeout_s is not None:
            first_alive = int(np.searchsorted(arrivals, cursor - timeout_s, side="left"))
            if first_alive > state.next_pkt:
                state.dropped += first_alive - state.next_pkt
                state.next_pkt = first_alive
                if state.next_pkt >= n_total:
                    break
        head_arrival = arrivals[state.next_pkt]
        if head_arrival > cursor:
            if head_arrival >= u1:
                break
            cursor = head_arrival
        # Longest back-to-back chain: packet j+i is ready at its turn while
        # A_j + i*inter <= cursor + i*service.
        if inter_s <= service_s:
            chain = n_total - state.next_pkt
        else:
            chain = int(math.floor((cursor - head_arrival) / (inter_s - service_s))) + 1
            chain = min(chain, n_total - state.next_pkt)
        room = int(math.ceil((u1 - cursor) / service_s))
        while room > 0 and cursor + (room - 1) * service_s >= u1:
            room -= 1
        n = min(chain, room)
        if timeout_s is not None and service_s > inter_s and n > 0:
            # queueing delay grows along the chain; stop before it exceeds the budget
            allowed = int(math.floor((timeout_s - (cursor - head_arrival))
                                     / (service_s - inter_s))) + 1
            n = min(n, max(allowed, 0))
        if n <= 0:
            break
        starts = cursor + service_s * np.arange(n)
        out_idx.append(np.arange(state.next_pkt, state.next_pkt + n))
        out_starts.append(starts)
        state.next_pkt += n
        cursor += n * service_s
        state.free_at = cursor


def _resolve_antenna(cfg_ant: AntennaConfig, peer_azimuth: float) -> ant.AntennaState:
    if cfg_ant.pointing is Pointing.TRACK_PEER:
        return cfg_ant.pattern.with_boresight(peer_azimuth)
    return cfg_ant.pattern


def _slot_windows(cir: Cir, tx_state, rx_state, t0: float, t1: float,
                  cfg: ScenarioConfig):
    """Constant-rate up-windows inside one slot.

    Static/tracking antennas give one window covering the slot. A rotating
    antenna sweeps its boresight inside the slot, so the slot is subdivided
    finely enough that the boresight moves a small fraction of the beam per
    step, each step evaluated at its midpoint.
    """
    def rate_at(t):
        snr = rx_power(cir, tx_state, rx_state, cfg.tx_power_dbm, t) - cfg.noise_floor_dbm
        return achievable_rate(snr, cfg.grid.bandwidth_hz, cfg.max_phy_rate_bps,
                               cfg.decode_threshold_db)

    speeds = []
    for state in (tx_state, rx_state):
        if state.mode is ant.AntennaMode.ROTATING and state.rotation_speed_deg_per_s != 0.0:
            step_deg = max(min(1.0, state.hpbw_deg / 8.0), 1e-3)
            speeds.append(abs(state.rotation_speed_deg_per_s) / step_deg)
    if not speeds:
        r = rate_at(t0)
        return [(t0, t1, r)] if r > 0.0 else []
    n_sub = int(min(512, max(1, math.ceil((t1 - t0) * max(speeds)))))
    edges = np.linspace(t0, t1, n_sub + 1)
    windows = []
    for a, b in zip(edges[:-1], edges[1:]):
        r = rate_at(0.5 * (a + b))
        if r > 0.0:
            windows.append((float(a), float(b), r))
    return windows


def _generate_cir(cfg: ScenarioConfig, rng, tx_pos, rx_pos, los_geo: bool,
                  tx_state, t0: float) -> Cir:
    d = math.dist(tx_pos, rx_pos)
    aoa = geo.azimuth_deg(tuple(tx_pos[i] - rx_pos[i] for i in range(3)))
    aod = geo.azimuth_deg(tuple(rx_pos[i] - tx_pos[i] for i in range(3)))
    if cfg.channel_type is ChannelType.LOS_BASELINE:
        return gen_los_baseline(cfg.grid, d, cfg.absorption, aoa_az_deg=aoa,
                                aod_az_deg=aod, tx_pos=tx_pos, rx_pos=rx_pos)
    if cfg.channel_type is ChannelType.FSC:
        return gen_fsc(los_geo, d, cfg.fsc, cfg.grid, rng, los_aoa_deg=aoa,
                       los_aod_deg=aod, tx_pos=tx_pos, rx_pos=rx_pos)
    paths = geo.trace(cfg.room, tx_pos, rx_pos, cfg.max_order, cfg.polarization,
                      direct_penetration_db=cfg.penetration_db)
    return gen_hbc(paths, cfg.hbc, cfg.grid, tx_pattern=tx_state, rng=rng,
                   absorption=cfg.absorption, t=t0, tx_pos=tx_pos, rx_pos=rx_pos)


def run(cfg: ScenarioConfig) -> FlowStats:
    """Run the scenario; a pure function of the config."""
    packet_bits = 8 * cfg.packet_bytes
    inter_s = packet_bits / cfg.source_rate_bps
    # CBR source: packet k arrives at k*inter, k = 1.., strictly inside the run
    n_pkts = max(0, int(math.ceil(cfg.duration_s / inter_s - 1e-12)) - 1)
    arrivals = inter_s * np.arange(1, n_pkts + 1)

    n_slots = int(math.ceil(cfg.duration_s / cfg.channel_update_interval_s - 1e-12))
    seeds = np.random.SeedSequence(cfg.seed).spawn(n_slots)

    state = _MacState()
    served_idx: list = []
    served_starts: list = []
    served_recv: list = []
    trace_rows = np.zeros((n_slots, 4))
    link_rates = np.zeros(n_slots)

    for i in range(n_slots):
        t0 = i * cfg.channel_update_interval_s
        t1 = min(t0 + cfg.channel_update_interval_s, cfg.duration_s)
        tx_pos = position_at(cfg.tx_waypoints, cfg.speed_mps, t0)
        rx_pos = position_at(cfg.rx_waypoints, cfg.speed_mps, t0)
        los_geo = geo.is_los(cfg.room, tx_pos, rx_pos)
        az_tx_to_rx = geo.azimuth_deg(tuple(rx_pos[k] - tx_pos[k] for k in range(3)))
        az_rx_to_tx = geo.azimuth_deg(tuple(tx_pos[k] - rx_pos[k] for k in range(3)))
        tx_state = _resolve_antenna(cfg.tx_antenna, az_tx_to_rx)
        rx_state = _resolve_antenna(cfg.rx_antenna, az_rx_to_tx)

        rng = np.random.default_rng(seeds[i])
        cir = _generate_cir(cfg, rng, tx_pos, rx_pos, los_geo, tx_state, t0)

        mpc, p_dbm = strongest_path(cir, tx_state, rx_state, t=t0,
                                    tx_power_dbm=cfg.tx_power_dbm)
        trace_rows[i] = (t0, p_dbm, mpc.aoa_az, 1.0 if los_geo else 0.0)

        windows = _slot_windows(cir, tx_state, rx_state, t0, t1, cfg)
        link_rates[i] = windows[0][2] if windows else 0.0
        if not windows:
            continue
        prop_s = math.dist(tx_pos, rx_pos) / SPEED_OF_LIGHT
        for (u0, u1, rate) in windows:
            service_s = packet_bits / rate
            before = len(served_starts)
            _serve_window(u0, u1, service_s, arrivals, inter_s, state,
                          cfg.queue_timeout_s, served_idx, served_starts)
            for k in range(before, len(served_starts)):
                served_recv.append(served_starts[k] + service_s + prop_s)

    if served_idx:
        idx = np.concatenate(served_idx)
        recv = np.concatenate(served_recv)
    else:
        idx = np.zeros(0, dtype=int)
        recv = np.zeros(0)
    sends = arrivals[idx]
    return FlowStats(
        packet_bits=packet_bits,
        duration_s=cfg.duration_s,
        send_times=arrivals,
        served_send_times=sends,
        recv_times=recv,
        latencies=recv - sends,
        dropped=state.dropped,
        power_trace=trace_rows,
        link_rates=link_rates,
    )


def run_summary(stats: FlowStats) -> dict:
    """Headline numbers for the run-summary file."""
    pct = stats.latency_percentiles((50.0, 90.0, 99.0))
    lat = stats.latencies
    return {
        "generated_packets": stats.generated,
        "delivered_packets": int(len(stats.recv_times)) - stats.in_flight,
        "dropped_packets": stats.dropped,
        "queued_packets": stats.queued,
        "in_flight_packets": stats.in_flight,
        "mean_throughput_bps": stats.mean_throughput_bps,
        "latency_mean_s": float(np.mean(lat)) if len(lat) else math.nan,
        "latency_min_s": float(np.min(lat)) if len(lat) else math.nan,
        "latency_p50_s": pct[50.0],
        "latency_p90_s": pct[90.0],
        "latency_p99_s": pct[99.0],
    }

"""Discrete channel impulse responses for three model families.

Every channel realization is a :class:`Cir`: a set of multipath components
(:class:`Mpc`) on a frequency grid. Three generators are provided:

* :func:`gen_los_baseline` - free-space direct path only, frequency
  selective through path loss and molecular absorption.
* :func:`gen_hbc` - hybrid model: ray-traced central paths plus stochastic
  sub-paths inside each ray cluster and additional non-ray clusters.
* :func:`gen_fsc` - fully stochastic model built from time clusters and
  spatial lobes.

The hybrid model is asymmetric with respect to the antennas: the TX
pattern is applied to ray-traced components when the CIR is generated,
while the non-ray cluster amplitudes statistically contain the antenna
used in the underlying measurements and therefore never receive the
simulated TX pattern. Reception applies the RX pattern to everything and
the TX pattern only to components that do not embed it (tracked per-Mpc
via ``tx_gain_embedded``). Generators are pure given an explicit RNG.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np

from .antenna import AntennaState, gain_db as antenna_gain_db, gain_db_array
from .geometry import SPEED_OF_LIGHT, RayPath
from .radio import AbsorptionTable, FrequencyGrid, fspl_amplitude


class ChannelError(ValueError):
    """Invalid channel parameters or empty generated channel."""


class MpcKind(enum.Enum):
    LOS = "LOS"
    RT_CENTRAL = "RT_CENTRAL"
    RT_SUBPATH = "RT_SUBPATH"
    NONRT_SUBPATH = "NONRT_SUBPATH"
    FSC_SUBPATH = "FSC_SUBPATH"


@dataclass(frozen=True)
class Mpc:
    """One multipath component: a discrete impulse in delay/azimuth.

    ``amplitude`` holds one complex value per frequency bin.
    ``tx_gain_embedded`` marks amplitudes that already include a TX
    antenna pattern, so reception must not apply it a second time.
    """

    delay: float
    aoa_az: float
    aod_az: float
    amplitude: np.ndarray
    kind: MpcKind
    cluster_id: int
    tx_gain_embedded: bool = False

    def __post_init__(self):
        if self.delay < 0.0:
            raise ChannelError(f"negative delay {self.delay}")
        object.__setattr__(self, "aoa_az", self.aoa_az % 360.0)
        object.__setattr__(self, "aod_az", self.aod_az % 360.0)
        amp = np.asarray(self.amplitude, dtype=complex)
        amp.setflags(write=False)
        object.__setattr__(self, "amplitude", amp)
        if not np.all(np.isfinite(amp)):
            raise ChannelError("non-finite amplitude")

    @functools.cached_property
    def mean_gain_db(self) -> float:
        """Band-integrated path gain: mean over bins of 20*log10|amplitude|."""
        mags = np.abs(self.amplitude)
        if np.any(mags == 0.0):
            return -math.inf
        return float(np.mean(20.0 * np.log10(mags)))


@dataclass(frozen=True)
class Cir:
    """Channel impulse response: all Mpcs between one TX/RX pair at one instant."""

    mpcs: tuple
    los: bool
    tx_pos: tuple
    rx_pos: tuple
    grid: FrequencyGrid

    def __post_init__(self):
        if not self.mpcs:
            raise ChannelError("empty channel")
        ordered = tuple(sorted(self.mpcs, key=lambda m: m.delay))
        object.__setattr__(self, "mpcs", ordered)
        n_bins = self.grid.n_bins
        for m in ordered:
            if m.amplitude.shape != (n_bins,):
                raise ChannelError("amplitude length must equal the grid bin count")
        if self.los:
            los_mpcs = [m for m in ordered if m.kind is MpcKind.LOS]
            if len(los_mpcs) != 1 or ordered[0].kind is not MpcKind.LOS:
                raise ChannelError("LOS CIR must contain exactly one LOS Mpc at minimum delay")

    @property
    def min_delay(self) -> float:
        return self.mpcs[0].delay

    @functools.cached_property
    def _arrays(self):
        """Per-Mpc columns for vectorized reception, in delay order."""
        return (
            np.array([m.mean_gain_db for m in self.mpcs]),
            np.array([m.aoa_az for m in self.mpcs]),
            np.array([m.aod_az for m in self.mpcs]),
            np.array([m.tx_gain_embedded for m in self.mpcs], dtype=bool),
        )


@dataclass(frozen=True)
class CountLaw:
    """Distribution over a positive integer count.

    ``poisson_plus_one`` draws 1 + Poisson(mean); ``fixed`` always returns
    round(mean). Serialized as ``kind:mean`` in config files.
    """

    kind: str = "poisson_plus_one"
    mean: float = 1.0

    def __post_init__(self):
        if self.kind not in ("poisson_plus_one", "fixed"):
            raise ChannelError(f"unknown count law {self.kind!r}")
        if self.mean < 0.0:
            raise ChannelError("count law mean must be >= 0")

    def draw(self, rng: np.random.Generator) -> int:
        if self.kind == "fixed":
            return max(1, int(round(self.mean)))
        return 1 + int(rng.poisson(self.mean))

    @staticmethod
    def parse(text: str) -> "CountLaw":
        kind, _, mean = text.partition(":")
        if not mean:
            raise ChannelError(f"count law needs kind:mean, got {text!r}")
        return CountLaw(kind.strip(), float(mean))

    def serialize(self) -> str:
        return f"{self.kind}:{self.mean!r}"


@dataclass(frozen=True)
class HbcParams:
    """Stochastic component of the hybrid channel.

    Sub-path counts ahead of / behind each cluster center are Poisson with
    the given means (same means for ray and non-ray clusters); setting all
    means to zero collapses the channel to its ray-traced part.
    """

    n_nonrt_clusters_mean: float = 2.0
    subpaths_pre_mean: float = 2.0
    subpaths_post_mean: float = 3.0
    subpath_delay_spread_s: float = 2e-9
    subpath_angle_spread_deg: float = 4.0
    subpath_decay_db_per_ns: float = 0.6
    nonrt_excess_loss_db: float = 15.0
    nonrt_delay_scale_s: float = 2e-8

    def __post_init__(self):
        for name in ("n_nonrt_clusters_mean", "subpaths_pre_mean", "subpaths_post_mean",
                     "nonrt_excess_loss_db"):
            if getattr(self, name) < 0.0:
                raise ChannelError(f"{name} must be >= 0")
        for name in ("subpath_delay_spread_s", "subpath_angle_spread_deg",
                     "subpath_decay_db_per_ns", "nonrt_delay_scale_s"):
            if getattr(self, name) <= 0.0:
                raise ChannelError(f"{name} must be > 0")


@dataclass(frozen=True)
class FscParams:
    """Time-cluster / spatial-lobe parameters of the fully stochastic channel.

    The published fitted values live in the measurement papers; everything
    here is a configurable placeholder. ``dominant_lobe_offset_deg``, when
    set to (lo, hi), points the first spatial lobe near the direct
    direction in NLOS, displaced by a uniformly drawn offset in [lo, hi]
    degrees of random sign (the quasi-direct, obstacle-attenuated arrival);
    when None all lobe means are uniform.
    """

    n_clusters_law: CountLaw = CountLaw("poisson_plus_one", 2.0)
    subpaths_law: CountLaw = CountLaw("poisson_plus_one", 3.0)
    cluster_interarrival_s: float = 12e-9
    intra_cluster_delay_s: float = 2.5e-9
    cluster_decay_db_per_ns: float = 0.25
    subpath_decay_db_per_ns: float = 0.6
    n_lobes_law: CountLaw = CountLaw("poisson_plus_one", 1.5)
    lobe_angle_spread_deg: float = 4.0
    nlos_excess_db: float = 30.0
    nlos_shadow_sigma_db: float = 4.0
    los_excess_db: float = 0.0
    subpath_fade_sigma_db: float = 0.0
    dominant_lobe_offset_deg: tuple | None = None

    def __post_init__(self):
        for name in ("cluster_interarrival_s", "intra_cluster_delay_s",
                     "cluster_decay_db_per_ns", "subpath_decay_db_per_ns"):
            if getattr(self, name) <= 0.0:
                raise ChannelError(f"{name} must be > 0")
        for name in ("lobe_angle_spread_deg", "nlos_shadow_sigma_db",
                     "subpath_fade_sigma_db"):
            if getattr(self, name) < 0.0:
                raise ChannelError(f"{name} must be >= 0")
        if self.dominant_lobe_offset_deg is not None:
            lo, hi = self.dominant_lobe_offset_deg
            if not (0.0 <= lo <= hi):
                raise ChannelError("dominant_lobe_offset_deg must be ordered and >= 0")


def _ensure_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def _tx_amp(tx_pattern: AntennaState | None, aod_az: float, t: float) -> float:
    if tx_pattern is None:
        return 1.0
    return 10.0 ** (antenna_gain_db(tx_pattern, aod_az, t) / 20.0)


def gen_los_baseline(grid: FrequencyGrid, distance: float,
                     absorption: AbsorptionTable | None = None,
                     aoa_az_deg: float = 180.0, aod_az_deg: float = 0.0,
                     tx_pos=(0.0, 0.0, 0.0), rx_pos=None) -> Cir:
    """Free-space LOS-only channel: one direct Mpc per realization.

    Per-bin magnitude is the free-space amplitude times the absorption
    loss over the path; the phase is -2*pi*f*delay. Antenna gains are
    applied at reception, not here.
    """
    if distance <= 0.0:
        raise ChannelError(f"distance must be > 0, got {distance}")
    f = grid.bin_centers_hz
    delay = distance / SPEED_OF_LIGHT
    mag = fspl_amplitude(distance, f)
    if absorption is not None:
        mag = mag * 10.0 ** (-absorption.loss_db(distance, f) / 20.0)
    amp = mag * np.exp(-2j * math.pi * f * delay)
    if rx_pos is None:
        rx_pos = (tx_pos[0] + distance, tx_pos[1], tx_pos[2])
    mpc = Mpc(delay=delay, aoa_az=aoa_az_deg, aod_az=aod_az_deg, amplitude=amp,
              kind=MpcKind.LOS, cluster_id=0, tx_gain_embedded=False)
    return Cir(mpcs=(mpc,), los=True, tx_pos=tuple(tx_pos), rx_pos=tuple(rx_pos), grid=grid)


def _rt_magnitude(path: RayPath, grid: FrequencyGrid,
                  absorption: AbsorptionTable | None) -> np.ndarray:
    """Pattern-free per-bin magnitude of a ray: FSPL x absorption x |gains|."""
    f = grid.bin_centers_hz
    mag = fspl_amplitude(path.path_length, f) * 10.0 ** (path.gain_db / 20.0)
    if absorption is not None:
        mag = mag * 10.0 ** (-absorption.loss_db(path.path_length, f) / 20.0)
    return mag


def _endpoints(rt_paths, tx_pos, rx_pos):
    if tx_pos is None or rx_pos is None:
        for p in rt_paths:
            if p.vertices is not None:
                return tuple(p.vertices[0]), tuple(p.vertices[-1])
        raise ChannelError("tx_pos/rx_pos required when ray paths carry no vertices")
    return tuple(tx_pos), tuple(rx_pos)


def hbc_rt_component(rt_paths, grid: FrequencyGrid,
                     tx_pattern: AntennaState | None = None,
                     absorption: AbsorptionTable | None = None,
                     t: float = 0.0) -> list:
    """Deterministic part of the hybrid CIR: one central Mpc per ray."""
    f = grid.bin_centers_hz
    mpcs = []
    for cluster_id, path in enumerate(rt_paths):
        mag = _rt_magnitude(path, grid, absorption)
        phase = path.phase_rad - 2.0 * math.pi * f * path.delay
        amp = mag * _tx_amp(tx_pattern, path.aod_az, t) * np.exp(1j * phase)
        direct_clear = path.order == 0 and path.penetration_db == 0.0
        mpcs.append(Mpc(delay=path.delay, aoa_az=path.aoa_az, aod_az=path.aod_az,
                        amplitude=amp,
                        kind=MpcKind.LOS if direct_clear else MpcKind.RT_CENTRAL,
                        cluster_id=cluster_id,
                        tx_gain_embedded=tx_pattern is not None))
    return mpcs


def hbc_stochastic_component(rt_paths, params: HbcParams, grid: FrequencyGrid,
                             rng, tx_pattern: AntennaState | None = None,
                             absorption: AbsorptionTable | None = None,
                             t: float = 0.0, min_delay_s: float | None = None) -> list:
    """Stochastic part of the hybrid CIR.

    Draws sub-paths around every ray cluster (TX pattern applied per
    sub-path departure angle) and additional non-ray clusters whose
    amplitudes contain the measurement antenna and therefore take no
    simulated TX pattern.
    """
    rng = _ensure_rng(rng)
    f = grid.bin_centers_hz
    if min_delay_s is None:
        min_delay_s = min((p.delay for p in rt_paths), default=0.0)
    mpcs = []

    raw_mags = [_rt_magnitude(p, grid, absorption) for p in rt_paths]

    def cluster_subpaths(n_sub, center_delay, center_aoa, center_aod, base_mag,
                         signs, kind, cluster_id, apply_pattern, embedded):
        offsets = signs * rng.exponential(params.subpath_delay_spread_s, size=n_sub)
        aoas = center_aoa + rng.normal(0.0, params.subpath_angle_spread_deg, size=n_sub)
        aods = center_aod + rng.normal(0.0, params.subpath_angle_spread_deg, size=n_sub)
        phases = rng.uniform(0.0, 2.0 * math.pi, size=n_sub)
        delays = np.maximum(center_delay + offsets, min_delay_s)
        decay = 10.0 ** (-params.subpath_decay_db_per_ns
                         * np.abs(delays - center_delay) * 1e9 / 20.0)
        for k in range(n_sub):
            scale = decay[k] * (_tx_amp(tx_pattern, aods[k], t) if apply_pattern else 1.0)
            amp = base_mag * scale * np.exp(1j * phases[k])
            mpcs.append(Mpc(delay=float(delays[k]), aoa_az=float(aoas[k]),
                            aod_az=float(aods[k]), amplitude=amp, kind=kind,
                            cluster_id=cluster_id, tx_gain_embedded=embedded))

    for cluster_id, path in enumerate(rt_paths):
        q_pre = int(rng.poisson(params.subpaths_pre_mean))
        p_post = int(rng.poisson(params.subpaths_post_mean))
        if q_pre + p_post == 0:
            continue
        signs = np.concatenate([np.full(q_pre, -1.0), np.full(p_post, 1.0)])
        cluster_subpaths(q_pre + p_post, path.delay, path.aoa_az, path.aod_az,
                         raw_mags[cluster_id], signs, MpcKind.RT_SUBPATH,
                         cluster_id, apply_pattern=True,
                         embedded=tx_pattern is not None)

    n_nonrt = int(rng.poisson(params.n_nonrt_clusters_mean))
    if n_nonrt > 0:
        if rt_paths:
            strongest = max(
                (raw_mags[i] * _tx_amp(tx_pattern, rt_paths[i].aod_az, t)
                 for i in range(len(rt_paths))),
                key=lambda m: float(np.mean(np.abs(m))),
            )
        else:
            strongest = fspl_amplitude(max(min_delay_s, 1e-12) * SPEED_OF_LIGHT, f)
        anchor = strongest * 10.0 ** (-params.nonrt_excess_loss_db / 20.0)
        for j in range(n_nonrt):
            cluster_id = len(rt_paths) + j
            center_delay = min_delay_s + rng.exponential(params.nonrt_delay_scale_s)
            center_aoa = rng.uniform(0.0, 360.0)
            center_aod = rng.uniform(0.0, 360.0)
            t_pre = int(rng.poisson(params.subpaths_pre_mean))
            s_post = int(rng.poisson(params.subpaths_post_mean))
            signs = np.concatenate([np.zeros(1), np.full(t_pre, -1.0), np.full(s_post, 1.0)])
            cluster_subpaths(1 + t_pre + s_post, center_delay, center_aoa, center_aod,
                             anchor, signs, MpcKind.NONRT_SUBPATH, cluster_id,
                             apply_pattern=False, embedded=True)
    return mpcs


def gen_hbc(rt_paths, params: HbcParams, grid: FrequencyGrid,
            tx_pattern: AntennaState | None = None, rng=None,
            absorption: AbsorptionTable | None = None, t: float = 0.0,
            tx_pos=None, rx_pos=None) -> Cir:
    """Hybrid CIR: ray-traced central paths plus stochastic components.

    The Mpc set is exactly the union of :func:`hbc_rt_component` and
    :func:`hbc_stochastic_component` drawn from the same RNG state.
    """
    rt_paths = list(rt_paths)
    tx_pos, rx_pos = _endpoints(rt_paths, tx_pos, rx_pos) if rt_paths else (
        tuple(tx_pos or (0.0, 0.0, 0.0)), tuple(rx_pos or (1.0, 0.0, 0.0)))
    # Clamp stochastic delays to the earliest ray so the direct path keeps
    # the minimum delay bit-exactly; falls back to the causality bound.
    min_delay = min((p.delay for p in rt_paths),
                    default=math.dist(tx_pos, rx_pos) / SPEED_OF_LIGHT)
    mpcs = hbc_rt_component(rt_paths, grid, tx_pattern, absorption, t)
    mpcs += hbc_stochastic_component(rt_paths, params, grid, _ensure_rng(rng),
                                     tx_pattern, absorption, t, min_delay_s=min_delay)
    if not mpcs:
        raise ChannelError("empty channel: no ray paths and no non-RT clusters")
    los = any(m.kind is MpcKind.LOS for m in mpcs)
    return Cir(mpcs=tuple(mpcs), los=los, tx_pos=tx_pos, rx_pos=rx_pos, grid=grid)


def gen_fsc(los: bool, distance: float, params: FscParams, grid: FrequencyGrid,
            rng=None, los_aoa_deg: float = 0.0, los_aod_deg: float = 0.0,
            tx_pos=(0.0, 0.0, 0.0), rx_pos=None) -> Cir:
    """Fully stochastic CIR from time clusters and spatial lobes.

    Cluster arrivals and intra-cluster sub-path arrivals are exponential;
    powers follow a double exponential decay (cluster level, then sub-path
    level) anchored to the free-space loss at ``distance``, plus a mean
    excess loss with lognormal shadowing in NLOS. Sub-path phases are
    i.i.d. uniform. In LOS the first sub-path of the first cluster is
    pinned to delay distance/c and the exact LOS arrival direction.
    """
    if distance <= 0.0:
        raise ChannelError(f"distance must be > 0, got {distance}")
    rng = _ensure_rng(rng)
    f = grid.bin_centers_hz
    base_delay = distance / SPEED_OF_LIGHT
    base_mag = fspl_amplitude(distance, f)

    n_clusters = params.n_clusters_law.draw(rng)
    n_sub = [params.subpaths_law.draw(rng) for _ in range(n_clusters)]
    gaps = rng.exponential(params.cluster_interarrival_s, size=n_clusters)
    gaps[0] = 0.0
    cluster_excess = np.cumsum(gaps)

    n_lobes = params.n_lobes_law.draw(rng)
    lobes_aoa = rng.uniform(0.0, 360.0, size=n_lobes)
    lobes_aod = rng.uniform(0.0, 360.0, size=n_lobes)
    quasi_direct = los or params.dominant_lobe_offset_deg is not None
    if los:
        lobes_aoa[0] = los_aoa_deg
        lobes_aod[0] = los_aod_deg
    elif params.dominant_lobe_offset_deg is not None:
        lo, hi = params.dominant_lobe_offset_deg
        offset = rng.uniform(lo, hi) * (1.0 if rng.random() < 0.5 else -1.0)
        lobes_aoa[0] = los_aoa_deg + offset
        lobes_aod[0] = los_aod_deg

    if los:
        excess_loss_db = params.los_excess_db
    else:
        excess_loss_db = params.nlos_excess_db + rng.normal(0.0, params.nlos_shadow_sigma_db) \
            if params.nlos_shadow_sigma_db > 0.0 else params.nlos_excess_db

    mpcs = []
    for n in range(n_clusters):
        intra = rng.exponential(params.intra_cluster_delay_s, size=n_sub[n])
        intra[0] = 0.0
        intra_excess = np.cumsum(intra)
        for m in range(n_sub[n]):
            pinned = quasi_direct and n == 0 and m == 0
            if pinned:
                lobe = 0
                aoa = lobes_aoa[0]
                aod = lobes_aod[0]
                fade_db = 0.0
            else:
                lobe = int(rng.integers(n_lobes))
                aoa = lobes_aoa[lobe] + rng.normal(0.0, params.lobe_angle_spread_deg)
                aod = lobes_aod[lobe] + rng.normal(0.0, params.lobe_angle_spread_deg)
                fade_db = rng.normal(0.0, params.subpath_fade_sigma_db) \
                    if params.subpath_fade_sigma_db > 0.0 else 0.0
            loss_db = (excess_loss_db
                       + params.cluster_decay_db_per_ns * cluster_excess[n] * 1e9
                       + params.subpath_decay_db_per_ns * intra_excess[m] * 1e9
                       - fade_db)
            phase = rng.uniform(0.0, 2.0 * math.pi)
            amp = base_mag * 10.0 ** (-loss_db / 20.0) * np.exp(1j * phase)
            mpcs.append(Mpc(delay=base_delay + cluster_excess[n] + intra_excess[m],
                            aoa_az=aoa, aod_az=aod, amplitude=amp,
                            kind=MpcKind.FSC_SUBPATH, cluster_id=n,
                            tx_gain_embedded=False))

    if rx_pos is None:
        rx_pos = (tx_pos[0] + distance, tx_pos[1], tx_pos[2])
    # The pinned quasi-direct sub-path is only a LOS Mpc when geometry says LOS.
    if los:
        first = min(range(len(mpcs)), key=lambda i: mpcs[i].delay)
        pin = mpcs[first]
        mpcs[first] = Mpc(delay=pin.delay, aoa_az=pin.aoa_az, aod_az=pin.aod_az,
                          amplitude=pin.amplitude, kind=MpcKind.LOS,
                          cluster_id=pin.cluster_id, tx_gain_embedded=False)
    return Cir(mpcs=tuple(mpcs), los=los, tx_pos=tuple(tx_pos), rx_pos=tuple(rx_pos),
               grid=grid)


def received_power_dbm(mpc: Mpc, tx_ant: AntennaState | None, rx_ant: AntennaState | None,
                       t: float = 0.0, tx_power_dbm: float = 0.0) -> float:
    """Received power of a single Mpc including antenna gains at time t."""
    power = tx_power_dbm + mpc.mean_gain_db
    if rx_ant is not None:
        power += antenna_gain_db(rx_ant, mpc.aoa_az, t)
    if tx_ant is not None and not mpc.tx_gain_embedded:
        power += antenna_gain_db(tx_ant, mpc.aod_az, t)
    return power


def strongest_path(cir: Cir, tx_ant: AntennaState | None = None,
                   rx_ant: AntennaState | None = None, t: float = 0.0,
                   tx_power_dbm: float = 0.0):
    """Mpc with the highest band-integrated received power and that power (dBm).

    Ties go to the smaller delay. ``None`` antennas are isotropic.
    """
    gains, aoa, aod, embedded = cir._arrays
    power = tx_power_dbm + gains
    if rx_ant is not None:
        power = power + gain_db_array(rx_ant, aoa, t)
    if tx_ant is not None:
        tx_gain = gain_db_array(tx_ant, aod, t)
        tx_gain[embedded] = 0.0
        power = power + tx_gain
    best = int(np.argmax(power))  # argmax takes the first (smallest-delay) tie
    return cir.mpcs[best], float(power[best])


def aoa_histogram(cirs, bins: int, mode: str = "all",
                  tx_ant: AntennaState | None = None,
                  rx_ant: AntennaState | None = None,
                  t: float = 0.0, center_deg: float = 0.0):
    """Normalized azimuth-of-arrival histogram over many realizations.

    ``mode="all"`` counts every Mpc; ``mode="strongest"`` counts only the
    strongest path of each CIR (gain-weighted with the given antennas).
    Angles are re-centered on ``center_deg`` (e.g. the LOS direction) and
    binned over [-180, 180). Returns (bin_centers_deg, fractions) with the
    fractions summing to 1.
    """
    cirs = list(cirs)
    if not cirs:
        raise ChannelError("aoa_histogram needs at least one CIR")
    if bins < 4:
        raise ChannelError("aoa_histogram needs bins >= 4")
    if mode not in ("all", "strongest"):
        raise ChannelError(f"unknown histogram mode {mode!r}")
    if mode == "all":
        angles = [m.aoa_az for cir in cirs for m in cir.mpcs]
    else:
        angles = [strongest_path(cir, tx_ant, rx_ant, t)[0].aoa_az for cir in cirs]
    rel = (np.asarray(angles) - center_deg + 180.0) % 360.0 - 180.0
    counts, edges = np.histogram(rel, bins=bins, range=(-180.0, 180.0))
    centers = 0.5 * (edges[:-1] + edges[1:])
    return centers, counts / counts.sum()

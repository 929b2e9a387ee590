"""Parsing and serialization: scenario configs, ray files, result tables.

Scenario files are INI-style with the sections [room], [materials],
[mobility], [channel], [channel.hbc], [channel.fsc], [antenna.tx],
[antenna.rx], [phy], [traffic], [sim]. Unknown keys or sections fail fast;
value errors are reported with key, line number and reason. Ray files are
versioned plain-text tables that round-trip bit-exactly.
"""

from __future__ import annotations

import configparser
import io
import re

import numpy as np

from . import engine as eng
from .antenna import AntennaMode, AntennaState
from .channels import CountLaw, FscParams, HbcParams
from .geometry import SPEED_OF_LIGHT, Box, Material, RayPath, Room
from .radio import AbsorptionTable, FrequencyGrid

RAYFILE_MAGIC = "thzlink-rays"
RAYFILE_VERSION = 1
RAYFILE_COLUMNS = ("timestep", "kind", "delay_s", "gain_db", "phase_rad",
                   "aoa_az_deg", "aoa_el_deg", "aod_az_deg", "aod_el_deg", "order")


class ScenarioError(ValueError):
    """Scenario file rejected; ``errors`` lists (key, line, reason) tuples."""

    def __init__(self, errors):
        self.errors = list(errors)
        lines = "; ".join(f"{key} (line {line}): {reason}" for key, line, reason in self.errors)
        super().__init__(f"invalid scenario: {lines}")


class RayFileError(ValueError):
    pass


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


# ---------------------------------------------------------------------------
# scenario files
# ---------------------------------------------------------------------------

_KNOWN_KEYS = {
    "room": {"width", "depth", "height", "wall_material", "floor_material",
             "ceiling_material"},
    "materials": None,  # free-form: every key defines a material
    "mobility": {"tx_waypoints", "rx_waypoints", "speed_mps"},
    "channel": {"type", "carrier_hz", "bandwidth_hz", "n_bins", "max_order",
                "polarization", "penetration_db", "absorption"},
    "channel.hbc": {"n_nonrt_clusters_mean", "subpaths_pre_mean", "subpaths_post_mean",
                    "subpath_delay_spread_s", "subpath_angle_spread_deg",
                    "subpath_decay_db_per_ns", "nonrt_excess_loss_db",
                    "nonrt_delay_scale_s"},
    "channel.fsc": {"n_clusters_law", "subpaths_law", "cluster_interarrival_s",
                    "intra_cluster_delay_s", "cluster_decay_db_per_ns",
                    "subpath_decay_db_per_ns", "n_lobes_law", "lobe_angle_spread_deg",
                    "nlos_excess_db", "nlos_shadow_sigma_db", "los_excess_db",
                    "subpath_fade_sigma_db", "dominant_lobe_offset_deg"},
    "antenna.tx": {"max_gain_dbi", "hpbw_deg", "rotation_speed_deg_per_s",
                   "initial_phase_deg", "mode", "pointing", "sidelobe_floor_db"},
    "antenna.rx": {"max_gain_dbi", "hpbw_deg", "rotation_speed_deg_per_s",
                   "initial_phase_deg", "mode", "pointing", "sidelobe_floor_db"},
    "phy": {"tx_power_dbm", "noise_floor_dbm", "max_phy_rate_bps", "decode_threshold_db"},
    "traffic": {"source_rate_bps", "packet_bytes"},
    "sim": {"duration_s", "channel_update_interval_s", "seed", "queue_timeout_s"},
}

_REQUIRED = (("room", "width"), ("room", "depth"), ("room", "height"),
             ("mobility", "tx_waypoints"), ("mobility", "rx_waypoints"),
             ("channel", "type"), ("traffic", "source_rate_bps"),
             ("sim", "duration_s"))


def _key_lines(text: str) -> dict:
    """Map (section, key) and (section,) to 1-based line numbers."""
    lines = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith(("#", ";")):
            continue
        m = re.match(r"\[(.+)\]\s*$", stripped)
        if m:
            section = m.group(1).strip().lower()
            lines[(section,)] = lineno
            continue
        m = re.match(r"([^=:]+)[=:]", stripped)
        if m and section is not None:
            lines[(section, m.group(1).strip().lower())] = lineno
    return lines


class _Reader:
    """Typed accessors over a parsed scenario with precise error collection."""

    def __init__(self, parser: configparser.ConfigParser, key_lines: dict):
        self.parser = parser
        self.key_lines = key_lines
        self.errors: list = []

    def line(self, section, key=None):
        return self.key_lines.get((section, key) if key else (section,), 0)

    def fail(self, section, key, reason):
        self.errors.append((f"[{section}] {key}", self.line(section, key), reason))

    def raw(self, section, key, default=None):
        if self.parser.has_option(section, key):
            return self.parser.get(section, key).strip()
        return default

    def _typed(self, section, key, default, conv, typename):
        raw = self.raw(section, key)
        if raw is None:
            return default
        try:
            return conv(raw)
        except (ValueError, TypeError):
            self.fail(section, key, f"expected {typename}, got {raw!r}")
            return default

    def flt(self, section, key, default=None):
        return self._typed(section, key, default, float, "a number")

    def integer(self, section, key, default=None):
        return self._typed(section, key, default, lambda s: int(float(s)), "an integer")

    def floats(self, section, key, default=None, count=None):
        def conv(s):
            vals = tuple(float(tok) for tok in s.split())
            if count is not None and len(vals) != count:
                raise ValueError
            return vals
        what = f"{count} numbers" if count else "numbers"
        return self._typed(section, key, default, conv, what)

    def choice(self, section, key, options, default=None):
        raw = self.raw(section, key)
        if raw is None:
            return default
        if raw.upper() not in options:
            self.fail(section, key, f"must be one of {sorted(options)}, got {raw!r}")
            return default
        return raw.upper()


def _parse_waypoints(reader: _Reader, key: str):
    raw = reader.raw("mobility", key)
    if raw is None:
        return None
    points = []
    for chunk in raw.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        toks = chunk.split()
        if len(toks) != 3:
            reader.fail("mobility", key, f"waypoint {chunk!r} needs 3 coordinates")
            return None
        try:
            points.append(tuple(float(t) for t in toks))
        except ValueError:
            reader.fail("mobility", key, f"waypoint {chunk!r} is not numeric")
            return None
    if not points:
        reader.fail("mobility", key, "needs at least one waypoint")
        return None
    return tuple(points)


def _parse_absorption(reader: _Reader):
    raw = reader.raw("channel", "absorption")
    if raw is None:
        return AbsorptionTable()
    points = []
    for chunk in raw.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            f, _, v = chunk.partition(":")
            points.append((float(f), float(v)))
        except ValueError:
            reader.fail("channel", "absorption", f"breakpoint {chunk!r} is not freq:db_per_m")
            return AbsorptionTable()
    try:
        return AbsorptionTable(points=tuple(points))
    except ValueError as exc:
        reader.fail("channel", "absorption", str(exc))
        return AbsorptionTable()


def _parse_materials(reader: _Reader):
    mats = {}
    if reader.parser.has_section("materials"):
        for name in reader.parser.options("materials"):
            vals = reader.floats("materials", name, count=2)
            if vals is None:
                vals = reader.floats("materials", name, count=1)
                if vals is None:
                    continue
                vals = (vals[0], 0.0)
            try:
                mats[name] = Material(name, vals[0], vals[1])
            except ValueError as exc:
                reader.fail("materials", name, str(exc))
    return mats


def _parse_antenna(reader: _Reader, section: str) -> eng.AntennaConfig:
    mode_raw = (reader.raw(section, "mode") or "static").lower()
    pointing_raw = (reader.raw(section, "pointing") or "track_peer").lower()
    if mode_raw not in ("static", "rotating"):
        reader.fail(section, "mode", f"must be static or rotating, got {mode_raw!r}")
        mode_raw = "static"
    if pointing_raw not in ("fixed", "track_peer"):
        reader.fail(section, "pointing", f"must be fixed or track_peer, got {pointing_raw!r}")
        pointing_raw = "track_peer"
    try:
        pattern = AntennaState(
            max_gain_dbi=reader.flt(section, "max_gain_dbi", 25.0),
            hpbw_deg=reader.flt(section, "hpbw_deg", 8.0),
            rotation_speed_deg_per_s=reader.flt(section, "rotation_speed_deg_per_s", 0.0),
            initial_phase_deg=reader.flt(section, "initial_phase_deg", 0.0),
            mode=AntennaMode(mode_raw),
            sidelobe_floor_db=reader.flt(section, "sidelobe_floor_db", 40.0),
        )
    except ValueError as exc:
        reader.fail(section, "*", str(exc))
        pattern = AntennaState(25.0, 8.0)
    return eng.AntennaConfig(pattern=pattern, pointing=eng.Pointing(pointing_raw))


def _parse_law(reader: _Reader, key: str, default: CountLaw) -> CountLaw:
    raw = reader.raw("channel.fsc", key)
    if raw is None:
        return default
    try:
        return CountLaw.parse(raw)
    except (ValueError, TypeError) as exc:
        reader.fail("channel.fsc", key, str(exc))
        return default


def loads_scenario(text: str) -> eng.ScenarioConfig:
    """Parse scenario text into a validated :class:`ScenarioConfig`."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ScenarioError([("<file>", getattr(exc, "lineno", 0) or 0, str(exc))])
    key_lines = _key_lines(text)
    reader = _Reader(parser, key_lines)

    obstacle_re = re.compile(r"obstacle_\d+$")
    for section in parser.sections():
        if section not in _KNOWN_KEYS:
            reader.errors.append((f"[{section}]", reader.line(section), "unknown section"))
            continue
        allowed = _KNOWN_KEYS[section]
        if allowed is None:
            continue
        for key in parser.options(section):
            if key in allowed:
                continue
            if section == "room" and obstacle_re.match(key):
                continue
            reader.fail(section, key, "unknown key")
    for section, key in _REQUIRED:
        if not parser.has_option(section, key):
            reader.errors.append((f"[{section}] {key}", reader.line(section, key), "required key missing"))
    if reader.errors:
        raise ScenarioError(reader.errors)

    materials = _parse_materials(reader)

    def material_for(key):
        name = reader.raw("room", key)
        if name is None:
            return None
        if name not in materials:
            reader.fail("room", key, f"material {name!r} not defined in [materials]")
            return None
        return materials[name]

    wall = material_for("wall_material")
    floor = material_for("floor_material")
    ceiling = material_for("ceiling_material")

    obstacles = []
    for key in sorted(k for k in parser.options("room") if obstacle_re.match(k)):
        vals = reader.floats("room", key, count=6)
        if vals is None:
            continue
        try:
            obstacles.append(Box(*vals))
        except ValueError as exc:
            reader.fail("room", key, str(exc))

    width = reader.flt("room", "width")
    depth = reader.flt("room", "depth")
    height = reader.flt("room", "height")
    room = None
    if not reader.errors:
        try:
            room = Room.box(width, depth, height, wall=wall, floor=floor,
                            ceiling=ceiling, obstacles=obstacles)
        except ValueError as exc:
            reader.fail("room", "width", str(exc))

    tx_wp = _parse_waypoints(reader, "tx_waypoints")
    rx_wp = _parse_waypoints(reader, "rx_waypoints")
    if room is not None:
        for key, pts in (("tx_waypoints", tx_wp), ("rx_waypoints", rx_wp)):
            for p in pts or ():
                if not room.contains(p):
                    reader.fail("mobility", key, f"waypoint {p} is outside the room")

    chan_type = reader.choice("channel", "type",
                              {t.value for t in eng.ChannelType})
    try:
        grid = FrequencyGrid(carrier_hz=reader.flt("channel", "carrier_hz", 140e9),
                             bandwidth_hz=reader.flt("channel", "bandwidth_hz", 32e9),
                             n_bins=reader.integer("channel", "n_bins", 64))
    except ValueError as exc:
        reader.fail("channel", "carrier_hz", str(exc))
        grid = FrequencyGrid(140e9, 32e9, 64)

    absorption = _parse_absorption(reader)

    try:
        hbc = HbcParams(
            n_nonrt_clusters_mean=reader.flt("channel.hbc", "n_nonrt_clusters_mean", 2.0),
            subpaths_pre_mean=reader.flt("channel.hbc", "subpaths_pre_mean", 2.0),
            subpaths_post_mean=reader.flt("channel.hbc", "subpaths_post_mean", 3.0),
            subpath_delay_spread_s=reader.flt("channel.hbc", "subpath_delay_spread_s", 2e-9),
            subpath_angle_spread_deg=reader.flt("channel.hbc", "subpath_angle_spread_deg", 4.0),
            subpath_decay_db_per_ns=reader.flt("channel.hbc", "subpath_decay_db_per_ns", 0.6),
            nonrt_excess_loss_db=reader.flt("channel.hbc", "nonrt_excess_loss_db", 15.0),
            nonrt_delay_scale_s=reader.flt("channel.hbc", "nonrt_delay_scale_s", 2e-8),
        )
    except ValueError as exc:
        reader.fail("channel.hbc", "*", str(exc))
        hbc = HbcParams()

    offset_raw = reader.raw("channel.fsc", "dominant_lobe_offset_deg")
    offset = None
    if offset_raw is not None and offset_raw.lower() != "none":
        vals = reader.floats("channel.fsc", "dominant_lobe_offset_deg", count=2)
        offset = tuple(vals) if vals is not None else None
    try:
        fsc = FscParams(
            n_clusters_law=_parse_law(reader, "n_clusters_law", CountLaw("poisson_plus_one", 2.0)),
            subpaths_law=_parse_law(reader, "subpaths_law", CountLaw("poisson_plus_one", 3.0)),
            cluster_interarrival_s=reader.flt("channel.fsc", "cluster_interarrival_s", 12e-9),
            intra_cluster_delay_s=reader.flt("channel.fsc", "intra_cluster_delay_s", 2.5e-9),
            cluster_decay_db_per_ns=reader.flt("channel.fsc", "cluster_decay_db_per_ns", 0.25),
            subpath_decay_db_per_ns=reader.flt("channel.fsc", "subpath_decay_db_per_ns", 0.6),
            n_lobes_law=_parse_law(reader, "n_lobes_law", CountLaw("poisson_plus_one", 1.5)),
            lobe_angle_spread_deg=reader.flt("channel.fsc", "lobe_angle_spread_deg", 4.0),
            nlos_excess_db=reader.flt("channel.fsc", "nlos_excess_db", 30.0),
            nlos_shadow_sigma_db=reader.flt("channel.fsc", "nlos_shadow_sigma_db", 4.0),
            los_excess_db=reader.flt("channel.fsc", "los_excess_db", 0.0),
            subpath_fade_sigma_db=reader.flt("channel.fsc", "subpath_fade_sigma_db", 0.0),
            dominant_lobe_offset_deg=offset,
        )
    except ValueError as exc:
        reader.fail("channel.fsc", "*", str(exc))
        fsc = FscParams()

    timeout_raw = reader.raw("sim", "queue_timeout_s")
    timeout = None
    if timeout_raw is not None and timeout_raw.lower() != "none":
        timeout = reader.flt("sim", "queue_timeout_s")

    kwargs = dict(
        room=room,
        tx_waypoints=tx_wp or ((0.0, 0.0, 0.0),),
        rx_waypoints=rx_wp or ((1.0, 0.0, 0.0),),
        speed_mps=reader.flt("mobility", "speed_mps", 0.0),
        channel_type=eng.ChannelType(chan_type) if chan_type else eng.ChannelType.LOS_BASELINE,
        grid=grid,
        tx_antenna=_parse_antenna(reader, "antenna.tx"),
        rx_antenna=_parse_antenna(reader, "antenna.rx"),
        source_rate_bps=reader.flt("traffic", "source_rate_bps"),
        packet_bytes=reader.integer("traffic", "packet_bytes", 20000),
        duration_s=reader.flt("sim", "duration_s"),
        channel_update_interval_s=reader.flt("sim", "channel_update_interval_s", 1e-3),
        seed=reader.integer("sim", "seed", 1),
        tx_power_dbm=reader.flt("phy", "tx_power_dbm", 0.0),
        noise_floor_dbm=reader.flt("phy", "noise_floor_dbm", -160.0),
        max_phy_rate_bps=reader.flt("phy", "max_phy_rate_bps", 100e9),
        decode_threshold_db=reader.flt("phy", "decode_threshold_db", 0.0),
        hbc=hbc,
        fsc=fsc,
        absorption=absorption,
        max_order=reader.integer("channel", "max_order", 2),
        polarization=reader.choice("channel", "polarization", {"TE", "TM"}, "TE"),
        penetration_db=reader.flt("channel", "penetration_db", 30.0),
        queue_timeout_s=timeout,
    )
    if reader.errors:
        raise ScenarioError(reader.errors)
    try:
        return eng.ScenarioConfig(**kwargs)
    except (eng.ConfigError, ValueError) as exc:
        raise ScenarioError([("<config>", 0, str(exc))])


def load_scenario(path) -> eng.ScenarioConfig:
    """Load and validate a scenario file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError([(str(path), 0, f"cannot read file: {exc}")])
    return loads_scenario(text)


def dumps_scenario(cfg: eng.ScenarioConfig) -> str:
    """Serialize a config so that ``loads_scenario(dumps_scenario(cfg)) == cfg``."""
    out = io.StringIO()

    def sec(name):
        out.write(f"\n[{name}]\n")

    def kv(key, value):
        out.write(f"{key} = {value}\n")

    out.write("# thzlink scenario\n")
    sec("materials")
    mats = {}
    for m in cfg.room.face_materials:
        mats[m.name] = m
    for name in sorted(mats):
        m = mats[name]
        kv(name, f"{_fmt(m.relative_permittivity)} {_fmt(m.roughness_loss_db)}")

    sec("room")
    kv("width", _fmt(cfg.room.width))
    kv("depth", _fmt(cfg.room.depth))
    kv("height", _fmt(cfg.room.height))
    kv("wall_material", cfg.room.face_materials[0].name)
    kv("floor_material", cfg.room.face_materials[4].name)
    kv("ceiling_material", cfg.room.face_materials[5].name)
    for i, b in enumerate(cfg.room.obstacles, start=1):
        kv(f"obstacle_{i}", " ".join(_fmt(v) for v in (b.x0, b.y0, b.z0, b.x1, b.y1, b.z1)))

    sec("mobility")
    kv("tx_waypoints", ", ".join(" ".join(_fmt(c) for c in p) for p in cfg.tx_waypoints))
    kv("rx_waypoints", ", ".join(" ".join(_fmt(c) for c in p) for p in cfg.rx_waypoints))
    kv("speed_mps", _fmt(cfg.speed_mps))

    sec("channel")
    kv("type", cfg.channel_type.value)
    kv("carrier_hz", _fmt(cfg.grid.carrier_hz))
    kv("bandwidth_hz", _fmt(cfg.grid.bandwidth_hz))
    kv("n_bins", cfg.grid.n_bins)
    kv("max_order", cfg.max_order)
    kv("polarization", cfg.polarization)
    kv("penetration_db", _fmt(cfg.penetration_db))
    kv("absorption", ", ".join(f"{_fmt(f)}:{_fmt(v)}" for f, v in cfg.absorption.points))

    sec("channel.hbc")
    h = cfg.hbc
    kv("n_nonrt_clusters_mean", _fmt(h.n_nonrt_clusters_mean))
    kv("subpaths_pre_mean", _fmt(h.subpaths_pre_mean))
    kv("subpaths_post_mean", _fmt(h.subpaths_post_mean))
    kv("subpath_delay_spread_s", _fmt(h.subpath_delay_spread_s))
    kv("subpath_angle_spread_deg", _fmt(h.subpath_angle_spread_deg))
    kv("subpath_decay_db_per_ns", _fmt(h.subpath_decay_db_per_ns))
    kv("nonrt_excess_loss_db", _fmt(h.nonrt_excess_loss_db))
    kv("nonrt_delay_scale_s", _fmt(h.nonrt_delay_scale_s))

    sec("channel.fsc")
    s = cfg.fsc
    kv("n_clusters_law", s.n_clusters_law.serialize())
    kv("subpaths_law", s.subpaths_law.serialize())
    kv("cluster_interarrival_s", _fmt(s.cluster_interarrival_s))
    kv("intra_cluster_delay_s", _fmt(s.intra_cluster_delay_s))
    kv("cluster_decay_db_per_ns", _fmt(s.cluster_decay_db_per_ns))
    kv("subpath_decay_db_per_ns", _fmt(s.subpath_decay_db_per_ns))
    kv("n_lobes_law", s.n_lobes_law.serialize())
    kv("lobe_angle_spread_deg", _fmt(s.lobe_angle_spread_deg))
    kv("nlos_excess_db", _fmt(s.nlos_excess_db))
    kv("nlos_shadow_sigma_db", _fmt(s.nlos_shadow_sigma_db))
    kv("los_excess_db", _fmt(s.los_excess_db))
    kv("subpath_fade_sigma_db", _fmt(s.subpath_fade_sigma_db))
    if s.dominant_lobe_offset_deg is None:
        kv("dominant_lobe_offset_deg", "none")
    else:
        kv("dominant_lobe_offset_deg",
           " ".join(_fmt(v) for v in s.dominant_lobe_offset_deg))

    for name, a in (("antenna.tx", cfg.tx_antenna), ("antenna.rx", cfg.rx_antenna)):
        sec(name)
        kv("max_gain_dbi", _fmt(a.pattern.max_gain_dbi))
        kv("hpbw_deg", _fmt(a.pattern.hpbw_deg))
        kv("rotation_speed_deg_per_s", _fmt(a.pattern.rotation_speed_deg_per_s))
        kv("initial_phase_deg", _fmt(a.pattern.initial_phase_deg))
        kv("mode", a.pattern.mode.value)
        kv("pointing", a.pointing.value)
        kv("sidelobe_floor_db", _fmt(a.pattern.sidelobe_floor_db))

    sec("phy")
    kv("tx_power_dbm", _fmt(cfg.tx_power_dbm))
    kv("noise_floor_dbm", _fmt(cfg.noise_floor_dbm))
    kv("max_phy_rate_bps", _fmt(cfg.max_phy_rate_bps))
    kv("decode_threshold_db", _fmt(cfg.decode_threshold_db))

    sec("traffic")
    kv("source_rate_bps", _fmt(cfg.source_rate_bps))
    kv("packet_bytes", cfg.packet_bytes)

    sec("sim")
    kv("duration_s", _fmt(cfg.duration_s))
    kv("channel_update_interval_s", _fmt(cfg.channel_update_interval_s))
    kv("seed", cfg.seed)
    kv("queue_timeout_s", "none" if cfg.queue_timeout_s is None else _fmt(cfg.queue_timeout_s))
    return out.getvalue()


def save_scenario(cfg: eng.ScenarioConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_scenario(cfg))


# ---------------------------------------------------------------------------
# ray files
# ---------------------------------------------------------------------------

def _ray_kind(path: RayPath) -> str:
    return "LOS" if path.order == 0 else f"REFL{path.order}"


def export_rays(snapshots, path) -> None:
    """Write per-timestep ray paths to the versioned text format.

    ``snapshots`` is a sequence of path lists, one per timestep. At least
    one path must be present overall.
    """
    snapshots = [list(paths) for paths in snapshots]
    if sum(len(p) for p in snapshots) == 0:
        raise RayFileError("refusing to export an empty path set")
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# {RAYFILE_MAGIC} v{RAYFILE_VERSION}\n")
            fh.write("# " + " ".join(RAYFILE_COLUMNS) + "\n")
            for ts, paths in enumerate(snapshots):
                for p in paths:
                    fields = (ts, _ray_kind(p), _fmt(p.delay), _fmt(p.gain_db),
                              _fmt(p.phase_rad), _fmt(p.aoa_az), _fmt(p.aoa_el),
                              _fmt(p.aod_az), _fmt(p.aod_el), p.order)
                    fh.write(" ".join(str(f) for f in fields) + "\n")
    except OSError as exc:
        raise RayFileError(f"cannot write ray file {path}: {exc}")


def load_rays(path):
    """Read a ray file back into per-timestep :class:`RayPath` lists.

    Reconstructed paths carry no bounce vertices; their combined gain is
    authoritative in ``gain_db``/``phase_rad`` and re-exports are
    byte-identical.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise RayFileError(f"cannot read ray file {path}: {exc}")
    if not lines or not lines[0].startswith(f"# {RAYFILE_MAGIC} "):
        raise RayFileError(f"{path}: not a {RAYFILE_MAGIC} file")
    version = lines[0].split()[-1]
    if version != f"v{RAYFILE_VERSION}":
        raise RayFileError(f"{path}: unsupported version {version!r}")
    records = [ln for ln in lines[1:] if ln.strip() and not ln.startswith("#")]
    if not records:
        raise RayFileError(f"{path}: no ray records")
    snapshots: dict = {}
    for idx, line in enumerate(records):
        toks = line.split()
        if len(toks) != len(RAYFILE_COLUMNS):
            raise RayFileError(f"{path}: record {idx} has {len(toks)} fields, "
                               f"expected {len(RAYFILE_COLUMNS)}")
        try:
            ts = int(toks[0])
            kind = toks[1]
            delay, gain_db, phase, aoa_az, aoa_el, aod_az, aod_el = map(float, toks[2:9])
            order = int(toks[9])
        except ValueError:
            raise RayFileError(f"{path}: record {idx} is malformed: {line!r}")
        if (order == 0) != (kind == "LOS"):
            raise RayFileError(f"{path}: record {idx} kind/order mismatch")
        ray = RayPath(order=order, path_length=delay * SPEED_OF_LIGHT, delay=delay,
                      aoa_az=aoa_az, aoa_el=aoa_el, aod_az=aod_az, aod_el=aod_el,
                      reflection_gains=(), surface_ids=(), penetration_db=0.0,
                      vertices=None, gain_db=gain_db, phase_rad=phase)
        snapshots.setdefault(ts, []).append(ray)
    n_ts = max(snapshots) + 1
    return [snapshots.get(ts, []) for ts in range(n_ts)]


# ---------------------------------------------------------------------------
# result tables
# ---------------------------------------------------------------------------

def write_table(path, header, rows) -> None:
    """Tab-separated table with a # header line; floats at full precision."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# " + "\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join(_fmt(v) for v in row) + "\n")


def write_run_outputs(stats: eng.FlowStats, out_dir, window_s: float = 0.1) -> None:
    """Write the per-run packets / power trace / throughput / summary files."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    write_table(os.path.join(out_dir, "packets.tsv"),
                ("send_t", "recv_t", "latency"),
                zip(stats.served_send_times, stats.recv_times, stats.latencies))
    write_table(os.path.join(out_dir, "power_trace.tsv"),
                ("t", "rx_dbm", "aoa_deg", "los_flag"),
                ((row[0], row[1], row[2], int(row[3])) for row in stats.power_trace))
    starts, bps = eng.windowed_throughput(stats, window_s)
    write_table(os.path.join(out_dir, "throughput.tsv"),
                ("window_start", "bps"), zip(starts, bps))
    summary = eng.run_summary(stats)
    with open(os.path.join(out_dir, "summary.tsv"), "w", encoding="utf-8") as fh:
        for key in sorted(summary):
            fh.write(f"{key}\t{_fmt(summary[key])}\n")


def read_table(path):
    """Read a table written by :func:`write_table` into a float array."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#") or not line.strip():
                continue
            rows.append([float(tok) for tok in line.split("\t")])
    return np.asarray(rows)

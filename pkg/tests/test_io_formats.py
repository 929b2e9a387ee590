import dataclasses
import math

import numpy as np
import pytest

from thzlink import (AntennaConfig, AntennaMode, AntennaState, Box, ChannelType,
                     CountLaw, FrequencyGrid, FscParams, HbcParams, Material,
                     Pointing, RayFileError, Room, ScenarioConfig, ScenarioError,
                     dumps_scenario, export_rays, load_rays, load_scenario,
                     loads_scenario, trace)
from thzlink.io_formats import read_table, write_table

MINIMAL = """
[materials]
brick = 4.4 1.0

[room]
width = 6
depth = 4
height = 3

[mobility]
tx_waypoints = 1 1 1
rx_waypoints = 5 3 1.5

[channel]
type = FSC

[traffic]
source_rate_bps = 4e9

[sim]
duration_s = 0.5
"""


class TestScenarioParsing:
    def test_minimal_file_gets_defaults(self):
        cfg = loads_scenario(MINIMAL)
        assert cfg.grid.carrier_hz == 140e9
        assert cfg.grid.bandwidth_hz == 32e9
        assert cfg.channel_update_interval_s == 1e-3
        assert cfg.rx_antenna.pattern.max_gain_dbi == 25.0
        assert cfg.packet_bytes == 20000
        assert cfg.channel_type is ChannelType.FSC
        assert cfg.queue_timeout_s is None

    def test_unknown_key_rejected_with_line(self):
        bad = MINIMAL + "\n[phy]\nbogus_key = 7\n"
        with pytest.raises(ScenarioError) as err:
            loads_scenario(bad)
        (key, line, reason), = err.value.errors
        assert "bogus_key" in key
        assert reason == "unknown key"
        assert line == bad.splitlines().index("bogus_key = 7") + 1

    def test_unknown_section_rejected(self):
        with pytest.raises(ScenarioError):
            loads_scenario(MINIMAL + "\n[quantum]\nfoo = 1\n")

    def test_missing_required_key(self):
        text = MINIMAL.replace("source_rate_bps = 4e9", "")
        with pytest.raises(ScenarioError) as err:
            loads_scenario(text)
        assert any("source_rate_bps" in k for k, _, _ in err.value.errors)

    def test_waypoint_outside_room_named(self):
        text = MINIMAL.replace("rx_waypoints = 5 3 1.5", "rx_waypoints = 7 3 1.5")
        with pytest.raises(ScenarioError) as err:
            loads_scenario(text)
        assert any("rx_waypoints" in k for k, _, _ in err.value.errors)

    def test_bad_number_reports_value(self):
        text = MINIMAL.replace("width = 6", "width = six")
        with pytest.raises(ScenarioError) as err:
            loads_scenario(text)
        assert any("width" in k and "six" in r for k, _, r in err.value.errors)

    def test_out_of_range_never_coerced(self):
        text = MINIMAL + "\n[antenna.rx]\nhpbw_deg = 720\n"
        with pytest.raises(ScenarioError):
            loads_scenario(text)

    def test_obstacle_keys(self):
        text = MINIMAL.replace("[mobility]",
                               "obstacle_1 = 2 1 0.5 3 2 2.5\n\n[mobility]")
        cfg = loads_scenario(text)
        assert cfg.room.obstacles == (Box(2, 1, 0.5, 3, 2, 2.5),)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ScenarioError):
            load_scenario(tmp_path / "nope.cfg")


def random_config(rng: np.random.Generator) -> ScenarioConfig:
    mat = Material("m0", float(rng.uniform(1.5, 8.0)),
                   float(rng.uniform(0.0, 2.0)))
    dims = (float(rng.uniform(5.0, 12.0)), float(rng.uniform(4.0, 9.0)),
            float(rng.uniform(2.5, 4.0)))
    obstacles = []
    if rng.random() < 0.7:
        lo = [float(rng.uniform(0.5, d / 2)) for d in dims]
        hi = [float(min(l + rng.uniform(0.2, 1.0), d - 0.1))
              for l, d in zip(lo, dims)]
        obstacles.append(Box(*lo, *hi))
    room = Room.box(*dims, wall=mat, obstacles=obstacles)
    ant = lambda: AntennaConfig(
        AntennaState(float(rng.uniform(0.0, 30.0)),
                     float(rng.choice([2.0, 8.0, 10.0, 360.0])),
                     rotation_speed_deg_per_s=float(rng.choice([0.0, 360.0])),
                     initial_phase_deg=float(rng.uniform(0.0, 360.0)),
                     mode=AntennaMode(rng.choice(["static", "rotating"])),
                     sidelobe_floor_db=float(rng.uniform(20.0, 60.0))),
        Pointing(rng.choice(["fixed", "track_peer"])))
    inside = lambda: tuple(float(rng.uniform(0.4, d - 0.4)) for d in dims)
    return ScenarioConfig(
        room=room,
        tx_waypoints=(inside(),),
        rx_waypoints=(inside(), inside()),
        speed_mps=float(rng.uniform(0.0, 3.0)),
        channel_type=ChannelType(rng.choice(["LOS_BASELINE", "FSC", "HBC"])),
        grid=FrequencyGrid(140e9, 32e9, int(rng.integers(1, 128))),
        tx_antenna=ant(), rx_antenna=ant(),
        source_rate_bps=float(rng.uniform(1e9, 60e9)),
        packet_bytes=int(rng.integers(500, 30000)),
        duration_s=float(rng.uniform(0.1, 3.0)),
        channel_update_interval_s=float(rng.choice([1e-3, 2e-3])),
        seed=int(rng.integers(0, 2**31)),
        tx_power_dbm=float(rng.uniform(-40.0, 10.0)),
        noise_floor_dbm=-160.0,
        max_phy_rate_bps=float(rng.uniform(50e9, 120e9)),
        decode_threshold_db=float(rng.uniform(0.0, 90.0)),
        hbc=HbcParams(n_nonrt_clusters_mean=float(rng.uniform(0.0, 4.0))),
        fsc=FscParams(n_clusters_law=CountLaw("poisson_plus_one", float(rng.uniform(0.0, 4.0))),
                      dominant_lobe_offset_deg=None if rng.random() < 0.5 else (2.0, 8.0)),
        max_order=int(rng.integers(0, 3)),
        polarization=str(rng.choice(["TE", "TM"])),
        penetration_db=float(rng.uniform(0.0, 40.0)),
        queue_timeout_s=None if rng.random() < 0.5 else float(rng.uniform(0.001, 0.1)),
    )


class TestScenarioRoundTrip:
    def test_randomized_round_trip(self):
        rng = np.random.default_rng(2024)
        for _ in range(25):
            cfg = random_config(rng)
            assert loads_scenario(dumps_scenario(cfg)) == cfg

    def test_preset_round_trip(self, preset_path):
        cfg = load_scenario(preset_path)
        assert loads_scenario(dumps_scenario(cfg)) == cfg


class TestRayFiles:
    def paths(self, n_steps=3):
        room = Room.box(8.0, 5.0, 3.0)
        out = []
        for i in range(n_steps):
            rx = (6.0, 1.5 + 0.5 * i, 1.5)
            out.append(trace(room, (1.0, 2.0, 1.4), rx, 2))
        return out

    def test_round_trip_identity(self, tmp_path):
        snapshots = self.paths()
        f = tmp_path / "rays.txt"
        export_rays(snapshots, f)
        loaded = load_rays(f)
        assert len(loaded) == len(snapshots)
        for orig, back in zip(snapshots, loaded):
            assert len(orig) == len(back)
            for p, q in zip(orig, back):
                assert q.delay == p.delay
                assert q.gain_db == p.gain_db
                assert q.phase_rad == p.phase_rad
                assert (q.aoa_az, q.aoa_el, q.aod_az, q.aod_el) == \
                       (p.aoa_az, p.aoa_el, p.aod_az, p.aod_el)
                assert q.order == p.order
                assert q.delay * 3e8 == q.path_length

    def test_reexport_is_byte_identical(self, tmp_path):
        snapshots = self.paths()
        f1, f2 = tmp_path / "a.txt", tmp_path / "b.txt"
        export_rays(snapshots, f1)
        export_rays(load_rays(f1), f2)
        assert f1.read_bytes() == f2.read_bytes()

    def test_trace_example_has_seven_records(self, tmp_path):
        room = Room.box(8.0, 5.0, 3.0)
        paths = trace(room, (1.0, 1.0, 1.0), (6.0, 4.0, 2.0), 1)
        f = tmp_path / "r.txt"
        export_rays([paths], f)
        records = [ln for ln in f.read_text().splitlines() if not ln.startswith("#")]
        assert len(records) == 7

    def test_single_los_record_delay(self, tmp_path):
        room = Room.box(8.0, 5.0, 3.0)
        tx, rx = (1.0, 1.0, 1.0), (6.0, 4.0, 2.0)
        f = tmp_path / "r.txt"
        export_rays([trace(room, tx, rx, 0)], f)
        loaded = load_rays(f)
        assert loaded[0][0].delay == math.dist(tx, rx) / 3e8

    def test_empty_export_rejected(self, tmp_path):
        with pytest.raises(RayFileError):
            export_rays([[]], tmp_path / "e.txt")

    def test_unknown_version(self, tmp_path):
        f = tmp_path / "bad.txt"
        f.write_text("# thzlink-rays v99\n0 LOS 1e-9 0 0 0 0 0 0 0\n")
        with pytest.raises(RayFileError) as err:
            load_rays(f)
        assert "version" in str(err.value)

    def test_malformed_record_reports_index(self, tmp_path):
        f = tmp_path / "bad.txt"
        f.write_text("# thzlink-rays v1\n# header\n0 LOS 1e-9 0 0 0 0 0 0 0\n0 LOS broken\n")
        with pytest.raises(RayFileError) as err:
            load_rays(f)
        assert "record 1" in str(err.value)

    def test_not_a_ray_file(self, tmp_path):
        f = tmp_path / "x.txt"
        f.write_text("hello\n")
        with pytest.raises(RayFileError):
            load_rays(f)

    def test_empty_records(self, tmp_path):
        f = tmp_path / "x.txt"
        f.write_text("# thzlink-rays v1\n# header\n")
        with pytest.raises(RayFileError):
            load_rays(f)


class TestTables:
    def test_write_read_round_trip(self, tmp_path):
        rows = [(0.1, -75.2, 13.0), (0.2, -80.1, 270.0)]
        f = tmp_path / "t.tsv"
        write_table(f, ("a", "b", "c"), rows)
        back = read_table(f)
        assert np.array_equal(back, np.asarray(rows))

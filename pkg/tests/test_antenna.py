import math

import numpy as np
import pytest

from thzlink import AntennaMode, AntennaState, boresight_at, gain_db
from thzlink.antenna import gain_db_array, halfwidth_for_loss_db, wrap_angle_deg


def rotating(speed, phase=0.0, hpbw=8.0, gain=25.0):
    return AntennaState(gain, hpbw, rotation_speed_deg_per_s=speed,
                        initial_phase_deg=phase, mode=AntennaMode.ROTATING)


class TestBoresight:
    def test_static_ignores_time(self):
        ant = AntennaState(25.0, 8.0, initial_phase_deg=45.0)
        for t in (0.0, 0.25, 3.0, 1e4):
            assert boresight_at(ant, t) == 45.0

    def test_linear_rotation(self):
        assert boresight_at(rotating(360.0), 0.25) == pytest.approx(90.0)

    def test_periodicity(self):
        ant = rotating(360.0, phase=10.0)
        assert boresight_at(ant, 1.0) == pytest.approx(boresight_at(ant, 0.0))
        assert boresight_at(ant, 2.5) == pytest.approx(boresight_at(ant, 0.5))

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError):
            boresight_at(rotating(360.0), -1.0)


class TestGain:
    def test_boresight_gain_is_25dbi(self):
        ant = AntennaState(25.0, 8.0)
        assert gain_db(ant, 0.0) == pytest.approx(25.0)

    def test_hpbw_exactness(self):
        for hpbw in (2.0, 8.0, 10.0, 57.3, 180.0):
            ant = AntennaState(25.0, hpbw)
            assert abs(gain_db(ant, hpbw / 2.0) - 22.0) < 1e-9
            assert abs(gain_db(ant, -hpbw / 2.0) - 22.0) < 1e-9

    def test_omni(self):
        ant = AntennaState(25.0, 360.0)
        for az in np.linspace(0.0, 359.0, 25):
            assert gain_db(ant, az) == 25.0

    def test_symmetry(self):
        ant = AntennaState(25.0, 10.0)
        for delta in np.linspace(0.0, 180.0, 37):
            assert gain_db(ant, delta) == pytest.approx(gain_db(ant, -delta))

    def test_monotone_main_lobe(self):
        ant = AntennaState(25.0, 8.0)
        gains = [gain_db(ant, d) for d in np.linspace(0.0, 180.0, 181)]
        assert all(a >= b - 1e-12 for a, b in zip(gains[:-1], gains[1:]))

    def test_sidelobe_floor(self):
        ant = AntennaState(25.0, 10.0, sidelobe_floor_db=40.0)
        assert gain_db(ant, 90.0) == pytest.approx(25.0 - 40.0)
        assert gain_db(ant, 180.0) == pytest.approx(25.0 - 40.0)

    def test_rotation_periodicity_of_gain(self):
        ant = rotating(720.0, hpbw=10.0)
        period = 360.0 / 720.0
        for az in (0.0, 33.0, 170.0):
            assert gain_db(ant, az, 0.123) == pytest.approx(gain_db(ant, az, 0.123 + period))

    def test_vectorized_matches_scalar(self):
        ant = AntennaState(25.0, 8.0, initial_phase_deg=100.0)
        az = np.linspace(-30.0, 390.0, 101)
        vec = gain_db_array(ant, az, 0.0)
        for a, g in zip(az, vec):
            assert g == pytest.approx(gain_db(ant, float(a), 0.0), abs=1e-12)


class TestHelpers:
    def test_wrap(self):
        assert wrap_angle_deg(190.0) == -170.0
        assert wrap_angle_deg(-190.0) == 170.0
        assert wrap_angle_deg(180.0) == 180.0

    def test_halfwidth_inverts_pattern(self):
        ant = AntennaState(25.0, 8.0)
        for loss in (1.0, 3.0, 10.0, 30.0):
            delta = halfwidth_for_loss_db(ant, loss)
            assert gain_db(ant, delta) == pytest.approx(25.0 - loss, abs=1e-9)
        assert halfwidth_for_loss_db(ant, 3.0) == pytest.approx(4.0, abs=1e-9)

    def test_halfwidth_edge_cases(self):
        assert halfwidth_for_loss_db(AntennaState(0.0, 360.0), 3.0) == 180.0
        assert halfwidth_for_loss_db(AntennaState(0.0, 8.0, sidelobe_floor_db=40.0), 41.0) == 180.0
        assert halfwidth_for_loss_db(AntennaState(0.0, 8.0), 0.0) == 0.0


class TestValidation:
    def test_hpbw_bounds(self):
        with pytest.raises(ValueError):
            AntennaState(25.0, 0.0)
        with pytest.raises(ValueError):
            AntennaState(25.0, 361.0)
        with pytest.raises(ValueError):
            AntennaState(math.inf, 8.0)

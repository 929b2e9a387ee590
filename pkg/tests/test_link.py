import math

import numpy as np
import pytest

from thzlink import (AntennaState, FrequencyGrid, LinkDownError, achievable_rate,
                     airtime, gen_los_baseline, link_budget, rx_power)


class TestRxPower:
    def test_paper_link_budget_example(self, grid1):
        # 1 m, 140 GHz, 0 dBm, 25 dBi both ends, boresights on the LOS
        cir = gen_los_baseline(grid1, 1.0, aoa_az_deg=180.0, aod_az_deg=0.0)
        tx = AntennaState(25.0, 8.0).with_boresight(0.0)
        rx = AntennaState(25.0, 8.0).with_boresight(180.0)
        p = rx_power(cir, tx, rx, tx_power_dbm=0.0)
        assert p == pytest.approx(-25.36, abs=0.01)

    def test_omni_invariant_to_rotation_phase(self, grid64):
        cir = gen_los_baseline(grid64, 3.0)
        vals = []
        for phase in (0.0, 90.0, 271.0):
            tx = AntennaState(25.0, 360.0, initial_phase_deg=phase)
            rx = AntennaState(25.0, 360.0, initial_phase_deg=phase * 0.7)
            vals.append(rx_power(cir, tx, rx, 0.0))
        assert max(vals) - min(vals) == 0.0

    def test_sidelobe_floor_when_90deg_off(self, grid1):
        cir = gen_los_baseline(grid1, 1.0, aoa_az_deg=180.0, aod_az_deg=0.0)
        tx = AntennaState(25.0, 360.0)
        rx_on = AntennaState(25.0, 10.0).with_boresight(180.0)
        rx_off = AntennaState(25.0, 10.0).with_boresight(270.0)
        assert rx_power(cir, tx, rx_off, 0.0) == pytest.approx(
            rx_power(cir, tx, rx_on, 0.0) - 40.0)

    def test_monotone_in_max_gain(self, grid64):
        cir = gen_los_baseline(grid64, 3.0)
        powers = [rx_power(cir, AntennaState(g, 8.0).with_boresight(0.0),
                           AntennaState(10.0, 360.0), 0.0)
                  for g in (0.0, 10.0, 25.0)]
        assert powers == sorted(powers)

    def test_widening_hpbw_never_hurts_offboresight(self, grid1):
        # strongest Mpc 6 deg off boresight: widening from 4 to 8, 16, ... helps
        cir = gen_los_baseline(grid1, 2.0, aoa_az_deg=6.0, aod_az_deg=0.0)
        tx = AntennaState(0.0, 360.0)
        prev = -math.inf
        for hpbw in (4.0, 8.0, 16.0, 45.0, 360.0):
            p = rx_power(cir, tx, AntennaState(25.0, hpbw).with_boresight(0.0), 0.0)
            assert p >= prev - 1e-12
            prev = p


class TestAchievableRate:
    def test_below_threshold_is_zero(self):
        assert achievable_rate(-50.0, 32e9) == 0.0
        assert achievable_rate(9.9, 32e9, decode_threshold_db=10.0) == 0.0

    def test_shannon_at_0db(self):
        rate = achievable_rate(0.0, 32e9, decode_threshold_db=-10.0)
        assert rate == pytest.approx(32e9, rel=1e-12)

    def test_cap(self):
        assert achievable_rate(150.0, 32e9, max_rate_bps=100e9) == 100e9

    def test_monotone_in_snr(self):
        rates = [achievable_rate(s, 32e9, max_rate_bps=1e12) for s in range(0, 60, 5)]
        assert rates == sorted(rates)

    def test_bad_bandwidth(self):
        with pytest.raises(ValueError):
            achievable_rate(10.0, 0.0)


class TestAirtime:
    def test_microsecond_example(self):
        assert airtime(1250, 10e9) == pytest.approx(1e-6)

    def test_zero_bytes(self):
        assert airtime(0, 1e9) == 0.0

    def test_doubling_rate_halves_airtime(self):
        assert airtime(1500, 2e9) == pytest.approx(airtime(1500, 1e9) / 2.0)

    def test_zero_rate_is_link_down(self):
        with pytest.raises(LinkDownError):
            airtime(100, 0.0)


class TestLinkBudget:
    def test_consistency(self, grid1):
        cir = gen_los_baseline(grid1, 1.0)
        tx = AntennaState(25.0, 360.0)
        b = link_budget(cir, tx, tx, tx_power_dbm=0.0, noise_floor_dbm=-160.0,
                        bandwidth_hz=32e9, max_rate_bps=100e9)
        assert b.snr_db == pytest.approx(b.rx_power_dbm + 160.0)
        assert b.rate_bps == 100e9

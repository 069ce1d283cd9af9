"""Link budgets: reference arithmetic, conversions, and monotonicity."""

import math

import pytest

from fsorf.budget import (FsoBudget, RfBudget, fso_average_snr,
                          rf_average_snr, noise_power, db_to_linear,
                          linear_to_db, BOLTZMANN, GAIN_APERTURE)
from fsorf.channel import HETERODYNE, IM_DD


class TestNoisePower:
    def test_unit_construction(self):
        assert noise_power(1.0, 1.0 / BOLTZMANN) == pytest.approx(1.0,
                                                                  rel=1e-15)

    def test_optical_bandwidth_case(self):
        assert noise_power(30e9, 300.0) == pytest.approx(1.242e-10, rel=1e-12)

    def test_rf_bandwidth_case(self):
        assert noise_power(20e6, 300.0) == pytest.approx(8.28e-14, rel=1e-12)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            noise_power(0.0, 300.0)


class TestConversions:
    @pytest.mark.parametrize("db", [-170.0, -31.4159, 0.0, 3.0, 99.9])
    def test_round_trip(self, db):
        assert linear_to_db(db_to_linear(db)) == pytest.approx(db, abs=1e-12)

    def test_rejects_nonpositive_linear(self):
        with pytest.raises(ValueError):
            linear_to_db(0.0)


class TestFsoBudget:
    def test_printed_gain_value(self):
        # pi^2 D^2 / lambda with the 0.15 m lens at 1550 nm
        b = FsoBudget()
        assert b.lens_gain_db(0.15) == pytest.approx(51.5615056, abs=1e-4)

    def test_detector_exponent(self):
        b1 = FsoBudget(p_s_dbm=20.0)
        b2 = FsoBudget(p_s_dbm=23.0103)  # doubled power
        het = 10 * math.log10(fso_average_snr(b2, HETERODYNE)
                              / fso_average_snr(b1, HETERODYNE))
        imdd = 10 * math.log10(fso_average_snr(b2, IM_DD)
                               / fso_average_snr(b1, IM_DD))
        assert het == pytest.approx(3.0103, abs=1e-3)
        assert imdd == pytest.approx(6.0206, abs=1e-3)

    def test_monotone_in_losses(self):
        base = fso_average_snr(FsoBudget(), HETERODYNE)
        for field in ("a_atm_db", "a_fs_db", "l_lenses_db", "m_s_db"):
            worse = fso_average_snr(FsoBudget(**{field: 10.0 + FsoBudget().__getattribute__(field)}),
                                    HETERODYNE)
            assert worse < base

    def test_regression_values(self):
        # frozen at first build; printed-form and aperture-form gains
        assert fso_average_snr(FsoBudget(), HETERODYNE) == pytest.approx(
            3.621410188510309, rel=1e-12)
        assert fso_average_snr(FsoBudget(gain_model=GAIN_APERTURE),
                               HETERODYNE) == pytest.approx(
            2336393.6700066444, rel=1e-12)

    def test_rejects_bad_model(self):
        with pytest.raises(ValueError):
            FsoBudget(gain_model="exact")


class TestRfBudget:
    def test_default_slant_distance(self):
        b = RfBudget()
        assert b.user_distance_m == pytest.approx(
            math.hypot(17_000.0, 500.0), rel=1e-15)

    def test_regression_average_snr(self):
        # frozen at first build: 20 dBm with the reference geometry
        assert rf_average_snr(RfBudget()) == pytest.approx(
            49.8054810170079, rel=1e-12)

    def test_path_exponent_algebra(self):
        # halving distance at alpha_t = 2 gains 2 * 20 log10(2) / 2 = 6 dB
        b1 = RfBudget(user_distance_m=17_000.0)
        b2 = RfBudget(user_distance_m=8_500.0)
        gain = 10 * math.log10(rf_average_snr(b2) / rf_average_snr(b1))
        assert gain == pytest.approx(20.0 * math.log10(2.0) * 2.0 / 2.0,
                                     abs=1e-9)

    def test_monotone_in_distance(self):
        snrs = [rf_average_snr(RfBudget(user_distance_m=d))
                for d in (5e3, 1e4, 2e4, 5e4)]
        assert all(b < a for a, b in zip(snrs, snrs[1:]))

    def test_alpha_t_range_enforced(self):
        with pytest.raises(ValueError):
            RfBudget(alpha_t=5.0)
        with pytest.raises(ValueError):
            RfBudget(alpha_t=1.5)

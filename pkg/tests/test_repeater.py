import math

import numpy as np
import pytest

from rydgate import (DomainError, RepeaterConfig, double_excitation_error,
                     h2, mean_link_time, secret_key_rate,
                     swap_fidelity_propagation, swap_success_probability)
from rydgate.repeater import (LINEAR_OPTICS, PERFECT_SOURCE, RAMAN_SOURCE,
                              RYDBERG, gate_werner_factor,
                              repeater_curve_rows, secret_fraction)


def make_cfg(**kwargs):
    base = dict(total_distance=1000.0, n_stations=33, source_rate=1e6,
                c_b=25.0, c_b_prime=25.0)
    base.update(kwargs)
    return RepeaterConfig(**base)


class TestBinaryEntropy:
    def test_endpoints_and_midpoint(self):
        assert h2(0.0) == 0.0
        assert h2(1.0) == 0.0
        assert h2(0.5) == pytest.approx(1.0, rel=1e-15)

    def test_symmetry_and_concavity(self):
        qs = np.linspace(0.02, 0.98, 97)
        for q in qs:
            assert h2(q) == pytest.approx(h2(1.0 - q), rel=1e-12)
        for q in qs[1:-1]:
            chord = 0.5 * (h2(q - 0.02) + h2(q + 0.02))
            assert h2(q) >= chord - 1e-12

    def test_zero_rate_threshold_by_bisection(self):
        # root of 1 - 2 h2(Q): the BB84 QBER ceiling
        lo, hi = 0.01, 0.49
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if 1.0 - 2.0 * h2(mid) > 0.0:
                lo = mid
            else:
                hi = mid
        threshold = 0.5 * (lo + hi)
        assert threshold == pytest.approx(0.110028, abs=1e-5)
        assert secret_fraction(threshold + 1e-4) == 0.0
        assert secret_fraction(threshold - 1e-3) > 0.0


class TestSwapSuccess:
    def test_linear_optics_cap(self):
        cfg = make_cfg(swap_model=LINEAR_OPTICS, eta_detector=1.0,
                       eta_readout=1.0)
        assert swap_success_probability(cfg) == pytest.approx(0.5)

    def test_linear_optics_detection_adjusted(self):
        cfg = make_cfg(swap_model=LINEAR_OPTICS)
        assert swap_success_probability(cfg) == pytest.approx(0.5 * 0.81)

    def test_rydberg_perfect_blockade(self):
        cfg = make_cfg(c_b=1e9, c_b_prime=1e9, eta_detector=1.0,
                       eta_readout=1.0)
        assert swap_success_probability(cfg) == pytest.approx(1.0, abs=1e-8)

    def test_rydberg_reference_point(self):
        # Cb = Cb' = 8, unit efficiencies: 1 - 8/145
        cfg = make_cfg(c_b=8.0, c_b_prime=8.0, eta_detector=1.0,
                       eta_readout=1.0)
        assert swap_success_probability(cfg) == pytest.approx(
            1.0 - 8.0 / 145.0, rel=1e-12)
        assert swap_success_probability(cfg) == pytest.approx(0.94483,
                                                              abs=5e-6)


class TestWernerPropagation:
    def test_identity_cases(self):
        cfg = make_cfg(swap_model=LINEAR_OPTICS)
        assert swap_fidelity_propagation(1.0, 1.0, cfg) == pytest.approx(1.0)
        for w in (0.2, 0.7, 0.95):
            assert swap_fidelity_propagation(w, w, cfg) == pytest.approx(
                w * w, rel=1e-14)

    def test_gate_depolarizing_map(self):
        # w_gate = (4 F_swap - 1)/3; F_swap(8, 8) = 0.990234375
        cfg = make_cfg(c_b=8.0, c_b_prime=8.0)
        want = (4.0 * 0.990234375 - 1.0) / 3.0
        assert gate_werner_factor(cfg) == pytest.approx(want, rel=1e-12)
        assert gate_werner_factor(cfg) == pytest.approx(0.98698, abs=1e-5)

    def test_out_of_range_rejected(self):
        cfg = make_cfg()
        with pytest.raises(DomainError):
            swap_fidelity_propagation(1.2, 0.5, cfg)


class TestLinkTime:
    def test_unit_case(self):
        # p0 = 1 and one link: the mean time is one attempt period
        cfg = make_cfg(n_stations=2, eta_detector=1.0,
                       attenuation_length=1e12, source_rate=1e6)
        period = max(1e-6, cfg.total_distance / cfg.signal_speed)
        assert mean_link_time(cfg, links_used=1) == pytest.approx(period,
                                                                  rel=1e-9)

    def test_attenuation_monotone(self):
        cfg = make_cfg()
        t1 = mean_link_time(cfg, links_used=32)
        t2 = mean_link_time(make_cfg(attenuation_length=44.0), links_used=32)
        assert t2 < t1

    def test_reference_attenuation_factor(self):
        # 32 links over 1000 km: exp(-31.25/44)
        cfg = make_cfg(eta_detector=1.0)
        t = mean_link_time(cfg, links_used=32)
        period = max(1e-6, 31.25 / 2e5)
        p0 = math.exp(-31.25 / 44.0)
        assert p0 == pytest.approx(0.4915, abs=2e-4)
        assert t == pytest.approx(period / p0, rel=1e-12)

    def test_travel_time_limits_fast_sources(self):
        slow = make_cfg(source_rate=1e6)
        fast = make_cfg(source_rate=1e8)
        assert mean_link_time(slow, 32) == pytest.approx(
            mean_link_time(fast, 32), rel=1e-12)


class TestSecretKeyRate:
    def test_perfect_state_perfect_gate(self):
        cfg = make_cfg(n_stations=2, c_b=1e9, c_b_prime=1e9)
        res = secret_key_rate(cfg)
        assert res.qber == pytest.approx(0.0, abs=1e-9)
        assert res.werner_parameter == pytest.approx(1.0, abs=1e-8)
        assert res.r_secret_per_station > 0.0

    def test_calibration_point(self):
        # 1000 km, 33 stations, C_b = 25: within a factor of 2 of 1.5 Hz
        res = secret_key_rate(make_cfg())
        assert 0.75 <= res.r_secret_per_station <= 3.0
        assert res.swap_levels_used == 5

    def test_low_fidelity_collapses_to_direct_link(self):
        # the gate is too poor for any swap level; the optimizer falls back
        # to the unswapped link whose rate is throttled by fiber loss
        res = secret_key_rate(make_cfg(c_b=1.2, c_b_prime=1.2))
        assert res.swap_levels_used == 0
        assert res.r_secret_per_station < 1e-6

    def test_zero_rate_is_valid_result(self):
        res = secret_key_rate(make_cfg(eta_detector=0.0))
        assert res.r_secret_per_station == 0.0
        assert res.qber <= 0.5

    def test_steps_in_levels(self):
        cfg = make_cfg()
        rows = repeater_curve_rows(cfg, np.linspace(3.0, 30.0, 14))
        levels = [r["levels"] for r in rows]
        rates = [r["rate_hz_per_station"] for r in rows]
        assert all(b >= a for a, b in zip(levels, levels[1:]))
        assert len(set(levels)) > 1
        assert all(b >= a - 1e-12 for a, b in zip(rates, rates[1:]))

    def test_rydberg_beats_linear_optics_at_high_cooperativity(self):
        ryd = secret_key_rate(make_cfg(c_b=40.0, c_b_prime=40.0))
        lin = secret_key_rate(make_cfg(swap_model=LINEAR_OPTICS))
        assert ryd.r_secret_per_station > lin.r_secret_per_station
        # and the ordering flips somewhere at low cooperativity
        weak = secret_key_rate(make_cfg(c_b=1.5, c_b_prime=1.5))
        assert weak.r_secret_per_station < lin.r_secret_per_station

    def test_crossover_is_single(self):
        lin = secret_key_rate(make_cfg(swap_model=LINEAR_OPTICS))
        grid = np.linspace(2.0, 50.0, 25)
        rows = repeater_curve_rows(make_cfg(), grid)
        gains = [r["rate_hz_per_station"] > lin.r_secret_per_station
                 for r in rows]
        # once the Rydberg swap wins it keeps winning
        first_win = gains.index(True)
        assert all(gains[first_win:])

    def test_raman_source_optimization(self):
        res = secret_key_rate(make_cfg(source_model=RAMAN_SOURCE))
        perfect = secret_key_rate(make_cfg(source_model=PERFECT_SOURCE))
        assert 0.0 < res.r_secret_per_station <= \
            perfect.r_secret_per_station * (1 + 1e-9)


class TestDoubleExcitation:
    def test_no_emission_no_error(self):
        cfg = make_cfg(source_model=RAMAN_SOURCE)
        assert double_excitation_error(cfg, 0.0) == 1.0

    def test_linear_model(self):
        cfg = make_cfg(source_model=RAMAN_SOURCE, c_dx=1.0)
        assert double_excitation_error(cfg, 0.01) == pytest.approx(0.99)

    def test_perfect_source_skips_term(self):
        cfg = make_cfg(source_model=PERFECT_SOURCE)
        assert double_excitation_error(cfg, 0.5) == 1.0


class TestConfigValidation:
    def test_links_power_of_two(self):
        with pytest.raises(DomainError, match="power of two"):
            make_cfg(n_stations=12)

    def test_efficiency_range(self):
        with pytest.raises(DomainError):
            make_cfg(eta_detector=1.5)

    def test_bandwidth_needs_params(self):
        with pytest.raises(DomainError):
            make_cfg(pulse_variance=1.0)

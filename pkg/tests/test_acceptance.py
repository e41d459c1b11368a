"""Acceptance gate: one test per criterion, each printing a PASS line with
the measured values once its assertions hold.

Values tested here were frozen from independent oracles (radial quadrature,
direct complex arithmetic, high-order finite differences, bisection), not
from the code paths under test.
"""

import time
import warnings

import numpy as np
import pytest

from rydgate import (PulseSpectrum, RepeaterConfig, blocked_shell_model,
                     continuum_cooperativity, fcj_dual_conditional,
                     fcj_single_rail_exact, fcj_single_rail_leading,
                     fswap_bandwidth_term, fswap_exact, fswap_leading,
                     make_reflection_spectrum, monte_carlo_cooperativity,
                     reflection_exact, taylor_coefficients)
from rydgate.gatefid import _synthetic_coop, eit_width, fidelity_curve_rows
from rydgate.repeater import LINEAR_OPTICS, repeater_curve_rows, secret_key_rate
from rydgate.scatter import finite_difference_taylor

DELTA = PulseSpectrum.delta()


def report(n, text):
    print(f"\nACCEPTANCE {n}: PASS - {text}")


def test_criterion_1_blockaded_cooperativity(params, ensemble):
    coop = continuum_cooperativity(params, ensemble)  # warm
    t0 = time.perf_counter()
    for _ in range(100):
        coop = continuum_cooperativity(params, ensemble)
    per_call = (time.perf_counter() - t0) / 100
    assert coop.c_b == pytest.approx(8.1, abs=0.1)
    assert per_call < 1e-3
    report(1, f"continuum C_b = {coop.c_b:.4f} (8.1 +- 0.1), "
              f"{per_call * 1e6:.1f} us per call")


def test_criterion_2_fidelity_reference_points(params):
    coop = _synthetic_coop(8.0 - 8.0j, params)
    f_swap, _ = fswap_leading(coop, params, DELTA)
    f_cj = fcj_single_rail_leading(coop, params, DELTA)
    assert f_swap > 0.99
    assert f_swap == pytest.approx(0.9902, abs=1e-4)
    assert f_cj == pytest.approx(0.9379, abs=1e-4)
    t0 = time.perf_counter()
    rows = fidelity_curve_rows(np.linspace(2.0, 50.0, 100), 1.0, params,
                               DELTA)
    elapsed = time.perf_counter() - t0
    assert len(rows) == 100
    assert elapsed < 1.0
    report(2, f"F_swap(8,8) = {f_swap:.6f} > 0.99, F_CJ = {f_cj:.6f}; "
              f"100-point curve in {elapsed * 1e3:.1f} ms")


def test_criterion_3_bandwidth_budget(params):
    # NC = 20 with the reference drive and cavity, T = 300 ns
    pulse = PulseSpectrum.from_duration_ns(300.0)
    term = fswap_bandwidth_term(params, pulse)
    assert term == pytest.approx(0.0172, abs=5e-4)
    assert term < 0.02
    report(3, f"Eq.-(10)-level bandwidth term = {term:.5f} "
              "(0.0172 +- 0.0005, below 2%)")


def test_criterion_4_oracle_equivalence(params, rng):
    t0 = time.perf_counter()
    worst_gap = 0.0
    worst_fd1 = worst_fd2 = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for i in range(200):
            cb_target = 10 ** rng.uniform(np.log10(5.0), 2.0)
            total, v, mult, coop = blocked_shell_model(params, cb_target)
            dw = 10 ** rng.uniform(-3.0, -1.0) * eit_width(total)
            pulse = PulseSpectrum("gaussian", variance=dw * dw)
            spectrum = make_reflection_spectrum(total, v=v, weights=mult)
            bound = 2.0 / coop.c_b ** 2

            exact_cj = fcj_single_rail_exact(spectrum, pulse)
            lead_cj = fcj_single_rail_leading(coop, total, pulse)
            exact_sw, _ = fswap_exact(spectrum, pulse)
            lead_sw, _ = fswap_leading(coop, total, pulse)
            assert abs(exact_cj - lead_cj) <= bound
            assert abs(exact_sw - lead_sw) <= bound
            worst_gap = max(worst_gap, abs(exact_cj - lead_cj) / bound,
                            abs(exact_sw - lead_sw) / bound)

            if i % 10 == 0:  # Taylor-vs-finite-difference on a subgrid
                triple = taylor_coefficients(coop, total)
                fd = finite_difference_taylor(
                    lambda w: reflection_exact(total, w, v=v, weights=mult),
                    0.0, total.kappa)
                rel1 = abs(fd[1] - triple[1]) / abs(fd[1])
                rel2 = abs(fd[2] - triple[2]) / abs(fd[2])
                assert rel1 < 1e-6
                assert rel2 < 1e-4
                worst_fd1 = max(worst_fd1, rel1)
                worst_fd2 = max(worst_fd2, rel2)
    elapsed = time.perf_counter() - t0
    assert elapsed < 30.0
    report(4, f"200-point grid: worst |exact-leading| at {worst_gap:.2f} of "
              f"the 2/C_b^2 bound; FD rel errs R' {worst_fd1:.1e}, "
              f"R'' {worst_fd2:.1e}; {elapsed:.1f} s")


def test_criterion_5_eit_identity(params):
    val = reflection_exact(params, 0.0)
    assert abs(val - (1.0 + 0.0j)) < 1e-12
    report(5, f"|R_g(0) - (1 + 0i)| = {abs(val - 1.0):.2e} (< 1e-12)")


def test_criterion_6_monte_carlo(params, ensemble):
    closed = continuum_cooperativity(params, ensemble).c_b
    t0 = time.perf_counter()
    mc = monte_carlo_cooperativity(params, ensemble, n_samples=100_000,
                                   seed=20240817)
    elapsed = time.perf_counter() - t0
    err_1e5 = abs(mc.c_b - closed) / closed
    assert err_1e5 < 0.02
    assert elapsed < 10.0

    # doubling the sample count shrinks the rms error like 1/sqrt(N)
    seeds = range(8)
    rms1 = np.sqrt(np.mean([
        (monte_carlo_cooperativity(params, ensemble, 50_000, seed=s).c_b
         / closed - 1.0) ** 2 for s in seeds]))
    rms2 = np.sqrt(np.mean([
        (monte_carlo_cooperativity(params, ensemble, 100_000,
                                   seed=s + 100).c_b
         / closed - 1.0) ** 2 for s in seeds]))
    ratio = rms2 / rms1
    assert 0.4 < ratio < 1.0  # 1/sqrt(2) = 0.707 with 8-seed scatter
    report(6, f"MC C_b rel err {err_1e5:.3%} at 1e5 samples in "
              f"{elapsed:.2f} s; rms ratio on doubling {ratio:.2f} "
              "(1/sqrt(2) expected)")


def test_criterion_7_repeater_calibration():
    cfg = RepeaterConfig(total_distance=1000.0, n_stations=33,
                         source_rate=1e6, c_b=25.0, c_b_prime=25.0)
    res = secret_key_rate(cfg)
    assert 0.75 <= res.r_secret_per_station <= 3.0

    t0 = time.perf_counter()
    grid = np.linspace(3.0, 40.0, 20)
    ryd_rows = repeater_curve_rows(cfg, grid)
    elapsed = time.perf_counter() - t0
    assert elapsed < 5.0

    lin = secret_key_rate(RepeaterConfig(
        total_distance=1000.0, n_stations=33, source_rate=1e6,
        swap_model=LINEAR_OPTICS))
    assert ryd_rows[-1]["rate_hz_per_station"] > lin.r_secret_per_station

    levels = [r["levels"] for r in ryd_rows]
    assert all(b >= a for a, b in zip(levels, levels[1:]))
    assert len(set(levels)) > 1  # discrete steps as depth unlocks
    report(7, f"rate(C_b=25) = {res.r_secret_per_station:.3f} Hz/station "
              f"(1.5 Hz within x2); Rydberg beats linear optics "
              f"({lin.r_secret_per_station:.3f} Hz) at large C_b; levels "
              f"step {min(levels)} -> {max(levels)}; curve in "
              f"{elapsed:.2f} s")


def test_criterion_8_conditioning_inequality(params, rng):
    worst_gap_delta = 0.0
    for cb in (5.0, 8.0, 20.0, 60.0):
        total, v, mult, _ = blocked_shell_model(params, cb)
        spectrum = make_reflection_spectrum(total, v=v, weights=mult)
        f_swap, _ = fswap_exact(spectrum, DELTA)
        f_dual = fcj_dual_conditional(spectrum, DELTA)
        assert f_dual <= f_swap + 1e-12
        worst_gap_delta = max(worst_gap_delta, abs(f_dual - f_swap))

        for _ in range(3):
            dw = 10 ** rng.uniform(-3.0, -1.0) * eit_width(total)
            pulse = PulseSpectrum("gaussian", variance=dw * dw)
            f_swap, _ = fswap_exact(spectrum, pulse)
            f_dual = fcj_dual_conditional(spectrum, pulse)
            assert f_dual <= f_swap + 1e-12
    assert worst_gap_delta < 1e-10
    report(8, f"F'_CJ <= F_swap everywhere; delta-pulse equality gap "
              f"{worst_gap_delta:.1e} (< 1e-10)")

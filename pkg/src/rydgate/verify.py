"""Built-in verification suite: every module's invariants as quick,
self-contained checks runnable from the CLI (`rydgate verify`).

Each check returns (name, passed, detail).  The suite favors independent
oracles: radial quadrature against the closed-form cooperativity, finite
differences against the Taylor expansion, brute-force complex arithmetic
against the inhomogeneous average, and the exact frequency integrals
against the leading-order fidelity formulas.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from . import blockade, gatefid, repeater, scatter
from .core import (AtomCavityParams, PulseSpectrum, gaussian_moment,
                   integrate_spectrum, mhz_to_rad_per_us, spectral_density)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def reference_params(n_atoms: int = 800) -> AtomCavityParams:
    """Cavity and drive rates of the reference operating point."""
    return AtomCavityParams(
        kappa=mhz_to_rad_per_us(10.0),
        gamma_e=mhz_to_rad_per_us(3.0),
        omega_drive=mhz_to_rad_per_us(36.0),
        coop_single=0.025,
        n_atoms=n_atoms,
    )


def reference_ensemble() -> blockade.EnsembleModel:
    return blockade.EnsembleModel(density=0.25,
                                  c6=mhz_to_rad_per_us(8.31e6))


def _check(name: str, passed: bool, detail: str) -> CheckResult:
    return CheckResult(name=name, passed=bool(passed), detail=detail)


def check_pulse_normalization() -> CheckResult:
    worst = 0.0
    for pulse in (PulseSpectrum("gaussian", variance=4.0, center=1.3),
                  PulseSpectrum("lorentzian", variance=0.25, center=-2.0)):
        total = integrate_spectrum(pulse, lambda w: 1.0)
        worst = max(worst, abs(total.real - 1.0), abs(total.imag))
    return _check("pulse-normalization", worst < 1e-9,
                  f"max deviation {worst:.2e}")


def check_gaussian_moments() -> CheckResult:
    pulse = PulseSpectrum("gaussian", variance=2.5, center=0.7)
    worst = 0.0
    for order in range(5):
        got = integrate_spectrum(
            pulse, lambda w, k=order: (w - pulse.center) ** k).real
        want = gaussian_moment(pulse.variance, order)
        scale = max(1.0, abs(want))
        worst = max(worst, abs(got - want) / scale)
    return _check("gaussian-moments", worst < 1e-8, f"max rel err {worst:.2e}")


def check_delta_pulse_evaluation() -> CheckResult:
    pulse = PulseSpectrum.delta(center=0.4)
    f = lambda w: w * w + 1j * w
    val = integrate_spectrum(pulse, f)
    ok = val == complex(f(0.4))  # exactly the point evaluation
    return _check("delta-pulse-point-evaluation", ok, f"got {val}")


def check_continuum_vs_quadrature() -> CheckResult:
    params = reference_params()
    ens = reference_ensemble()
    coop = blockade.continuum_cooperativity(params, ens)
    zeta = blockade.interaction_zeta(params, ens)
    pref = 4.0 * math.pi * ens.density * params.coop_single
    re = quad(lambda r: r * r / (1.0 + zeta ** 2 * r ** 12),
              0.0, np.inf, epsabs=1e-13, epsrel=1e-12)[0]
    im = quad(lambda r: -zeta * r ** 8 / (1.0 + zeta ** 2 * r ** 12),
              0.0, np.inf, epsabs=1e-13, epsrel=1e-12)[0]
    want = pref * complex(re, im)
    err = abs(coop.c_star_v - want) / abs(want)
    return _check("continuum-closed-form-vs-quadrature", err < 1e-6,
                  f"rel err {err:.2e}, C_b = {coop.c_b:.4f}")


def check_continuum_moments_vs_quadrature() -> CheckResult:
    params = reference_params()
    ens = reference_ensemble()
    coop = blockade.continuum_cooperativity(params, ens)
    zeta = blockade.interaction_zeta(params, ens)
    pref = 4.0 * math.pi * ens.density * params.coop_single

    def moment(j):
        re = quad(lambda r: (r * r * (1.0 / (1.0 + 1j * zeta * r ** 6) ** j).real),
                  0.0, np.inf, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
        im = quad(lambda r: (r * r * (1.0 / (1.0 + 1j * zeta * r ** 6) ** j).imag),
                  0.0, np.inf, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
        return pref * complex(re, im)

    err2 = abs(coop.c_alpha_blocked - moment(2)) / abs(moment(2))
    err3 = abs(coop.c_beta_blocked - moment(3)) / abs(moment(3))
    worst = max(err2, err3)
    return _check("continuum-moments-vs-quadrature", worst < 1e-6,
                  f"rel errs M2 {err2:.2e}, M3 {err3:.2e}")


def check_monte_carlo() -> CheckResult:
    params = reference_params()
    ens = reference_ensemble()
    closed = blockade.continuum_cooperativity(params, ens).c_b
    mc = blockade.monte_carlo_cooperativity(params, ens, n_samples=20000,
                                            seed=20240817)
    err = abs(mc.c_b - closed) / closed
    return _check("monte-carlo-vs-continuum", err < 0.05,
                  f"rel err {err:.3%} at 2e4 samples")


def check_eit_identity() -> CheckResult:
    params = reference_params()
    val = scatter.reflection_exact(params, 0.0)
    err = abs(val - 1.0)
    return _check("eit-identity", err < 1e-12, f"|R_g(0) - 1| = {err:.2e}")


def check_far_detuned_mirror() -> CheckResult:
    params = reference_params()
    worst = 0.0
    for sign in (-1.0, 1.0):
        val = scatter.reflection_exact(params, sign * 1e6 * params.kappa)
        worst = max(worst, abs(val + 1.0))
    return _check("far-detuned-mirror", worst < 1e-5, f"|R + 1| = {worst:.2e}")


def check_passivity() -> CheckResult:
    params = reference_params(n_atoms=50)
    grid = np.linspace(-40.0 * params.kappa, 40.0 * params.kappa, 4001)
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(4):
        v = -10 ** rng.uniform(-1, 5, size=50)
        r = scatter.reflection_exact(params, grid, v=v)
        worst = max(worst, float(np.max(np.abs(r))))
    return _check("passivity", worst <= 1.0 + 1e-12, f"max |R| = {worst:.12f}")


def check_consistency_reflection_vs_cooperativity() -> CheckResult:
    params = reference_params(n_atoms=12)
    rng = np.random.default_rng(3)
    pos = rng.uniform(-8.0, 8.0, size=(12, 3))
    ens = blockade.EnsembleModel(positions=pos,
                                 c6=mhz_to_rad_per_us(8.31e6))
    coop = blockade.discrete_cooperativity(params, ens, stored_at=0)
    via_coop = scatter.reflection_from_cooperativity(coop)
    direct = scatter.reflection_exact(params, 0.0, ens=ens, stored_at=0)
    err = abs(via_coop - direct)
    return _check("reflection-consistency", err < 1e-12, f"|diff| = {err:.2e}")


def check_taylor_vs_finite_difference() -> CheckResult:
    params = reference_params()
    worst1 = worst2 = 0.0
    for cb in (5.0, 20.0, 80.0):
        params_tot, v, mult, coop = scatter.blocked_shell_model(params, cb)
        triple = scatter.taylor_coefficients(coop, params_tot)
        fd = scatter.finite_difference_taylor(
            lambda w: scatter.reflection_exact(params_tot, w, v=v,
                                               weights=mult),
            0.0, params_tot.kappa)
        worst1 = max(worst1, abs(fd[1] - triple[1]) / abs(fd[1]))
        worst2 = max(worst2, abs(fd[2] - triple[2]) / abs(fd[2]))
    eit = scatter.eit_cooperativity(params)
    triple = scatter.taylor_coefficients(eit, params)
    fd = scatter.finite_difference_taylor(
        lambda w: scatter.reflection_exact(params, w), 0.0, params.kappa)
    worst1 = max(worst1, abs(fd[1] - triple[1]) / abs(fd[1]))
    worst2 = max(worst2, abs(fd[2] - triple[2]) / abs(fd[2]))
    ok = worst1 < 1e-6 and worst2 < 1e-4
    return _check("taylor-vs-finite-difference", ok,
                  f"rel errs R' {worst1:.2e}, R'' {worst2:.2e}")


def check_eit_bandwidth_dominance() -> CheckResult:
    params = reference_params()
    ok = True
    for cb in (5.0, 10.0, 40.0):
        params_tot, v, mult, coop = scatter.blocked_shell_model(params, cb)
        r1_blocked = scatter.taylor_coefficients(coop, params_tot)[1]
        r1_eit = scatter.taylor_coefficients(
            scatter.eit_cooperativity(params_tot), params_tot)[1]
        ok = ok and abs(r1_eit) >= abs(r1_blocked)
    return _check("eit-bandwidth-dominance", ok,
                  "|R'_eit| >= |R'_blocked| on the reference grid")


def check_fidelity_expansion_bound() -> CheckResult:
    params = reference_params()
    pulse = PulseSpectrum.delta()
    worst = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for cb in (5.0, 12.0, 40.0, 100.0):
            params_tot, v, mult, coop = scatter.blocked_shell_model(params, cb)
            spectrum = scatter.make_reflection_spectrum(params_tot, v=v,
                                                        weights=mult)
            exact_cj = gatefid.fcj_single_rail_exact(spectrum, pulse)
            lead_cj = gatefid.fcj_single_rail_leading(coop, params_tot, pulse)
            exact_sw, _ = gatefid.fswap_exact(spectrum, pulse)
            lead_sw, _ = gatefid.fswap_leading(coop, params_tot, pulse)
            bound = 2.0 / coop.c_b ** 2
            worst = max(worst, abs(exact_cj - lead_cj) / bound,
                        abs(exact_sw - lead_sw) / bound)
    return _check("fidelity-expansion-bound", worst <= 1.0,
                  f"worst |exact - leading| at {worst:.2f} of the 2/C_b^2 bound")


def check_conditional_equality() -> CheckResult:
    params = reference_params()
    pulse = PulseSpectrum.delta()
    params_tot, v, mult, _ = scatter.blocked_shell_model(params, 8.0)
    spectrum = scatter.make_reflection_spectrum(params_tot, v=v, weights=mult)
    f_swap, _ = gatefid.fswap_exact(spectrum, pulse)
    f_dual = gatefid.fcj_dual_conditional(spectrum, pulse)
    gap = abs(f_swap - f_dual)
    return _check("delta-pulse-conditional-equality", gap < 1e-10,
                  f"|F'_CJ - F_swap| = {gap:.2e}")


def check_fswap_monotonicity() -> CheckResult:
    params = reference_params()
    pulse = PulseSpectrum.delta()
    grid = np.linspace(2.0, 60.0, 30)
    last_f = last_p = -1.0
    ok = True
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for cb in grid:
            coop = gatefid._synthetic_coop(complex(cb, -cb), params)
            f, p = gatefid.fswap_leading(coop, params, pulse)
            ok = ok and f >= last_f - 1e-12 and p >= last_p - 1e-12
            last_f, last_p = f, p
    return _check("fswap-monotonicity", ok,
                  "F_swap and P_suc nondecreasing along C_b = C_b'")


def check_binary_entropy() -> CheckResult:
    ok = (repeater.h2(0.0) == 0.0 and repeater.h2(1.0) == 0.0
          and abs(repeater.h2(0.5) - 1.0) < 1e-15)
    qs = np.linspace(0.01, 0.99, 49)
    for q in qs:
        mid = repeater.h2(q)
        chord = 0.5 * (repeater.h2(q - 0.01) + repeater.h2(q + 0.01))
        ok = ok and mid >= chord - 1e-12  # concavity
        ok = ok and abs(repeater.h2(q) - repeater.h2(1.0 - q)) < 1e-12
    return _check("binary-entropy", ok, "endpoints, midpoint, concavity")


def check_repeater_steps() -> CheckResult:
    cfg = repeater.RepeaterConfig(total_distance=1000.0, n_stations=33,
                                  source_rate=1e6)
    rows = repeater.repeater_curve_rows(cfg, np.linspace(3.0, 30.0, 12))
    levels = [r["levels"] for r in rows]
    rates = [r["rate_hz_per_station"] for r in rows]
    nondecreasing = all(b >= a for a, b in zip(levels, levels[1:]))
    stepped = len(set(levels)) > 1
    rate_monotone = all(b >= a - 1e-12 for a, b in zip(rates, rates[1:]))
    ok = nondecreasing and stepped and rate_monotone
    return _check("repeater-steps", ok,
                  f"levels {min(levels)} -> {max(levels)} across the sweep")


ALL_CHECKS: tuple[Callable[[], CheckResult], ...] = (
    check_pulse_normalization,
    check_gaussian_moments,
    check_delta_pulse_evaluation,
    check_continuum_vs_quadrature,
    check_continuum_moments_vs_quadrature,
    check_monte_carlo,
    check_eit_identity,
    check_far_detuned_mirror,
    check_passivity,
    check_consistency_reflection_vs_cooperativity,
    check_taylor_vs_finite_difference,
    check_eit_bandwidth_dominance,
    check_fidelity_expansion_bound,
    check_conditional_equality,
    check_fswap_monotonicity,
    check_binary_entropy,
    check_repeater_steps,
)


def run_all_checks() -> list[CheckResult]:
    return [fn() for fn in ALL_CHECKS]

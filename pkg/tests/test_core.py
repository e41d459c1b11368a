import math

import numpy as np
import pytest

from rydgate import (AtomCavityParams, DomainError, PerAtomOverrides,
                     PulseSpectrum, integrate_spectrum, spectral_density)
from rydgate.core import gaussian_moment
from rydgate.scatter import eit_cooperativity, taylor_coefficients


class TestAtomCavityParams:
    def test_derived_coupling_single_source_of_truth(self, params):
        assert params.g_squared == pytest.approx(
            0.025 * params.kappa * params.gamma_e, rel=1e-15)
        assert params.half_rabi_sq == pytest.approx(
            (params.omega_drive / 2) ** 2, rel=1e-15)

    @pytest.mark.parametrize("field,value", [
        ("kappa", 0.0), ("kappa", -1.0), ("gamma_e", 0.0),
        ("gamma_r", -0.1), ("coop_single", -0.5), ("n_atoms", 0),
    ])
    def test_invalid_rates_rejected(self, field, value):
        kwargs = dict(kappa=1.0, gamma_e=1.0, omega_drive=1.0,
                      coop_single=0.1, n_atoms=5)
        kwargs[field] = value
        with pytest.raises(DomainError):
            AtomCavityParams(**kwargs)

    def test_override_length_mismatch(self, params):
        with pytest.raises(DomainError):
            PerAtomOverrides(omega_drive_l=(1.0, 2.0)).validate(params.n_atoms)


class TestSpectralDensity:
    def test_gaussian_peak(self):
        pulse = PulseSpectrum("gaussian", variance=1.0)
        assert spectral_density(pulse, 0.0) == pytest.approx(
            1.0 / math.sqrt(2 * math.pi), rel=1e-12)

    def test_gaussian_symmetry(self, rng):
        pulse = PulseSpectrum("gaussian", variance=3.7, center=1.9)
        for x in rng.uniform(0, 10, size=20):
            assert spectral_density(pulse, pulse.center + x) == pytest.approx(
                spectral_density(pulse, pulse.center - x), rel=1e-14)

    def test_lorentzian_peak(self):
        gamma = 2.3
        pulse = PulseSpectrum("lorentzian", variance=gamma ** 2)
        assert spectral_density(pulse, 0.0) == pytest.approx(
            1.0 / (math.pi * gamma), rel=1e-12)

    def test_lorentzian_symmetry(self, rng):
        pulse = PulseSpectrum("lorentzian", variance=0.81, center=-0.4)
        for x in rng.uniform(0, 10, size=20):
            assert spectral_density(pulse, pulse.center + x) == pytest.approx(
                spectral_density(pulse, pulse.center - x), rel=1e-14)

    def test_delta_pointwise_rejected(self):
        with pytest.raises(DomainError):
            spectral_density(PulseSpectrum.delta(), 0.0)

    def test_delta_requires_zero_variance(self):
        with pytest.raises(DomainError):
            PulseSpectrum("delta", variance=1.0)
        with pytest.raises(DomainError):
            PulseSpectrum("gaussian", variance=0.0)


class TestIntegrateSpectrum:
    @pytest.mark.parametrize("pulse", [
        PulseSpectrum("gaussian", variance=2.0, center=0.5),
        PulseSpectrum("lorentzian", variance=1.44, center=-1.0),
        PulseSpectrum.delta(center=3.0),
    ])
    def test_normalization(self, pulse):
        total = integrate_spectrum(pulse, lambda w: 1.0)
        assert total.real == pytest.approx(1.0, rel=1e-9)
        assert abs(total.imag) < 1e-12

    def test_variance_definition(self):
        v = 7.2
        pulse = PulseSpectrum("gaussian", variance=v, center=2.0)
        got = integrate_spectrum(pulse, lambda w: (w - 2.0) ** 2)
        assert got.real == pytest.approx(v, rel=1e-9)

    def test_delta_equals_point_evaluation(self):
        pulse = PulseSpectrum.delta(center=0.7)
        f = lambda w: math.cos(w) + 1j * w ** 3
        assert integrate_spectrum(pulse, f) == complex(f(0.7))

    def test_gaussian_moments_to_degree_four(self):
        pulse = PulseSpectrum("gaussian", variance=2.5, center=1.1)
        for order in range(5):
            got = integrate_spectrum(
                pulse, lambda w, k=order: (w - 1.1) ** k).real
            want = gaussian_moment(2.5, order)
            assert got == pytest.approx(want, rel=1e-8, abs=1e-9)

    def test_complex_integrand(self):
        pulse = PulseSpectrum("gaussian", variance=1.0)
        got = integrate_spectrum(pulse, lambda w: 1j * w * w)
        assert got == pytest.approx(1j, rel=1e-9)

    def test_eit_average_matches_taylor_expansion(self, params):
        # pulse average of the unblocked reflection vs its quadratic model
        from rydgate import reflection_exact
        pulse = PulseSpectrum.from_duration_ns(300.0)
        got = integrate_spectrum(pulse, lambda w: reflection_exact(params, w))
        r0, _, r2 = taylor_coefficients(eit_cooperativity(params), params)
        predicted = r0 + 0.5 * r2 * pulse.variance
        # next-order (quartic) corrections are the only allowed gap
        assert abs(got - predicted) < 5e-3
        assert abs(got - predicted) < 0.2 * abs(0.5 * r2 * pulse.variance)


class TestPulseConstruction:
    def test_duration_sets_width(self):
        pulse = PulseSpectrum.from_duration_ns(300.0)
        assert pulse.width == pytest.approx(1.0 / 0.3, rel=1e-12)
        assert pulse.shape == "gaussian"

    def test_bad_duration(self):
        with pytest.raises(DomainError):
            PulseSpectrum.from_duration_ns(0.0)

    def test_unknown_shape(self):
        with pytest.raises(DomainError):
            PulseSpectrum("triangle", variance=1.0)

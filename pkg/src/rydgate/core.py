"""Physical parameter types, pulse spectra and spectral quadrature.

Unit system: angular frequencies and rates in rad/us, lengths in um, times
in us.  Laboratory inputs quoted as "(2pi) x MHz" are converted once at the
configuration boundary (see :mod:`rydgate.config`); everything below this
module consumes rad/us only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, NumericalFailureError

TWO_PI = 2.0 * math.pi

#: Quadrature accuracy contract: integrals are accepted when the estimated
#: absolute error is below QUAD_ABS_TOL + QUAD_REL_TOL * |result|.
QUAD_REL_TOL = 1e-8
QUAD_ABS_TOL = 1e-12


def mhz_to_rad_per_us(value_2pi_mhz: float) -> float:
    """Convert a rate quoted as (2pi) x MHz into rad/us."""
    return TWO_PI * value_2pi_mhz


@dataclass(frozen=True)
class AtomCavityParams:
    """Cavity, atomic and drive rates shared by all calculations.

    Attributes
    ----------
    kappa : float
        Cavity field decay rate [rad/us].
    gamma_e : float
        Excited-state width [rad/us].
    omega_drive : float
        Classical drive Rabi frequency [rad/us].
    coop_single : float
        Single-atom cooperativity C = |G|^2 / (kappa * gamma_e).
    n_atoms : int
        Total atom number N.
    gamma_r : float
        Rydberg-state width [rad/us].
    delta : float
        One-photon detuning [rad/us].
    delta_two : float
        Two-photon detuning [rad/us].

    The coupling |G|^2 is always recomputed from ``coop_single`` so there is
    a single source of truth for the coupling strength.
    """

    kappa: float
    gamma_e: float
    omega_drive: float
    coop_single: float
    n_atoms: int
    gamma_r: float = 0.0
    delta: float = 0.0
    delta_two: float = 0.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise DomainError(f"kappa must be positive, got {self.kappa}")
        if not self.gamma_e > 0:
            raise DomainError(f"gamma_e must be positive, got {self.gamma_e}")
        if self.gamma_r < 0:
            raise DomainError(f"gamma_r must be >= 0, got {self.gamma_r}")
        if self.coop_single < 0:
            raise DomainError(
                f"coop_single must be >= 0, got {self.coop_single}")
        if self.n_atoms < 1:
            raise DomainError(f"n_atoms must be >= 1, got {self.n_atoms}")

    @property
    def g_squared(self) -> float:
        """|G|^2 = C * kappa * gamma_e [rad^2/us^2]."""
        return self.coop_single * self.kappa * self.gamma_e

    @property
    def half_rabi_sq(self) -> float:
        """|Omega/2|^2 [rad^2/us^2]."""
        return abs(self.omega_drive) ** 2 / 4.0

    @property
    def nc(self) -> float:
        """Collective cooperativity N * C."""
        return self.n_atoms * self.coop_single


@dataclass(frozen=True)
class PerAtomOverrides:
    """Optional per-atom parameter lists; ``None`` means all atoms share the
    ensemble-wide value from :class:`AtomCavityParams`."""

    omega_drive_l: tuple[float, ...] | None = None
    coop_single_l: tuple[float, ...] | None = None
    gamma_e_l: tuple[float, ...] | None = None
    gamma_r_l: tuple[float, ...] | None = None
    delta_l: tuple[float, ...] | None = None
    delta_two_l: tuple[float, ...] | None = None

    def validate(self, n_atoms: int) -> None:
        for name in ("omega_drive_l", "coop_single_l", "gamma_e_l",
                     "gamma_r_l", "delta_l", "delta_two_l"):
            value = getattr(self, name)
            if value is not None and len(value) != n_atoms:
                raise DomainError(
                    f"{name} has {len(value)} entries, expected {n_atoms}")

    def resolve(self, params: AtomCavityParams, n_atoms: int) -> dict[str, np.ndarray]:
        """Expand to per-atom arrays of length ``n_atoms``."""
        self.validate(n_atoms)

        def arr(values, default):
            if values is None:
                return np.full(n_atoms, default, dtype=float)
            return np.asarray(values, dtype=float)

        return {
            "omega_drive": arr(self.omega_drive_l, params.omega_drive),
            "coop_single": arr(self.coop_single_l, params.coop_single),
            "gamma_e": arr(self.gamma_e_l, params.gamma_e),
            "gamma_r": arr(self.gamma_r_l, params.gamma_r),
            "delta": arr(self.delta_l, params.delta),
            "delta_two": arr(self.delta_two_l, params.delta_two),
        }


PULSE_SHAPES = ("gaussian", "lorentzian", "delta")


@dataclass(frozen=True)
class PulseSpectrum:
    """Spectral density model |phi(omega)|^2 of the incoming photon pulse.

    ``variance`` holds the square of the width parameter: the variance
    sigma^2 for a gaussian, the squared half-width gamma^2 for a lorentzian
    (whose literal second moment diverges), and exactly 0 for a delta pulse
    (the narrow-pulse limit).  ``center`` is the carrier offset omega_0 from
    cavity resonance [rad/us].
    """

    shape: str
    variance: float
    center: float = 0.0

    def __post_init__(self):
        if self.shape not in PULSE_SHAPES:
            raise DomainError(
                f"unknown pulse shape {self.shape!r}; expected one of {PULSE_SHAPES}")
        if self.variance < 0:
            raise DomainError(f"variance must be >= 0, got {self.variance}")
        if self.shape == "delta" and self.variance != 0.0:
            raise DomainError("delta pulses have exactly zero variance")
        if self.shape != "delta" and self.variance == 0.0:
            raise DomainError(f"{self.shape} pulse needs a positive variance")

    @classmethod
    def delta(cls, center: float = 0.0) -> "PulseSpectrum":
        return cls(shape="delta", variance=0.0, center=center)

    @classmethod
    def from_duration_ns(cls, duration_ns: float, shape: str = "gaussian",
                         center: float = 0.0) -> "PulseSpectrum":
        """Pulse with spectral width 1/T for duration T, i.e. variance 1/T^2."""
        if duration_ns <= 0:
            raise DomainError(f"pulse duration must be positive, got {duration_ns}")
        delta_omega = 1.0 / (duration_ns * 1e-3)  # rad/us
        return cls(shape=shape, variance=delta_omega ** 2, center=center)

    @property
    def width(self) -> float:
        """Width parameter Delta-omega = sqrt(variance) [rad/us]."""
        return math.sqrt(self.variance)


def spectral_density(pulse: PulseSpectrum, omega: float) -> float:
    """Evaluate |phi(omega)|^2 pointwise.

    Delta pulses cannot be queried pointwise; callers handle them
    analytically via :func:`integrate_spectrum`.
    """
    if pulse.shape == "delta":
        raise DomainError("delta pulse has no pointwise spectral density")
    x = omega - pulse.center
    if pulse.shape == "gaussian":
        v = pulse.variance
        return math.exp(-x * x / (2.0 * v)) / math.sqrt(2.0 * math.pi * v)
    # lorentzian
    gamma = pulse.width
    return gamma / (math.pi * (x * x + gamma * gamma))


def _quad_checked(f: Callable[[float], float], lo: float, hi: float) -> float:
    value, abserr = quad(f, lo, hi, epsabs=QUAD_ABS_TOL, epsrel=1e-10, limit=200)
    if abserr > QUAD_ABS_TOL + QUAD_REL_TOL * abs(value):
        raise NumericalFailureError(
            f"quadrature did not converge: estimated error {abserr:.3e} "
            f"on result {value:.6e}",
            achieved=abserr, required=QUAD_ABS_TOL + QUAD_REL_TOL * abs(value))
    return value


def integrate_spectrum(pulse: PulseSpectrum,
                       f: Callable[[float], complex]) -> complex:
    """Compute the pulse-weighted average integral |phi|^2 f(omega) domega.

    Delta pulses return ``f(center)`` exactly.  Gaussian pulses integrate
    over center +- 8 sigma (missing mass ~1e-15); lorentzian pulses use two
    semi-infinite panels split at the center.  Non-convergent quadrature
    raises :class:`NumericalFailureError` with the achieved error.
    """
    if pulse.shape == "delta":
        return complex(f(pulse.center))

    def re(w):
        return (complex(f(w)) * spectral_density(pulse, w)).real

    def im(w):
        return (complex(f(w)) * spectral_density(pulse, w)).imag

    if pulse.shape == "gaussian":
        lo = pulse.center - 8.0 * pulse.width
        hi = pulse.center + 8.0 * pulse.width
        return complex(_quad_checked(re, lo, hi), _quad_checked(im, lo, hi))

    # lorentzian: heavy tails, integrate both half lines
    c = pulse.center
    real = _quad_checked(re, -np.inf, c) + _quad_checked(re, c, np.inf)
    imag = _quad_checked(im, -np.inf, c) + _quad_checked(im, c, np.inf)
    return complex(real, imag)


def gaussian_moment(variance: float, order: int) -> float:
    """Central moments of a unit-mass gaussian: 0 for odd order,
    (order-1)!! * variance^(order/2) for even order."""
    if order % 2 == 1:
        return 0.0
    k = order // 2
    double_fact = 1.0
    for j in range(1, order, 2):
        double_fact *= j
    return double_fact * variance ** k

"""Photonic controlled-phase gates through Rydberg blockade in an optical
cavity: reflection spectra, blockaded cooperativities, gate fidelities and
quantum-repeater secret-key rates."""

__version__ = "0.1.0"

from .blockade import (CooperativitySet, EnsembleModel, blockade_radius,
                       continuum_cooperativity, discrete_cooperativity,
                       inhomogeneous_cooperativity, interaction_zeta,
                       monte_carlo_cooperativity)
from .config import RunConfig, load_config, load_positions
from .core import (AtomCavityParams, PerAtomOverrides, PulseSpectrum,
                   integrate_spectrum, mhz_to_rad_per_us, spectral_density)
from .errors import (ConfigError, DomainError, NumericalFailureError,
                     RydgateError, SingularInputError,
                     UndefinedConditionalError)
from .gatefid import (FidelityReport, delta_r_terms, fcj_dual_conditional,
                      fcj_single_rail_exact, fcj_single_rail_leading,
                      fidelity_report_exact, fidelity_report_leading,
                      fswap_bandwidth_term, fswap_exact, fswap_leading)
from .repeater import (RateResult, RepeaterConfig, double_excitation_error,
                       h2, mean_link_time, secret_key_rate,
                       swap_fidelity_propagation, swap_success_probability)
from .scatter import (ReflectionSpectrum, blocked_shell_model,
                      eit_cooperativity, make_reflection_spectrum,
                      reflection_exact, reflection_from_cooperativity,
                      taylor_coefficients)

__all__ = [
    "AtomCavityParams", "PerAtomOverrides", "PulseSpectrum",
    "CooperativitySet", "EnsembleModel", "ReflectionSpectrum",
    "FidelityReport", "RepeaterConfig", "RateResult", "RunConfig",
    "RydgateError", "ConfigError", "DomainError", "SingularInputError",
    "NumericalFailureError", "UndefinedConditionalError",
    "mhz_to_rad_per_us", "spectral_density", "integrate_spectrum",
    "load_config", "load_positions",
    "continuum_cooperativity", "discrete_cooperativity",
    "inhomogeneous_cooperativity", "monte_carlo_cooperativity",
    "blockade_radius", "interaction_zeta",
    "reflection_exact", "reflection_from_cooperativity",
    "taylor_coefficients", "eit_cooperativity", "make_reflection_spectrum",
    "blocked_shell_model",
    "fcj_single_rail_exact", "fcj_single_rail_leading", "fswap_exact",
    "fswap_leading", "fcj_dual_conditional", "delta_r_terms",
    "fswap_bandwidth_term", "fidelity_report_exact",
    "fidelity_report_leading",
    "h2", "swap_success_probability", "swap_fidelity_propagation",
    "mean_link_time", "secret_key_rate", "double_excitation_error",
]

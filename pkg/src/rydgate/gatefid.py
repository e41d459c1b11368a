"""Gate-quality figures of the controlled-phase gate.

Four figures of merit, each computed two ways:

* exact frequency integration of the reflection spectra against the pulse
  spectral density, and
* the leading-order closed forms in the blockaded cooperativity, with the
  fuller intermediate truncations exposed for testing.

Single rail (vacuum/photon encoding): the process fidelity
F_CJ = |2 + <R_g> - <R_k>|^2 / 16 with <.> the pulse average.  Dual rail:
conditioning on two detected photons gives the swap fidelity
F_swap = <|2 + R_g - R_k|^2> / (16 P_suc) with success probability
P_suc = <2 + |R_g|^2 + |R_k|^2> / 4, plus the conditional process fidelity
F'_CJ = F_CJ(unconditional) / P_suc <= F_swap, with equality for narrow
pulses.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .blockade import CooperativitySet
from .core import AtomCavityParams, PulseSpectrum, integrate_spectrum
from .errors import DomainError, NumericalFailureError, UndefinedConditionalError
from .scatter import ReflectionSpectrum

_LOW_COOP_WARNING = ("leading-order formulas assume C_b >> 1; "
                     "C_b = {:.3g} is below 3")

EXACT_INTEGRATION = "exact_integration"
LEADING_ORDER = "leading_order"


@dataclass(frozen=True)
class FidelityReport:
    """Gate figures with the difference terms that drive the expansions."""

    f_cj: float
    f_swap: float
    f_cj_dual: float
    p_suc: float
    method: str
    delta_r: complex | None = None
    delta_r1: complex | None = None
    delta_r2: complex | None = None


def _warn_low_coop(coop: CooperativitySet) -> None:
    if coop.c_b < 3.0:
        warnings.warn(_LOW_COOP_WARNING.format(coop.c_b), stacklevel=3)


def _bandwidth_slope(params: AtomCavityParams) -> float:
    """1/kappa + NC Gamma_e/|Omega/2|^2, the EIT dispersion scale [us]."""
    return 1.0 / params.kappa + params.nc * params.gamma_e / params.half_rabi_sq


def eit_width(params: AtomCavityParams) -> float:
    """Inverse dispersion scale of the unblocked response [rad/us]; the
    narrowest spectral feature, which limits the usable pulse bandwidth."""
    return 1.0 / _bandwidth_slope(params)


# ---------------------------------------------------------------------------
# exact integration


def fcj_single_rail_exact(spectrum: ReflectionSpectrum,
                          pulse: PulseSpectrum) -> float:
    """Single-rail process fidelity by pulse-averaging both responses."""
    mean_g = integrate_spectrum(pulse, spectrum.r_eit)
    mean_k = integrate_spectrum(pulse, spectrum.r_blocked)
    return abs(2.0 + mean_g - mean_k) ** 2 / 16.0


def success_probability_exact(spectrum: ReflectionSpectrum,
                              pulse: PulseSpectrum) -> float:
    def integrand(w):
        return (2.0 + abs(complex(spectrum.r_eit(w))) ** 2
                + abs(complex(spectrum.r_blocked(w))) ** 2)

    return integrate_spectrum(pulse, integrand).real / 4.0


def fswap_exact(spectrum: ReflectionSpectrum,
                pulse: PulseSpectrum) -> tuple[float, float]:
    """Post-selected swap fidelity and success probability."""
    p_suc = success_probability_exact(spectrum, pulse)
    if p_suc == 0.0:
        raise UndefinedConditionalError(
            "conditional fidelity undefined at zero success probability")

    def integrand(w):
        return abs(2.0 + complex(spectrum.r_eit(w))
                   - complex(spectrum.r_blocked(w))) ** 2

    numerator = integrate_spectrum(pulse, integrand).real / 16.0
    return numerator / p_suc, p_suc


def fcj_dual_conditional(spectrum: ReflectionSpectrum,
                         pulse: PulseSpectrum) -> float:
    """Conditional process fidelity; never exceeds the swap fidelity."""
    f_swap, p_suc = fswap_exact(spectrum, pulse)
    f_dual = fcj_single_rail_exact(spectrum, pulse) / p_suc
    if f_dual > f_swap + 1e-9:
        raise NumericalFailureError(
            f"conditional CJ fidelity {f_dual} exceeds swap fidelity {f_swap}; "
            "quadrature inconsistency")
    return min(f_dual, f_swap)


def fidelity_report_exact(spectrum: ReflectionSpectrum,
                          pulse: PulseSpectrum) -> FidelityReport:
    f_swap, p_suc = fswap_exact(spectrum, pulse)
    f_cj = fcj_single_rail_exact(spectrum, pulse)
    f_dual = min(f_cj / p_suc, f_swap)
    dr = dr1 = dr2 = None
    if spectrum.taylor_eit is not None and spectrum.taylor_blocked is not None:
        dr, dr1, dr2 = (g - k for g, k in zip(spectrum.taylor_eit,
                                              spectrum.taylor_blocked))
    return FidelityReport(f_cj=f_cj, f_swap=f_swap, f_cj_dual=f_dual,
                          p_suc=p_suc, method=EXACT_INTEGRATION,
                          delta_r=dr, delta_r1=dr1, delta_r2=dr2)


# ---------------------------------------------------------------------------
# leading-order closed forms


def delta_r_terms(coop: CooperativitySet, params: AtomCavityParams
                  ) -> tuple[complex, complex, complex]:
    """Difference terms Delta-R, Delta-R', Delta-R'' between the unblocked
    and blocked responses, in the homogeneous-ensemble truncation used by
    the leading-order fidelities.

    Delta-R = 2 C*_v / (1 + C*_v) is kept complex; the derivative terms use
    the real (1 + C_b) powers of the printed expansion and the blocked
    moment sums M2, M3 with the effective unblocked counts.
    """
    if not coop.has_families:
        raise DomainError("difference terms need the expansion families")
    dr = 2.0 * coop.c_star_v / (1.0 + coop.c_star_v)

    kappa, ge = params.kappa, params.gamma_e
    o2 = params.half_rabi_sq
    c = params.coop_single
    n = params.n_atoms
    cb = coop.c_b
    opc2 = (1.0 + cb) ** 2
    opc3 = (1.0 + cb) ** 3
    slope_full = 1.0 / kappa + n * c * ge / o2
    slope_eit = 1.0 / kappa + coop.n_eit_alpha * c * ge / o2
    m2 = coop.c_alpha_blocked
    m3 = coop.c_beta_blocked

    dr1 = (2j * slope_full
           - 2j * slope_eit / opc2
           + 2j * (m2 / ge) / opc2)

    beta_term = 0.0 if m3 == 0.0 else 4.0 * (m3 / ge ** 2) / cb ** 3
    dr2 = (-4.0 * slope_full ** 2
           + 4.0 * slope_eit ** 2 / opc3
           + 4.0 * (m2 / ge) ** 2 / opc3
           - 4.0 * n * c * ge ** 2 / o2 ** 2
           + 4.0 * coop.n_eit_eta * c * ge ** 2 / o2 ** 2 / opc3
           - beta_term
           + 4j * m3 / (ge ** 2 * opc3))
    return dr, dr1, dr2


def fcj_single_rail_leading(coop: CooperativitySet,
                            params: AtomCavityParams,
                            pulse: PulseSpectrum,
                            variant: str = "leading") -> float:
    """Closed-form single-rail fidelity.

    ``variant="leading"`` keeps only the dominant orders:

        1 - (1+C_b)/[(1+C_b)^2 + C_b'^2]
          - NC Gamma_e^2/|Omega/2|^4 (dw)^2
          - (1/kappa + NC Gamma_e/|Omega/2|^2)^2 (dw)^2.

    ``variant="next_order"`` keeps the next truncation, whose dispersion-
    free part is exact for narrow pulses.
    """
    _warn_low_coop(coop)
    var = pulse.variance
    d = coop.denominator
    cb, cbp2 = coop.c_b, coop.c_b_prime_abs ** 2
    slope = _bandwidth_slope(params)
    dispersive = params.nc * params.gamma_e ** 2 / params.half_rabi_sq ** 2
    if variant == "leading":
        return 1.0 - (1.0 + cb) / d - dispersive * var - slope ** 2 * var
    if variant == "next_order":
        x = (cb * (1.0 + cb) + cbp2) / d
        return ((1.0 - (1.0 + cb) / d) + 1.0 / (4.0 * d)
                - 0.5 * dispersive * (1.0 + x) * var
                - 0.5 * slope ** 2 * (1.0 + x) * var)
    raise DomainError(f"unknown variant {variant!r}")


def psuc_leading(coop: CooperativitySet, params: AtomCavityParams,
                 pulse: PulseSpectrum) -> float:
    """Success probability 1 - C_b/[(1+C_b)^2 + C_b'^2] - dispersion term."""
    dispersive = params.nc * params.gamma_e ** 2 / params.half_rabi_sq ** 2
    return 1.0 - coop.c_b / coop.denominator - dispersive * pulse.variance


def fswap_leading(coop: CooperativitySet,
                  params: AtomCavityParams,
                  pulse: PulseSpectrum,
                  variant: str = "leading") -> tuple[float, float]:
    """Closed-form swap fidelity and success probability.

    ``variant="leading"`` is the dominant-order result

        1 - 1/(C_b^2 + C_b'^2) - (3 C_b^2 - C_b'^2)/(4 (C_b^2 + C_b'^2)^2)
          - (3/4)(1/kappa + NC Gamma_e/|Omega/2|^2)^2 (dw)^2;

    ``variant="next_order"`` keeps the intermediate truncation in
    C_b^2 + C_b'^2 + 2 C_b.
    """
    _warn_low_coop(coop)
    var = pulse.variance
    cb = coop.c_b
    cbp2 = coop.c_b_prime_abs ** 2
    slope2 = _bandwidth_slope(params) ** 2
    p = psuc_leading(coop, params, pulse)
    if variant == "leading":
        s = cb * cb + cbp2
        f = (1.0 - 1.0 / s - (3.0 * cb * cb - cbp2) / (4.0 * s * s)
             - 0.75 * slope2 * var)
        return f, p
    if variant == "next_order":
        e = cb * cb + cbp2 + 2.0 * cb
        f = (1.0 - 3.0 / (4.0 * e) - cb * cb / (e * e)
             - 0.75 * slope2 * (1.0 + cb / e) * var)
        return f, p
    raise DomainError(f"unknown variant {variant!r}")


def fswap_bandwidth_term(params: AtomCavityParams,
                         pulse: PulseSpectrum) -> float:
    """The finite-bandwidth error term of the leading-order swap fidelity:
    (3/4)(1/kappa + NC Gamma_e/|Omega/2|^2)^2 (dw)^2."""
    return 0.75 * _bandwidth_slope(params) ** 2 * pulse.variance


def fidelity_report_leading(coop: CooperativitySet,
                            params: AtomCavityParams,
                            pulse: PulseSpectrum) -> FidelityReport:
    f_cj = fcj_single_rail_leading(coop, params, pulse)
    f_swap, p_suc = fswap_leading(coop, params, pulse)
    dr = dr1 = dr2 = None
    f_dual = f_swap  # equal for narrow pulses
    if coop.has_families:
        dr, dr1, dr2 = delta_r_terms(coop, params)
        if pulse.variance > 0.0:
            from .scatter import eit_cooperativity, taylor_coefficients
            t_eit = taylor_coefficients(
                eit_cooperativity(params, coop.omega0), params)
            t_blk = taylor_coefficients(coop, params)
            f_uncond = fcj_taylor(t_eit, t_blk, pulse.variance)
            f_dual = min(f_uncond / max(p_suc, 1e-15), f_swap)
    return FidelityReport(f_cj=f_cj, f_swap=f_swap, f_cj_dual=f_dual,
                          p_suc=p_suc, method=LEADING_ORDER,
                          delta_r=dr, delta_r1=dr1, delta_r2=dr2)


# ---------------------------------------------------------------------------
# assembled quadratic-in-bandwidth forms built from Taylor triples


def fcj_taylor(taylor_eit, taylor_blocked, variance: float) -> float:
    """Single-rail fidelity assembled from the Taylor triples:

        (4 + |dR|^2 + 4 Re dR + 2 Re dR'' v + Re[dR conj(dR'')] v) / 16.

    Exact at zero bandwidth, where it reduces to the full modulus-square.
    """
    dr = taylor_eit[0] - taylor_blocked[0]
    dr2 = taylor_eit[2] - taylor_blocked[2]
    v = variance
    return (4.0 + abs(dr) ** 2 + 4.0 * dr.real
            + 2.0 * dr2.real * v + (dr * np.conj(dr2)).real * v) / 16.0


def fswap_taylor(taylor_eit, taylor_blocked, variance: float
                 ) -> tuple[float, float]:
    """Swap fidelity and success probability assembled from Taylor triples,
    keeping the |dR'|^2 bandwidth term of the dual-rail expansion."""
    rg, rg1, rg2 = taylor_eit
    rk, rk1, rk2 = taylor_blocked
    v = variance
    dr = rg - rk
    dr1 = rg1 - rk1
    dr2 = rg2 - rk2
    p = (2.0
         + abs(rg) ** 2 + abs(rg1) ** 2 * v + (rg * np.conj(rg2)).real * v
         + abs(rk) ** 2 + abs(rk1) ** 2 * v + (rk * np.conj(rk2)).real * v
         ) / 4.0
    num = (4.0 + abs(dr) ** 2 + 4.0 * dr.real + abs(dr1) ** 2 * v
           + 2.0 * dr2.real * v + (dr * np.conj(dr2)).real * v) / 16.0
    if p == 0.0:
        raise UndefinedConditionalError("zero success probability")
    return num / p, p


# ---------------------------------------------------------------------------
# parameter sweeps


def fidelity_curve_rows(cb_grid: np.ndarray,
                        cb_prime_ratio: float,
                        params: AtomCavityParams,
                        pulse: PulseSpectrum,
                        include_exact: bool = False) -> list[dict]:
    """Leading-order fidelity figures along C_b' = ratio * C_b, optionally
    with exact-integration columns from the shell-blockade realization."""
    from .scatter import blocked_shell_model, make_reflection_spectrum

    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for cb in cb_grid:
            cstar = complex(cb, -cb_prime_ratio * cb)
            coop = _synthetic_coop(cstar, params)
            f_cj = fcj_single_rail_leading(coop, params, pulse)
            f_swap, p_suc = fswap_leading(coop, params, pulse)
            f_dual = f_swap if pulse.variance == 0.0 else None
            row = {
                "c_b": float(cb),
                "f_cj": f_cj,
                "f_swap": f_swap,
                "f_cj_dual": f_dual if f_dual is not None else f_swap,
                "p_suc": p_suc,
                "method": LEADING_ORDER,
            }
            if include_exact:
                if abs(cb_prime_ratio - 1.0) > 1e-12:
                    raise DomainError(
                        "exact columns use the shell realization, which "
                        "fixes |C_b'| = C_b")
                params_tot, v, mult, coop_real = blocked_shell_model(params, cb)
                spectrum = make_reflection_spectrum(params_tot, v=v,
                                                    weights=mult)
                report = fidelity_report_exact(spectrum, pulse)
                row.update({
                    "f_cj_exact": report.f_cj,
                    "f_swap_exact": report.f_swap,
                    "f_cj_dual_exact": report.f_cj_dual,
                    "p_suc_exact": report.p_suc,
                    "c_b_exact": coop_real.c_b,
                })
            rows.append(row)
    return rows


def _synthetic_coop(c_star_v: complex, params: AtomCavityParams
                    ) -> CooperativitySet:
    """Cooperativity set for an abstract C*_v (families left unset)."""
    mu = params.gamma_e ** 2 / params.half_rabi_sq
    im = c_star_v.imag
    return CooperativitySet(
        omega0=0.0, c_star_v=c_star_v, c_b=c_star_v.real,
        c_b_prime_abs=abs(im),
        branch_sign=(0 if im == 0 else (1 if im > 0 else -1)),
        c_alpha=None, c_beta=None, c_eta=None, c_chi=None,
        c_alpha_blocked=None, c_beta_blocked=None,
        c_alpha_eit=-params.nc * mu, c_eta_eit=-1j * params.nc * mu ** 2,
        n_eit_alpha=float(params.n_atoms), n_eit_eta=float(params.n_atoms),
        n_atoms=params.n_atoms)

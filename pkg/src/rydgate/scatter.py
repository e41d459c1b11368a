"""Cavity reflection coefficient with and without a stored Rydberg
excitation, and its validated Taylor expansion.

The outgoing amplitude for a one-sided cavity is R(omega) =
2 kappa S(omega) - 1 with

    S(omega) = 1 / (kappa - i omega + sum_l f_l(omega)),
    f_l = |G_l|^2 / [(Gamma_el - i Delta_l - i omega)
                     + |Omega_l/2|^2 / (Gamma_rl + i(delta_l + V_kl - omega))].

Each susceptibility is evaluated in a pole-free rational form, so perfect
EIT partners (V = omega) contribute their finite limit and true poles can
only arise with all widths zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .blockade import (CooperativitySet, EnsembleModel,
                       cooperativity_from_interactions, interaction_shifts)
from .core import AtomCavityParams, PerAtomOverrides
from .errors import DomainError, SingularInputError

_CHUNK = 4_000_000  # cap atoms x frequencies per broadcast block


def _per_atom(params: AtomCavityParams, overrides: PerAtomOverrides | None,
              n: int) -> dict[str, np.ndarray]:
    return (overrides or PerAtomOverrides()).resolve(params, n)


def _compile_response(params: AtomCavityParams, vv: np.ndarray,
                      mult: np.ndarray, per: dict[str, np.ndarray]):
    """Build a reusable R(omega) closure from resolved per-atom arrays.

    Small systems (quadrature hot path) run a plain complex loop per node;
    larger ones broadcast atoms x frequencies in chunks.
    """
    g2 = per["coop_single"] * params.kappa * per["gamma_e"]
    o2 = np.abs(per["omega_drive"]) ** 2 / 4.0
    ge = per["gamma_e"]
    gr = per["gamma_r"]
    de = per["delta"]
    d2 = per["delta_two"]
    kappa = params.kappa
    finite = np.isfinite(vv)

    rows = None
    if vv.size <= 64:
        rows = [(float(g2[i]), float(o2[i]), float(ge[i]), float(gr[i]),
                 float(de[i]), float(d2[i]), float(vv[i]), float(mult[i]),
                 bool(finite[i])) for i in range(vv.size)]

    def scalar_response(wv: float) -> complex:
        total = 0.0 + 0.0j
        for g2i, o2i, gei, gri, dei, d2i, vi, mi, fin in rows:
            base = gei - 1j * dei - 1j * wv
            if fin:
                num = gri + 1j * (d2i + vi - wv)
                den = base * num + o2i
                if den == 0.0:
                    raise SingularInputError(
                        "atomic susceptibility hits an exact pole "
                        "(zero widths with fine-tuned frequency)")
                total += mi * g2i * num / den
            else:
                if base == 0.0:
                    raise SingularInputError(
                        "blocked susceptibility hits an exact pole")
                total += mi * g2i / base
        cav = kappa - 1j * wv + total
        if cav == 0.0:
            raise SingularInputError("cavity response hits an exact pole")
        return 2.0 * kappa / cav - 1.0

    def array_response(w: np.ndarray) -> np.ndarray:
        out = np.empty(w.shape, dtype=complex)
        step = max(1, _CHUNK // max(1, vv.size))
        for start in range(0, w.size, step):
            wk = w[start:start + step][None, :]
            total = np.zeros(wk.shape[1], dtype=complex)
            if np.any(finite):
                num = (gr[finite, None]
                       + 1j * (d2[finite, None] + vv[finite, None] - wk))
                den = ((ge[finite, None] - 1j * de[finite, None] - 1j * wk)
                       * num + o2[finite, None])
                if np.any(den == 0.0):
                    raise SingularInputError(
                        "atomic susceptibility hits an exact pole "
                        "(zero widths with fine-tuned frequency)")
                total += np.sum(mult[finite, None] * g2[finite, None]
                                * num / den, axis=0)
            if np.any(~finite):
                den = ge[~finite, None] - 1j * de[~finite, None] - 1j * wk
                if np.any(den == 0.0):
                    raise SingularInputError(
                        "blocked susceptibility hits an exact pole")
                total += np.sum(mult[~finite, None] * g2[~finite, None] / den,
                                axis=0)
            cav = kappa - 1j * wk[0] + total
            if np.any(cav == 0.0):
                raise SingularInputError("cavity response hits an exact pole")
            out[start:start + step] = 2.0 * kappa / cav - 1.0
        return out

    def response(omega):
        if np.isscalar(omega) and rows is not None:
            return scalar_response(float(omega))
        if np.isscalar(omega):
            return complex(array_response(np.array([float(omega)]))[0])
        return array_response(np.asarray(omega, dtype=float))

    return response


def _resolve_system(params: AtomCavityParams,
                    ens: EnsembleModel | None,
                    stored_at: int | None,
                    overrides: PerAtomOverrides | None,
                    v, weights) -> tuple[np.ndarray, np.ndarray, dict]:
    if v is not None:
        vv = np.atleast_1d(np.asarray(v, dtype=float))
        mult = (np.ones_like(vv) if weights is None
                else np.asarray(weights, dtype=float))
        if mult.shape != vv.shape:
            raise DomainError("weights must match the interaction array")
        per = _per_atom(params, overrides, vv.size)
    elif stored_at is not None:
        if ens is None:
            raise DomainError("stored_at needs an ensemble with positions")
        vv = interaction_shifts(ens, stored_at)
        mult = np.ones_like(vv)
        per_full = _per_atom(params, overrides, ens.positions.shape[0])
        keep = np.arange(ens.positions.shape[0]) != stored_at
        per = {k: a[keep] for k, a in per_full.items()}
    else:
        # unblocked: identical atoms collapse into one weighted group
        if overrides is None:
            vv = np.zeros(1)
            mult = np.array([float(params.n_atoms)])
            per = _per_atom(params, None, 1)
        else:
            vv = np.zeros(params.n_atoms)
            mult = np.ones_like(vv)
            per = _per_atom(params, overrides, params.n_atoms)
    return vv, mult, per


def reflection_exact(params: AtomCavityParams,
                     omega,
                     *,
                     ens: EnsembleModel | None = None,
                     stored_at: int | None = None,
                     overrides: PerAtomOverrides | None = None,
                     v=None,
                     weights=None):
    """Exact reflection coefficient R(omega).

    With ``stored_at`` (and ``ens`` positions) the stored atom is removed
    from the sum and every partner carries its interaction shift; with
    neither ``stored_at`` nor ``v`` all atoms are unshifted (the EIT case).
    ``v`` supplies interaction shifts directly [rad/us], optionally with
    multiplicity ``weights``; +-inf entries mean fully blocked atoms.

    Accepts scalar or array ``omega`` [rad/us]; returns matching shape.
    """
    vv, mult, per = _resolve_system(params, ens, stored_at, overrides,
                                    v, weights)
    return _compile_response(params, vv, mult, per)(omega)


def reflection_from_cooperativity(coop: CooperativitySet,
                                  params: AtomCavityParams | None = None,
                                  omega_zero_limit: bool = True) -> complex:
    """R = 2/(1 + C*_v) - 1 in the narrow-pulse limit.

    With ``omega_zero_limit=False`` the cavity's own dispersion at the
    carrier is kept: R = 2/(1 + C*_v - i omega0/kappa) - 1, which needs
    ``params`` for kappa.
    """
    denom = 1.0 + coop.c_star_v
    if not omega_zero_limit:
        if params is None:
            raise DomainError("carrier-offset evaluation needs params")
        denom = denom - 1j * coop.omega0 / params.kappa
    if denom == 0.0:
        raise SingularInputError("C*_v = -1 puts the reflection on a pole")
    return 2.0 / denom - 1.0


def taylor_coefficients(coop: CooperativitySet,
                        params: AtomCavityParams,
                        omega0: float | None = None
                        ) -> tuple[complex, complex, complex]:
    """Reflection value and first two frequency derivatives at the carrier.

    With W = 1 + C*_v - i omega0/kappa, A = 1/kappa - C*_alpha/Gamma_e and
    B = (i C*_eta + C*_chi + M3 - 2 C*_beta)/Gamma_e^2 (M3 the bare third
    moment, the blocked part of the beta/eta families),

        R   = 2/W - 1,
        R'  = 2i A / W^2,
        R'' = -4 A^2 / W^3 - 4 B / W^2.

    These are exact for resonant ensembles with gamma_r = 0 and validate
    against finite differences of the exact reflection to machine accuracy.
    """
    if not coop.has_families:
        raise DomainError(
            "this cooperativity set carries no expansion families")
    if omega0 is not None and omega0 != coop.omega0:
        raise DomainError(
            f"families were evaluated at omega0={coop.omega0}, not {omega0}")
    ge = params.gamma_e
    w_denom = 1.0 + coop.c_star_v - 1j * coop.omega0 / params.kappa
    if w_denom == 0.0:
        raise SingularInputError("reflection pole at the carrier")
    a = 1.0 / params.kappa - coop.c_alpha / ge
    b = (1j * coop.c_eta + coop.c_chi
         + coop.c_beta_blocked - 2.0 * coop.c_beta) / ge ** 2
    r0 = 2.0 / w_denom - 1.0
    r1 = 2j * a / w_denom ** 2
    r2 = -4.0 * a ** 2 / w_denom ** 3 - 4.0 * b / w_denom ** 2
    return r0, r1, r2


def eit_cooperativity(params: AtomCavityParams,
                      omega0: float = 0.0) -> CooperativitySet:
    """Family set of the unblocked ensemble: N atoms with V = 0.

    At omega0 = 0 this reduces to (C*, C*_alpha, C*_beta, C*_eta, C*_chi) =
    (0, -NC Gamma_e^2/|Omega/2|^2, 0, -i NC Gamma_e^4/|Omega/2|^4, 0).
    """
    return cooperativity_from_interactions(
        params, np.array([0.0]), weights=np.array([float(params.n_atoms)]),
        omega0=omega0)


def blocked_shell_model(params: AtomCavityParams, c_b_target: float
                        ) -> tuple[AtomCavityParams, np.ndarray, np.ndarray,
                                   CooperativitySet]:
    """Physical realization of C_b = |C_b'|: a shell of atoms at the
    blockade radius.

    Atoms at exactly V = -|Omega/2|^2/Gamma_e each contribute C (1 - i)/2
    to C*_v, so n_b = round(2 c_b / C) shell atoms give C_b = |C_b'| =
    n_b C / 2 on top of the unshifted background.  Returns the enlarged
    parameter set (n_atoms grows by n_b), the interaction shifts and
    multiplicities of the blocked configuration, and the realized
    cooperativity set.
    """
    if c_b_target <= 0:
        raise DomainError("target blockaded cooperativity must be positive")
    n_b = max(1, round(2.0 * c_b_target / params.coop_single))
    n_total = params.n_atoms + n_b
    params_total = replace(params, n_atoms=n_total)
    v_shell = -params.half_rabi_sq / params.gamma_e
    v = np.array([v_shell, 0.0])
    mult = np.array([float(n_b), float(n_total - 1 - n_b)])
    coop = cooperativity_from_interactions(params_total, v, weights=mult)
    return params_total, v, mult, coop


@dataclass(frozen=True)
class ReflectionSpectrum:
    """Reflection responses with (``r_blocked``) and without (``r_eit``) a
    stored excitation, plus their Taylor triples at the carrier.

    ``r_blocked`` is the spin-wave average sum_k |alpha_k|^2 R_k when the
    underlying construction carries storage weights.  Taylor triples are
    ``None`` off resonance or with Rydberg decoherence, where the expansion
    families are not defined.
    """

    r_eit: Callable[[np.ndarray], np.ndarray]
    r_blocked: Callable[[np.ndarray], np.ndarray]
    taylor_eit: tuple[complex, complex, complex] | None
    taylor_blocked: tuple[complex, complex, complex] | None
    omega0: float = 0.0


def _resonant(params: AtomCavityParams,
              overrides: PerAtomOverrides | None) -> bool:
    if params.delta != 0.0 or params.delta_two != 0.0 or params.gamma_r != 0.0:
        return False
    if overrides is None:
        return True
    if overrides.delta_l and any(x != 0.0 for x in overrides.delta_l):
        return False
    if overrides.delta_two_l and any(x != 0.0 for x in overrides.delta_two_l):
        return False
    if overrides.gamma_r_l and any(x != 0.0 for x in overrides.gamma_r_l):
        return False
    if overrides.gamma_e_l and len(set(overrides.gamma_e_l)) > 1:
        return False
    return True


def make_reflection_spectrum(params: AtomCavityParams,
                             *,
                             ens: EnsembleModel | None = None,
                             stored_at: int | None = None,
                             overrides: PerAtomOverrides | None = None,
                             v=None,
                             weights=None,
                             omega0: float = 0.0) -> ReflectionSpectrum:
    """Build the paired EIT/blocked spectra for one of three constructions:
    explicit shifts ``v`` (+ ``weights``), a single stored atom index, or an
    ensemble with spin-wave weights (averaged over storage sites)."""
    r_eit = _compile_response(
        params, *_resolve_system(params, None, None, overrides, None, None))

    averaged = (v is None and stored_at is None)
    if averaged:
        if ens is None or ens.spin_wave is None:
            raise DomainError(
                "need v, stored_at, or an ensemble with spin_wave weights")
        if overrides is not None:
            raise DomainError(
                "per-atom overrides are not supported for the spin-wave "
                "averaged construction")
        sites = [k for k in range(ens.positions.shape[0])
                 if ens.spin_wave[k] > 0.0]
        shift_sets = [interaction_shifts(ens, k) for k in sites]
        site_w = [ens.spin_wave[k] for k in sites]
        responses = [
            _compile_response(params, *_resolve_system(params, None, None,
                                                       None, vk, None))
            for vk in shift_sets]

        def r_blocked(w):
            acc = None
            for resp, ak in zip(responses, site_w):
                rk = resp(w)
                acc = ak * rk if acc is None else acc + ak * rk
            return acc
    elif v is not None:
        r_blocked = _compile_response(
            params, *_resolve_system(params, None, None, overrides, v,
                                     weights))
    else:
        r_blocked = _compile_response(
            params, *_resolve_system(params, ens, stored_at, overrides,
                                     None, None))

    taylor_eit = taylor_blocked = None
    if _resonant(params, overrides):
        taylor_eit = taylor_coefficients(eit_cooperativity(params, omega0),
                                         params)
        if averaged:
            triples = []
            for vk, ak in zip(shift_sets, site_w):
                coop_k = cooperativity_from_interactions(params, vk,
                                                         omega0=omega0)
                triples.append((ak, taylor_coefficients(coop_k, params)))
            taylor_blocked = tuple(
                sum(ak * t[i] for ak, t in triples) for i in range(3))
        elif v is not None:
            coop = cooperativity_from_interactions(params, v, weights=weights,
                                                   omega0=omega0)
            taylor_blocked = taylor_coefficients(coop, params)
        else:
            from .blockade import discrete_cooperativity
            coop = discrete_cooperativity(params, ens, stored_at,
                                          overrides=overrides, omega0=omega0)
            taylor_blocked = taylor_coefficients(coop, params)

    return ReflectionSpectrum(r_eit=r_eit, r_blocked=r_blocked,
                              taylor_eit=taylor_eit,
                              taylor_blocked=taylor_blocked,
                              omega0=omega0)


def finite_difference_taylor(f: Callable[[float], complex],
                             omega0: float,
                             kappa: float,
                             steps: Sequence[float] = (1e-2, 1e-3, 1e-4)
                             ) -> tuple[complex, complex, complex]:
    """Five-point centered estimates of (f, f', f'') at ``omega0``.

    The step is scanned over ``steps`` (in units of kappa) and, per
    derivative, the pair of steps agreeing best is averaged; this guards
    against both truncation and roundoff.
    """
    d1s, d2s = [], []
    for s in steps:
        h = s * kappa
        fm2, fm1, f0, fp1, fp2 = (complex(f(omega0 + k * h))
                                  for k in (-2, -1, 0, 1, 2))
        d1s.append((-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * h))
        d2s.append((-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h * h))

    def plateau(values):
        best = None
        for i in range(len(values)):
            for j in range(i + 1, len(values)):
                gap = abs(values[i] - values[j])
                if best is None or gap < best[0]:
                    best = (gap, 0.5 * (values[i] + values[j]))
        return best[1]

    return complex(f(omega0)), plateau(d1s), plateau(d2s)


def spectrum_rows(params: AtomCavityParams,
                  omega_grid: np.ndarray,
                  spectrum: ReflectionSpectrum) -> list[dict]:
    """CSV rows for a frequency sweep of both responses."""
    r_eit = spectrum.r_eit(omega_grid)
    r_blk = spectrum.r_blocked(omega_grid)
    return [
        {
            "omega_rad_per_us": float(w),
            "re_R_eit": float(re.real),
            "im_R_eit": float(re.imag),
            "re_R_blocked": float(rb.real),
            "im_R_blocked": float(rb.imag),
        }
        for w, re, rb in zip(omega_grid, r_eit, r_blk)
    ]

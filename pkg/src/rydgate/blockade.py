"""Blockaded cooperativity of a Rydberg ensemble in a cavity.

A stored Rydberg excitation at atom k shifts the Rydberg level of every
other atom l by the van der Waals interaction V_kl = -C6/r^6, spoiling its
EIT condition.  The resulting complex effective cooperativity

    C*_v = C sum_l 1 / (1 - i |Omega/2|^2 / (V_kl Gamma_e))

is written C_b + i C_b'; the blocked reflection coefficient at resonance is
2/(1 + C*_v) - 1.  This module computes C*_v and the higher expansion
families C*_alpha, C*_beta, C*_eta, C*_chi (which control the frequency
dependence of the reflection) in continuum closed form, by direct summation
over explicit atom positions, by seeded Monte Carlo over a uniform cloud,
and in the inhomogeneous spin-wave-weighted generalization that also folds
in Rydberg decoherence.

Sign convention: the attractive branch V = -C6/r^6 makes Im(C*_v) negative
for a uniform cloud at resonance; all fidelity formulas downstream consume
only C_b and C_b'^2, so the stored quantities are the branch sign, C_b, and
|C_b'|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .core import AtomCavityParams, PerAtomOverrides
from .errors import DomainError

_SPIN_WAVE_NORM_TOL = 1e-9


@dataclass(frozen=True)
class EnsembleModel:
    """Atomic medium description.

    Exactly one of {``density`` (+ geometry), ``positions``} drives any
    given computation: closed-form and Monte-Carlo operations use the
    uniform density, discrete operations use the explicit coordinates.

    Attributes
    ----------
    c6 : float
        van der Waals coefficient [rad/us * um^6]; V(r) = c6/r^6 in
        magnitude, attractive branch.
    density : float, optional
        Uniform density n [atoms/um^3].
    positions : ndarray, optional
        Explicit atom coordinates, shape (M, 3) [um].
    spin_wave : ndarray, optional
        Storage weights |alpha_k|^2 per atom; must match ``positions`` and
        sum to 1.
    geometry : str
        Monte-Carlo sampling region: "infinite_uniform", "sphere" or "box".
    radius : float, optional
        Sphere radius [um] when geometry == "sphere".
    box_lengths : tuple, optional
        Box edge lengths [um] when geometry == "box".
    """

    c6: float
    density: float | None = None
    positions: np.ndarray | None = None
    spin_wave: np.ndarray | None = None
    geometry: str = "infinite_uniform"
    radius: float | None = None
    box_lengths: tuple[float, float, float] | None = None

    def __post_init__(self):
        if self.density is None and self.positions is None:
            raise DomainError("EnsembleModel needs density or positions")
        if self.geometry not in ("infinite_uniform", "sphere", "box"):
            raise DomainError(f"unknown geometry {self.geometry!r}")
        if self.geometry == "sphere" and (self.radius is None or self.radius <= 0):
            raise DomainError("sphere geometry needs a positive radius")
        if self.geometry == "box" and self.box_lengths is None:
            raise DomainError("box geometry needs box_lengths")
        if self.positions is not None:
            pos = np.asarray(self.positions, dtype=float)
            if pos.ndim != 2 or pos.shape[1] != 3:
                raise DomainError("positions must have shape (M, 3)")
            object.__setattr__(self, "positions", pos)
        if self.spin_wave is not None:
            if self.positions is None:
                raise DomainError("spin_wave requires explicit positions")
            sw = np.asarray(self.spin_wave, dtype=float)
            if sw.shape != (self.positions.shape[0],):
                raise DomainError("spin_wave length must match positions")
            if np.any(sw < 0):
                raise DomainError("spin_wave weights must be nonnegative")
            if abs(sw.sum() - 1.0) > _SPIN_WAVE_NORM_TOL:
                raise DomainError(
                    f"spin_wave weights must sum to 1, got {sw.sum()!r}")
            object.__setattr__(self, "spin_wave", sw)


@dataclass(frozen=True)
class CooperativitySet:
    """Complex effective cooperativities of the blocked ensemble.

    ``c_star_v`` is stored as computed (attractive vdW branch gives a
    negative imaginary part); ``c_b`` and ``c_b_prime_abs`` carry the
    magnitudes every fidelity formula consumes, and ``branch_sign`` records
    the sign of the imaginary part.

    The expansion families ``c_alpha`` ... ``c_chi`` follow the stored-
    excitation definitions evaluated at carrier offset ``omega0``;
    ``c_alpha_blocked``/``c_beta_blocked`` are the bare moment sums
    C sum 1/d^2 and C sum 1/d^3 (the blocked-atom parts of the alpha and
    beta/eta families).  They are ``None`` for constructions that do not
    define them (the inhomogeneous average).  ``c_alpha_eit``/``c_eta_eit``
    are the no-excitation counterparts -NC Gamma_e^2/|Omega/2|^2 and
    -i NC Gamma_e^4/|Omega/2|^4, and ``n_eit_alpha``/``n_eit_eta`` the
    effective unblocked atom counts.
    """

    omega0: float
    c_star_v: complex
    c_b: float
    c_b_prime_abs: float
    branch_sign: int
    c_alpha: complex | None
    c_beta: complex | None
    c_eta: complex | None
    c_chi: complex | None
    c_alpha_blocked: complex | None
    c_beta_blocked: complex | None
    c_alpha_eit: complex
    c_eta_eit: complex
    n_eit_alpha: float
    n_eit_eta: float
    n_atoms: int

    @property
    def has_families(self) -> bool:
        return self.c_alpha is not None

    @property
    def denominator(self) -> float:
        """(1 + C_b)^2 + C_b'^2, the workhorse of the leading-order formulas."""
        return (1.0 + self.c_b) ** 2 + self.c_b_prime_abs ** 2


def interaction_zeta(params: AtomCavityParams, ens: EnsembleModel) -> float:
    """zeta = |Omega|^2 / (4 C6 Gamma_e) [um^-6], the inverse sixth power of
    the blockade radius."""
    if ens.c6 <= 0:
        raise DomainError(f"c6 must be positive, got {ens.c6}")
    return abs(params.omega_drive) ** 2 / (4.0 * ens.c6 * params.gamma_e)


def blockade_radius(params: AtomCavityParams, ens: EnsembleModel) -> float:
    """Distance where V(r) crosses |Omega/2|^2/Gamma_e: r_b = zeta^(-1/6) [um]."""
    if params.omega_drive == 0:
        raise DomainError("blockade radius needs a nonzero drive")
    return interaction_zeta(params, ens) ** (-1.0 / 6.0)


def _family_sums(v: np.ndarray, weights: np.ndarray, omega0: float,
                 coop: np.ndarray, half_rabi_sq: np.ndarray,
                 gamma_e: float) -> dict[str, complex]:
    """Weighted blocked-ensemble family sums over interaction shifts ``v``.

    Uses the pole-free rational form with t = V - omega0 and
    q = i t (gamma_e - i omega0) + |Omega/2|^2, so atoms at exactly
    V = omega0 (perfect EIT partners) contribute their finite limits.
    Entries with V = +-inf take the fully-blocked two-level limits.
    """
    v = np.asarray(v, dtype=float)
    w = np.asarray(weights, dtype=float)
    coop = np.broadcast_to(np.asarray(coop, dtype=float), v.shape)
    o2 = np.broadcast_to(np.asarray(half_rabi_sq, dtype=float), v.shape)
    ge = gamma_e

    finite = np.isfinite(v)
    out = {k: 0.0 + 0.0j for k in
           ("c_v", "c_alpha", "c_beta", "c_eta", "c_chi", "m2", "m3")}
    out["n_alpha"] = 0.0
    out["n_eta"] = 0.0

    if np.any(finite):
        t = v[finite] - omega0
        q = 1j * t * (ge - 1j * omega0) + o2[finite]
        wc = w[finite] * coop[finite]
        itg = 1j * t * ge
        q2 = q * q
        q3 = q2 * q
        o2f = o2[finite]
        out["c_v"] += np.sum(wc * itg / q)
        out["c_alpha"] += np.sum(wc * (-ge ** 2 * (t * t + o2f)) / q2)
        out["c_beta"] += np.sum(wc * (-1j * t * ge ** 3 * (t * t + o2f)) / q3)
        out["c_eta"] += np.sum(wc * (-1j * o2f * ge ** 4) / q3)
        out["c_chi"] += np.sum(wc * (-1j * o2f * omega0 * ge ** 3) / q3)
        out["m2"] += np.sum(wc * (-(t * ge) ** 2) / q2)
        out["m3"] += np.sum(wc * (-1j * (t * ge) ** 3) / q3)
        # effective unblocked-atom counts from the family splits:
        # e/d = |Omega/2|^2 / q exactly, so the alpha count sums Re[(o2/q)^2]
        # and the eta count Re[(o2/q)^3 - i (o2^2/ge^4) / d^3].
        out["n_alpha"] += float(np.sum(w[finite] * np.real((o2f / q) ** 2)))
        dinv3 = (itg / q) ** 3
        out["n_eta"] += float(np.sum(
            w[finite] * np.real((o2f / q) ** 3
                                - 1j * (o2f ** 2 / ge ** 4) * dinv3)))

    if np.any(~finite):
        wb = w[~finite] * coop[~finite]
        den = ge - 1j * omega0
        out["c_v"] += np.sum(wb) * ge / den
        out["c_alpha"] += np.sum(wb) * ge ** 2 / den ** 2
        out["c_beta"] += np.sum(wb) * ge ** 3 / den ** 3
        out["m2"] += np.sum(wb) * ge ** 2 / den ** 2
        out["m3"] += np.sum(wb) * ge ** 3 / den ** 3
        # fully blocked atoms contribute nothing to eta/chi or the counts

    return out


def _build_set(sums: Mapping[str, complex], omega0: float,
               params: AtomCavityParams) -> CooperativitySet:
    cstar = complex(sums["c_v"])
    mu = params.gamma_e ** 2 / params.half_rabi_sq
    nc = params.nc
    im = cstar.imag
    return CooperativitySet(
        omega0=omega0,
        c_star_v=cstar,
        c_b=cstar.real,
        c_b_prime_abs=abs(im),
        branch_sign=(0 if im == 0 else (1 if im > 0 else -1)),
        c_alpha=complex(sums["c_alpha"]),
        c_beta=complex(sums["c_beta"]),
        c_eta=complex(sums["c_eta"]),
        c_chi=complex(sums["c_chi"]),
        c_alpha_blocked=complex(sums["m2"]),
        c_beta_blocked=complex(sums["m3"]),
        c_alpha_eit=-nc * mu,
        c_eta_eit=-1j * nc * mu ** 2,
        n_eit_alpha=float(sums["n_alpha"]),
        n_eit_eta=float(sums["n_eta"]),
        n_atoms=params.n_atoms,
    )


def cooperativity_from_interactions(params: AtomCavityParams,
                                    v: np.ndarray,
                                    weights: np.ndarray | None = None,
                                    omega0: float = 0.0,
                                    coop: np.ndarray | float | None = None,
                                    half_rabi_sq: np.ndarray | float | None = None,
                                    ) -> CooperativitySet:
    """Cooperativity set from explicit interaction shifts (rad/us).

    ``weights`` are multiplicities (default 1 per entry); per-atom coupling
    and drive can be supplied for inhomogeneous ensembles with a uniform
    excited-state width.
    """
    v = np.atleast_1d(np.asarray(v, dtype=float))
    w = np.ones_like(v) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != v.shape:
        raise DomainError("weights must match the interaction array")
    c = params.coop_single if coop is None else coop
    o2 = params.half_rabi_sq if half_rabi_sq is None else half_rabi_sq
    sums = _family_sums(v, w, omega0, c, o2, params.gamma_e)
    return _build_set(sums, omega0, params)


def interaction_shifts(ens: EnsembleModel, stored_at: int) -> np.ndarray:
    """V_kl = -c6/r^6 between the stored atom and every other atom [rad/us].

    The stored atom's self term is excluded; a partner at zero distance is
    an error naming the offending pair.
    """
    if ens.positions is None:
        raise DomainError("interaction shifts need explicit positions")
    pos = ens.positions
    m = pos.shape[0]
    if not 0 <= stored_at < m:
        raise DomainError(f"stored_at {stored_at} out of range for {m} atoms")
    delta = pos - pos[stored_at]
    r2 = np.einsum("ij,ij->i", delta, delta)
    partners = np.arange(m) != stored_at
    r2p = r2[partners]
    if np.any(r2p == 0.0):
        other = np.nonzero(partners)[0][np.nonzero(r2p == 0.0)[0][0]]
        raise DomainError(
            f"atoms {stored_at} and {other} are coincident: "
            "infinite interaction")
    return -ens.c6 / r2p ** 3


def continuum_cooperativity(params: AtomCavityParams,
                            ens: EnsembleModel) -> CooperativitySet:
    """Closed form for a uniform cloud at resonance.

    The volume integral 4 pi n C int r^2/(1 + i zeta r^6) dr evaluates to
    C*_v = (2/3) pi^2 n C (1 - i)/sqrt(2 zeta), so C_b = |C_b'| =
    (2/3) C n pi^2 / sqrt(2 zeta).  The higher families follow from the
    moment integrals C sum 1/d^j -> M_j with M_2 = M_1/2 and M_3 = 3 M_1/8,
    plus the extensive (unblocked) parts proportional to the total atom
    number.
    """
    if params.delta != 0.0 or params.delta_two != 0.0:
        raise DomainError("continuum closed form is valid at resonance only")
    if params.gamma_r != 0.0:
        raise DomainError("continuum closed form assumes gamma_r = 0")
    if ens.density is None:
        raise DomainError("continuum mode needs a uniform density")
    if ens.density < 0:
        raise DomainError(f"density must be >= 0, got {ens.density}")
    zeta = interaction_zeta(params, ens)

    n = ens.density
    c = params.coop_single
    m1 = (2.0 / 3.0) * math.pi ** 2 * n * c / math.sqrt(2.0 * zeta) * (1.0 - 1.0j)
    m2 = 0.5 * m1
    m3 = 0.375 * m1

    mu = params.gamma_e ** 2 / params.half_rabi_sq
    nc = params.nc
    r_b = zeta ** (-1.0 / 6.0)
    n_blocked_sphere = n * (4.0 / 3.0) * math.pi * r_b ** 3
    n_eit = params.n_atoms - n_blocked_sphere

    sums = {
        "c_v": m1,
        "c_alpha": m2 - mu * (nc - 2.0 * m1 + m2),
        "c_beta": m3 - mu * (m1 - 2.0 * m2 + m3),
        "c_eta": -1j * mu ** 2 * (nc - 3.0 * m1 + 3.0 * m2 - m3),
        "c_chi": 0.0j,
        "m2": m2,
        "m3": m3,
        "n_alpha": n_eit,
        "n_eta": n_eit,
    }
    return _build_set(sums, 0.0, params)


def discrete_cooperativity(params: AtomCavityParams,
                           ens: EnsembleModel,
                           stored_at: int,
                           overrides: PerAtomOverrides | None = None,
                           omega0: float = 0.0) -> CooperativitySet:
    """Direct summation over explicit atom positions with the excitation
    stored at index ``stored_at`` (self term excluded)."""
    if params.gamma_r != 0.0:
        raise DomainError(
            "family sums assume gamma_r = 0; use inhomogeneous_cooperativity "
            "for Rydberg decoherence")
    v = interaction_shifts(ens, stored_at)
    m = ens.positions.shape[0]
    coop: np.ndarray | float = params.coop_single
    o2: np.ndarray | float = params.half_rabi_sq
    if overrides is not None:
        per = overrides.resolve(params, m)
        if overrides.gamma_e_l is not None and np.ptp(per["gamma_e"]) != 0.0:
            raise DomainError(
                "family sums need a uniform gamma_e; use reflection_exact "
                "for fully inhomogeneous widths")
        if np.any(per["gamma_r"] != 0.0):
            raise DomainError("family sums assume gamma_r = 0 on all atoms")
        keep = np.arange(m) != stored_at
        coop = per["coop_single"][keep]
        o2 = np.abs(per["omega_drive"][keep]) ** 2 / 4.0
    return cooperativity_from_interactions(
        params, v, omega0=omega0, coop=coop, half_rabi_sq=o2)


def inhomogeneous_cooperativity(params: AtomCavityParams,
                                ens: EnsembleModel,
                                overrides: PerAtomOverrides | None = None,
                                ) -> CooperativitySet:
    """Spin-wave-weighted cooperativity with Rydberg decoherence folded in.

    Averages the per-site cavity response over the storage weights:
    1/(1 + C*_inh) = sum_k |alpha_k|^2 / (1 + C*_v,k) with per-site sums
    C_l / (1 + |Omega_l/2|^2 / (Gamma_rl Gamma_el + i V_kl Gamma_el)).
    The expansion families are not defined for this construction and are
    left unset.
    """
    if ens.positions is None:
        raise DomainError("inhomogeneous mode needs explicit positions")
    if ens.spin_wave is None:
        raise DomainError("inhomogeneous mode needs spin_wave weights")
    pos = ens.positions
    m = pos.shape[0]
    per = (overrides or PerAtomOverrides()).resolve(params, m)
    coop = per["coop_single"]
    o2 = np.abs(per["omega_drive"]) ** 2 / 4.0
    ge = per["gamma_e"]
    gr = per["gamma_r"]

    acc = 0.0 + 0.0j
    idx = np.arange(m)
    for k in range(m):
        wk = ens.spin_wave[k]
        if wk == 0.0:
            continue
        keep = idx != k
        delta = pos[keep] - pos[k]
        r2 = np.einsum("ij,ij->i", delta, delta)
        if np.any(r2 == 0.0):
            other = idx[keep][np.nonzero(r2 == 0.0)[0][0]]
            raise DomainError(
                f"atoms {k} and {other} are coincident: infinite interaction")
        v = -ens.c6 / r2 ** 3
        denom = gr[keep] * ge[keep] + 1j * v * ge[keep]
        inner = 1.0 + np.sum(coop[keep] / (1.0 + o2[keep] / denom))
        acc += wk / inner

    cstar = 1.0 / acc - 1.0
    mu = params.gamma_e ** 2 / params.half_rabi_sq
    nc = params.nc
    im = cstar.imag
    return CooperativitySet(
        omega0=0.0,
        c_star_v=cstar,
        c_b=cstar.real,
        c_b_prime_abs=abs(im),
        branch_sign=(0 if im == 0 else (1 if im > 0 else -1)),
        c_alpha=None, c_beta=None, c_eta=None, c_chi=None,
        c_alpha_blocked=None, c_beta_blocked=None,
        c_alpha_eit=-nc * mu,
        c_eta_eit=-1j * nc * mu ** 2,
        n_eit_alpha=float("nan"),
        n_eit_eta=float("nan"),
        n_atoms=params.n_atoms,
    )


def _stratified_radii(rng: np.random.Generator, n_samples: int, radius: float,
                      n_shells: int) -> tuple[np.ndarray, np.ndarray]:
    """Radii of uniformly distributed points in a sphere, drawn with
    equal-width radial strata and volume-proportional allocation.

    Each point is marginally uniform over the sphere; stratification only
    removes the between-shell variance so the 1/r^6 crossover at the
    blockade radius is resolved.  Returns (radii, per-sample weights) with
    weights summing to 1.
    """
    n_shells = min(n_shells, n_samples)
    edges = np.linspace(0.0, radius, n_shells + 1)
    vol = (edges[1:] ** 3 - edges[:-1] ** 3) / radius ** 3
    raw = vol * n_samples
    counts = np.maximum(np.floor(raw).astype(int), 1)
    excess = int(counts.sum()) - n_samples
    if excess > 0:
        order = np.argsort(-counts)
        i = 0
        while excess > 0:
            j = order[i % n_shells]
            if counts[j] > 1:
                counts[j] -= 1
                excess -= 1
            i += 1
    elif excess < 0:
        frac = raw - np.floor(raw)
        order = np.argsort(-frac)
        counts[order[:(-excess)]] += 1

    radii = np.empty(n_samples)
    weights = np.empty(n_samples)
    start = 0
    lo3 = edges[:-1] ** 3
    hi3 = edges[1:] ** 3
    for j in range(n_shells):
        stop = start + counts[j]
        u = rng.random(counts[j])
        radii[start:stop] = np.cbrt(lo3[j] + u * (hi3[j] - lo3[j]))
        weights[start:stop] = vol[j] / counts[j]
        start = stop
    return radii, weights


def monte_carlo_cooperativity(params: AtomCavityParams,
                              ens: EnsembleModel,
                              n_samples: int,
                              seed: int,
                              radius_factor: float = 10.0,
                              n_shells: int = 400,
                              omega0: float = 0.0) -> CooperativitySet:
    """Monte-Carlo estimate of the cooperativity set for a uniform cloud.

    Atoms are sampled uniformly in a sphere centered on the stored atom
    (radius ``radius_factor`` blockade radii for the infinite-uniform
    geometry, or the explicit sphere/box region).  The counter-based Philox
    generator makes runs bit-reproducible for a fixed seed.
    """
    if ens.density is None:
        raise DomainError("Monte Carlo needs a uniform density")
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    rng = np.random.default_rng(np.random.Philox(seed))

    if ens.geometry == "box":
        lengths = np.asarray(ens.box_lengths, dtype=float)
        pts = (rng.random((n_samples, 3)) - 0.5) * lengths
        r = np.sqrt(np.einsum("ij,ij->i", pts, pts))
        volume = float(np.prod(lengths))
        weights = np.full(n_samples, ens.density * volume / n_samples)
    else:
        if ens.geometry == "sphere":
            radius = float(ens.radius)
        else:
            radius = radius_factor * blockade_radius(params, ens)
        r, w = _stratified_radii(rng, n_samples, radius, n_shells)
        volume = (4.0 / 3.0) * math.pi * radius ** 3
        weights = ens.density * volume * w

    r = np.maximum(r, 1e-300)  # the stored atom sits at the origin, r > 0 a.s.
    v = -ens.c6 / r ** 6
    return cooperativity_from_interactions(params, v, weights=weights,
                                           omega0=omega0)

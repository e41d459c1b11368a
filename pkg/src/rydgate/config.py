"""Line-oriented configuration files and atom-position files.

Config files hold ``key = value`` pairs, one per line, with ``#`` comments.
Rates are quoted as (2pi) x MHz and converted to rad/us here, once, so the
numerical layers never see laboratory units.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import AtomCavityParams, PulseSpectrum, mhz_to_rad_per_us
from .errors import ConfigError

# Recognized keys.  The last three feed the ensemble model used by the
# cooperativity commands; everything else defines AtomCavityParams and the
# pulse.
_KNOWN_KEYS = (
    "kappa_2pi_mhz",
    "gamma_e_2pi_mhz",
    "gamma_r_2pi_mhz",
    "omega_2pi_mhz",
    "coop_single",
    "n_atoms",
    "delta_2pi_mhz",
    "delta2_2pi_mhz",
    "pulse_shape",
    "pulse_duration_ns",
    "density_per_um3",
    "c6_2pi_mhz_um6",
    "seed",
)

_REQUIRED_KEYS = ("kappa_2pi_mhz", "gamma_e_2pi_mhz", "omega_2pi_mhz",
                  "coop_single", "n_atoms")


@dataclass(frozen=True)
class RunConfig:
    """Resolved configuration: internal units only."""

    params: AtomCavityParams
    pulse: PulseSpectrum
    density: float | None = None       # atoms/um^3
    c6: float | None = None            # rad/us * um^6
    seed: int | None = None

    def require_ensemble(self) -> tuple[float, float]:
        if self.density is None or self.c6 is None:
            raise ConfigError(
                "this command needs density_per_um3 and c6_2pi_mhz_um6 "
                "in the config (or the corresponding flags)")
        return self.density, self.c6


def parse_config_text(text: str, source: str = "<config>") -> RunConfig:
    """Parse config text; unknown or duplicate keys fail with the line named."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(
                f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(
                f"{source}:{lineno}: unknown key {key!r} in line {raw!r}")
        if key in values:
            raise ConfigError(
                f"{source}:{lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"{source}:{lineno}: empty value for {key!r}")
        values[key] = value

    missing = [k for k in _REQUIRED_KEYS if k not in values]
    if missing:
        raise ConfigError(f"{source}: missing required keys: {', '.join(missing)}")

    def fval(key, default=None):
        if key not in values:
            return default
        try:
            return float(values[key])
        except ValueError:
            raise ConfigError(f"{source}: key {key!r} is not a number: "
                              f"{values[key]!r}") from None

    def ival(key, default=None):
        if key not in values:
            return default
        try:
            return int(values[key])
        except ValueError:
            raise ConfigError(f"{source}: key {key!r} is not an integer: "
                              f"{values[key]!r}") from None

    params = AtomCavityParams(
        kappa=mhz_to_rad_per_us(fval("kappa_2pi_mhz")),
        gamma_e=mhz_to_rad_per_us(fval("gamma_e_2pi_mhz")),
        gamma_r=mhz_to_rad_per_us(fval("gamma_r_2pi_mhz", 0.0)),
        omega_drive=mhz_to_rad_per_us(fval("omega_2pi_mhz")),
        coop_single=fval("coop_single"),
        n_atoms=ival("n_atoms"),
        delta=mhz_to_rad_per_us(fval("delta_2pi_mhz", 0.0)),
        delta_two=mhz_to_rad_per_us(fval("delta2_2pi_mhz", 0.0)),
    )

    shape = values.get("pulse_shape")
    duration = fval("pulse_duration_ns")
    if shape == "delta" or (shape is None and duration is None):
        pulse = PulseSpectrum.delta()
    else:
        if duration is None:
            raise ConfigError(
                f"{source}: pulse_shape {shape!r} needs pulse_duration_ns")
        pulse = PulseSpectrum.from_duration_ns(duration, shape=shape or "gaussian")

    c6_mhz = fval("c6_2pi_mhz_um6")
    return RunConfig(
        params=params,
        pulse=pulse,
        density=fval("density_per_um3"),
        c6=mhz_to_rad_per_us(c6_mhz) if c6_mhz is not None else None,
        seed=ival("seed"),
    )


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text, source=str(path))


def load_positions(path: str | Path) -> tuple[np.ndarray, np.ndarray | None]:
    """Read atom positions: three floats per line (x y z in um), optional
    fourth float giving the spin-wave weight |alpha_k|^2."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read positions {path}: {exc}") from None

    rows: list[list[float]] = []
    width: int | None = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (3, 4):
            raise ConfigError(
                f"{path}:{lineno}: expected 3 or 4 floats, got {raw!r}")
        try:
            nums = [float(p) for p in parts]
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: non-numeric entry in {raw!r}") from None
        if width is None:
            width = len(nums)
        elif len(nums) != width:
            raise ConfigError(
                f"{path}:{lineno}: inconsistent column count (expected {width})")
        rows.append(nums)

    if not rows:
        raise ConfigError(f"{path}: no atom positions found")
    data = np.asarray(rows, dtype=float)
    if data.shape[1] == 4:
        return data[:, :3], data[:, 3]
    return data, None

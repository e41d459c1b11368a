"""Command-line front end.

Subcommands: ``coop`` (blockaded cooperativity), ``spectrum`` (reflection
sweep), ``fidelity`` (gate figures vs blockaded cooperativity),
``repeater`` (secret-key rate vs blockaded cooperativity) and ``verify``
(built-in invariant suite).  Data goes to --out as CSV or JSON with a
reproducibility manifest; --plot renders the matching figure next to the
data file.

Exit codes: 0 success, 2 configuration/usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__, blockade, gatefid, repeater, scatter, verify
from .config import RunConfig, load_config, load_positions
from .core import PulseSpectrum
from .errors import (ConfigError, DomainError, NumericalFailureError,
                     RydgateError, SingularInputError)
from .report import RunManifest, format_table, render_figure, sha256_hex, write_output

_EXIT_OK = 0
_EXIT_CONFIG = 2
_EXIT_NUMERICAL = 3


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", type=Path, default=None,
                        help="output file (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--seed", type=int, default=None,
                        help="random seed for stochastic operations")
    parser.add_argument("--threads", type=int, default=1,
                        help="thread budget; results are independent of it")
    parser.add_argument("--plot", action="store_true",
                        help="render a PNG figure next to --out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rydgate",
        description="Photonic controlled-phase gates via Rydberg blockade "
                    "in an optical cavity: reflection spectra, blockaded "
                    "cooperativities, gate fidelities, repeater rates.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_coop = sub.add_parser(
        "coop", help="blockaded cooperativity, blockade radius and zeta")
    p_coop.add_argument("--config", type=Path, required=True)
    p_coop.add_argument("--density", type=float, default=None,
                        help="override density [atoms/um^3]")
    p_coop.add_argument("--c6-2pi-mhz-um6", type=float, default=None,
                        help="override vdW coefficient [(2pi) MHz um^6]")
    p_coop.add_argument("--positions", type=Path, default=None,
                        help="atom position file for discrete summation")
    p_coop.add_argument("--stored-at", type=int, default=0,
                        help="stored-atom index for discrete mode")
    p_coop.add_argument("--mc-samples", type=int, default=None,
                        help="Monte-Carlo sample count (continuum density)")
    _add_common(p_coop)

    p_spec = sub.add_parser("spectrum", help="reflection coefficient sweep")
    p_spec.add_argument("--config", type=Path, required=True)
    p_spec.add_argument("--omega-min", type=float, required=True,
                        help="sweep start [rad/us]")
    p_spec.add_argument("--omega-max", type=float, required=True,
                        help="sweep end [rad/us]")
    p_spec.add_argument("--points", type=int, required=True)
    p_spec.add_argument("--cb", type=float, default=None,
                        help="blocked response from a shell realization "
                             "with this blockaded cooperativity")
    p_spec.add_argument("--positions", type=Path, default=None,
                        help="blocked response from explicit positions")
    p_spec.add_argument("--stored-at", type=int, default=0)
    _add_common(p_spec)

    p_fid = sub.add_parser(
        "fidelity", help="gate fidelities vs blockaded cooperativity")
    p_fid.add_argument("--cb-min", type=float, required=True)
    p_fid.add_argument("--cb-max", type=float, required=True)
    p_fid.add_argument("--points", type=int, required=True)
    p_fid.add_argument("--cb-prime-ratio", type=float, default=1.0,
                       help="|C_b'| / C_b along the sweep")
    p_fid.add_argument("--config", type=Path, default=None,
                       help="full physical parameters; adds exact-"
                            "integration columns")
    p_fid.add_argument("--pulse", choices=("delta", "gaussian", "lorentzian"),
                       default=None, help="pulse shape (default from config, "
                                          "else delta)")
    p_fid.add_argument("--pulse-duration-ns", type=float, default=None)
    _add_common(p_fid)

    p_rep = sub.add_parser(
        "repeater", help="secret-key rate per station vs blockaded "
                         "cooperativity")
    p_rep.add_argument("--distance-km", type=float, default=1000.0)
    p_rep.add_argument("--stations", type=int, default=33)
    p_rep.add_argument("--source", choices=("raman", "perfect"),
                       default="perfect")
    p_rep.add_argument("--source-rate-hz", type=float, default=1e6)
    p_rep.add_argument("--swap", choices=("linear", "rydberg"),
                       default="rydberg")
    p_rep.add_argument("--cb-min", type=float, default=2.0)
    p_rep.add_argument("--cb-max", type=float, default=50.0)
    p_rep.add_argument("--points", type=int, default=25)
    p_rep.add_argument("--cb-prime-ratio", type=float, default=1.0)
    p_rep.add_argument("--eta-readout", type=float, default=0.9)
    p_rep.add_argument("--eta-detector", type=float, default=0.9)
    p_rep.add_argument("--attenuation-km", type=float, default=22.0)
    p_rep.add_argument("--signal-speed-km-s", type=float, default=2.0e5)
    p_rep.add_argument("--c-dx", type=float, default=1.0)
    _add_common(p_rep)

    p_ver = sub.add_parser("verify", help="run the invariant suite")
    _add_common(p_ver)

    return parser


def _resolve_pulse(args, config: RunConfig | None) -> PulseSpectrum:
    shape = getattr(args, "pulse", None)
    duration = getattr(args, "pulse_duration_ns", None)
    if shape is None and duration is None:
        return config.pulse if config is not None else PulseSpectrum.delta()
    if shape == "delta" or (shape is None and duration is None):
        return PulseSpectrum.delta()
    if duration is None:
        raise ConfigError(f"--pulse {shape} needs --pulse-duration-ns")
    return PulseSpectrum.from_duration_ns(duration, shape=shape or "gaussian")


def _cmd_coop(args) -> tuple[list[dict], list[str], str | None, dict]:
    config = load_config(args.config)
    params = config.params
    density = args.density if args.density is not None else config.density
    c6 = (2 * np.pi * args.c6_2pi_mhz_um6
          if args.c6_2pi_mhz_um6 is not None else config.c6)
    if c6 is None:
        raise ConfigError("coop needs c6_2pi_mhz_um6 (config key or flag)")

    if args.positions is not None:
        positions, weights = load_positions(args.positions)
        ens = blockade.EnsembleModel(positions=positions, spin_wave=weights,
                                     c6=c6)
        if weights is not None:
            coop = blockade.inhomogeneous_cooperativity(params, ens)
        else:
            coop = blockade.discrete_cooperativity(params, ens,
                                                   stored_at=args.stored_at)
    else:
        if density is None:
            raise ConfigError(
                "coop needs density_per_um3 (config key or flag) "
                "or --positions")
        ens = blockade.EnsembleModel(density=density, c6=c6)
        if args.mc_samples is not None:
            seed = args.seed if args.seed is not None else (config.seed or 0)
            coop = blockade.monte_carlo_cooperativity(
                params, ens, n_samples=args.mc_samples, seed=seed)
        else:
            coop = blockade.continuum_cooperativity(params, ens)

    ens_ref = blockade.EnsembleModel(density=density or 0.0, c6=c6)
    row = {
        "c_b": coop.c_b,
        "c_b_prime_abs": coop.c_b_prime_abs,
        "r_b_um": blockade.blockade_radius(params, ens_ref),
        "zeta_per_um6": blockade.interaction_zeta(params, ens_ref),
    }
    return [row], list(row.keys()), None, {"config": str(args.config)}


def _cmd_spectrum(args) -> tuple[list[dict], list[str], str | None, dict]:
    config = load_config(args.config)
    params = config.params
    if args.points < 2:
        raise ConfigError("spectrum needs at least 2 points")
    grid = np.linspace(args.omega_min, args.omega_max, args.points)

    if args.positions is not None:
        positions, weights = load_positions(args.positions)
        if config.c6 is None:
            raise ConfigError("positions mode needs c6_2pi_mhz_um6")
        ens = blockade.EnsembleModel(positions=positions, spin_wave=weights,
                                     c6=config.c6)
        if weights is not None:
            spectrum = scatter.make_reflection_spectrum(params, ens=ens)
        else:
            spectrum = scatter.make_reflection_spectrum(
                params, ens=ens, stored_at=args.stored_at)
        params_used = params
    else:
        cb = args.cb
        if cb is None:
            if config.density is None or config.c6 is None:
                raise ConfigError(
                    "spectrum needs --cb, --positions, or density/c6 in "
                    "the config")
            ens = blockade.EnsembleModel(density=config.density, c6=config.c6)
            cb = blockade.continuum_cooperativity(params, ens).c_b
        params_used, v, mult, _ = scatter.blocked_shell_model(params, cb)
        spectrum = scatter.make_reflection_spectrum(params_used, v=v,
                                                    weights=mult)

    rows = scatter.spectrum_rows(params_used, grid, spectrum)
    cols = ["omega_rad_per_us", "re_R_eit", "im_R_eit", "re_R_blocked",
            "im_R_blocked"]
    return rows, cols, "spectrum", {"config": str(args.config)}


def _cmd_fidelity(args) -> tuple[list[dict], list[str], str | None, dict]:
    config = load_config(args.config) if args.config is not None else None
    if args.points < 1:
        raise ConfigError("fidelity needs at least 1 point")
    if args.cb_min <= 0 or args.cb_max < args.cb_min:
        raise ConfigError("need 0 < cb-min <= cb-max")
    pulse = _resolve_pulse(args, config)
    if config is not None:
        params = config.params
    else:
        # abstract sweep: the cooperativity axis is the only physics input
        params = verify.reference_params()
    grid = np.linspace(args.cb_min, args.cb_max, args.points)
    rows = gatefid.fidelity_curve_rows(grid, args.cb_prime_ratio, params,
                                       pulse,
                                       include_exact=config is not None)
    cols = list(rows[0].keys())
    return rows, cols, "fidelity", {
        "config": str(args.config) if args.config else None,
        "pulse_shape": pulse.shape,
        "pulse_variance": pulse.variance,
    }


def _cmd_repeater(args) -> tuple[list[dict], list[str], str | None, dict]:
    if args.points < 1:
        raise ConfigError("repeater needs at least 1 point")
    cfg = repeater.RepeaterConfig(
        total_distance=args.distance_km,
        n_stations=args.stations,
        source_rate=args.source_rate_hz,
        attenuation_length=args.attenuation_km,
        signal_speed=args.signal_speed_km_s,
        eta_readout=args.eta_readout,
        eta_detector=args.eta_detector,
        source_model=(repeater.RAMAN_SOURCE if args.source == "raman"
                      else repeater.PERFECT_SOURCE),
        swap_model=(repeater.LINEAR_OPTICS if args.swap == "linear"
                    else repeater.RYDBERG),
        c_dx=args.c_dx,
    )
    grid = np.linspace(args.cb_min, args.cb_max, args.points)
    rows = repeater.repeater_curve_rows(cfg, grid, args.cb_prime_ratio)
    cols = ["c_b", "rate_hz_per_station", "qber", "levels"]
    return rows, cols, "repeater", {
        "distance_km": args.distance_km,
        "stations": args.stations,
        "source": args.source,
        "swap": args.swap,
    }


def _cmd_verify(args) -> int:
    results = verify.run_all_checks()
    failed = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status}  {res.name}: {res.detail}")
        if not res.passed:
            failed += 1
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return _EXIT_OK if failed == 0 else 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags and names the offending token
        return int(exc.code or 0)

    try:
        if args.subcommand == "verify":
            return _cmd_verify(args)
        handler = {
            "coop": _cmd_coop,
            "spectrum": _cmd_spectrum,
            "fidelity": _cmd_fidelity,
            "repeater": _cmd_repeater,
        }[args.subcommand]
        rows, cols, plot_kind, extra_params = handler(args)
    except ConfigError as exc:
        print(f"rydgate: config error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except DomainError as exc:
        print(f"rydgate: invalid input: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except (NumericalFailureError, SingularInputError) as exc:
        print(f"rydgate: numerical failure: {exc}", file=sys.stderr)
        return _EXIT_NUMERICAL
    except RydgateError as exc:
        print(f"rydgate: error: {exc}", file=sys.stderr)
        return _EXIT_NUMERICAL

    if args.plot and args.out is None:
        print("rydgate: --plot needs --out", file=sys.stderr)
        return _EXIT_CONFIG
    if args.plot and plot_kind is None:
        print("rydgate: no figure defined for this subcommand",
              file=sys.stderr)
        return _EXIT_CONFIG

    data = format_table(rows, cols, args.format)
    manifest = None
    if args.out is not None:
        resolved = dict(extra_params)
        resolved.update({
            k: (str(v) if isinstance(v, Path) else v)
            for k, v in sorted(vars(args).items())
            if k not in ("out", "plot") and v is not None
        })
        manifest = RunManifest(
            subcommand=args.subcommand,
            version=__version__,
            seed=args.seed,
            parameters=resolved,
            output_file=str(args.out),
            output_sha256=sha256_hex(data),
        )
    write_output(data, args.out, manifest)
    if args.plot:
        render_figure(plot_kind, rows, Path(args.out).with_suffix(".png"))
    return _EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

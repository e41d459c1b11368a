"""Deterministic output emission: delimited data, run manifests, figures.

CSV uses a header row, '.' decimal separator, 15 significant digits and
bare '\\n' line endings; JSON is an array of objects with the same keys.
Every file output is accompanied by a manifest recording the resolved
parameters, the seed and a checksum of the emitted bytes, so a run can be
reproduced bit-exactly.
"""

from __future__ import annotations

import hashlib
import io
import json
from dataclasses import asdict, dataclass
from pathlib import Path


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".15g")
    if isinstance(value, complex):
        return f"{value.real:.15g}{value.imag:+.15g}j"
    return str(value)


def format_rows(rows: list[dict], fmt: str = "csv") -> bytes:
    """Render rectangular row data; the header comes from the first row.
    Use :func:`format_table` when the column set must survive empty sweeps."""
    if fmt == "json":
        text = json.dumps(rows, default=_format_value, indent=2)
        return (text + "\n").encode("utf-8")
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    if rows:
        header = list(rows[0].keys())
        buf.write(",".join(header) + "\n")
        for row in rows:
            if list(row.keys()) != header:
                raise ValueError("rows must share one column set")
            buf.write(",".join(_format_value(row[k]) for k in header) + "\n")
    return buf.getvalue().encode("utf-8")


def format_table(rows: list[dict], columns: list[str], fmt: str) -> bytes:
    """Like :func:`format_rows` but with an explicit column list, so an
    empty sweep still emits the header row."""
    if fmt == "json":
        return format_rows(rows, "json")
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_format_value(row[k]) for k in columns) + "\n")
    return buf.getvalue().encode("utf-8")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


@dataclass(frozen=True)
class RunManifest:
    """Reproducibility record emitted alongside every output file."""

    subcommand: str
    version: str
    seed: int | None
    parameters: dict
    output_file: str
    output_sha256: str

    def to_bytes(self) -> bytes:
        payload = asdict(self)
        return (json.dumps(payload, sort_keys=True, indent=2, default=str)
                + "\n").encode("utf-8")


def write_output(data: bytes, out_path: str | Path | None,
                 manifest: RunManifest | None = None) -> None:
    """Write bytes to ``out_path`` (or stdout) plus the manifest file."""
    if out_path is None:
        import sys
        sys.stdout.write(data.decode("utf-8"))
        return
    path = Path(out_path)
    path.write_bytes(data)
    if manifest is not None:
        Path(str(path) + ".manifest.json").write_bytes(manifest.to_bytes())


def render_figure(kind: str, rows: list[dict], png_path: str | Path) -> Path:
    """Render the standard figure for a sweep next to its data file."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if kind == "spectrum":
        w = [r["omega_rad_per_us"] for r in rows]
        ax.plot(w, [r["re_R_eit"] for r in rows], label="Re R (no excitation)")
        ax.plot(w, [r["im_R_eit"] for r in rows], label="Im R (no excitation)")
        ax.plot(w, [r["re_R_blocked"] for r in rows], "--",
                label="Re R (blocked)")
        ax.plot(w, [r["im_R_blocked"] for r in rows], "--",
                label="Im R (blocked)")
        ax.set_xlabel(r"$\omega$ (rad/$\mu$s)")
        ax.set_ylabel("reflection coefficient")
    elif kind == "fidelity":
        cb = [r["c_b"] for r in rows]
        ax.plot(cb, [r["f_cj"] for r in rows], label=r"$F_{CJ}$ (single rail)")
        ax.plot(cb, [r["f_swap"] for r in rows], lw=2.2,
                label=r"$F_{swap}$ (dual rail)")
        ax.plot(cb, [r["p_suc"] for r in rows], ":", label=r"$P_{suc}$")
        ax.set_xlabel(r"blockaded cooperativity $C_b$")
        ax.set_ylabel("fidelity / success probability")
        ax.set_ylim(0.0, 1.02)
    elif kind == "repeater":
        cb = [r["c_b"] for r in rows]
        rate = [max(r["rate_hz_per_station"], 1e-12) for r in rows]
        ax.semilogy(cb, rate)
        ax.set_xlabel(r"blockaded cooperativity $C_b$")
        ax.set_ylabel("secret key rate per station (Hz)")
    else:
        plt.close(fig)
        raise ValueError(f"no figure defined for {kind!r}")
    if ax.get_legend_handles_labels()[0]:
        ax.legend(fontsize="small")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    path = Path(png_path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path

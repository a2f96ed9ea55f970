"""Plot outputs for result directories.

``emit_plot_script`` writes a plain-text gnuplot script that reads the CSVs;
nothing is executed. ``render_figures`` draws the same panels with matplotlib
(Agg backend) and saves them next to the CSVs.
"""

from __future__ import annotations

import csv
import math
from collections import defaultdict
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from semnoma.experiments import CURVES_FILE, CURVES_HEADER, REGION_FILE, REGION_HEADER  # noqa: E402

SCRIPT_FILE = "plots.gp"
REGION_FIGURE = "rate_regions.png"
CURVES_FIGURE = "opportunistic_curves.png"

_REGION_SCHEMES = ("OMA", "NOMA", "semi-NOMA")
_CURVE_SCHEMES = ("opportunistic", "semantic-only", "bit-only")

plt.rcParams.update({"font.size": 11, "lines.linewidth": 1.8, "figure.max_open_warning": 0})


def _read(path: Path) -> tuple[list[str], list[dict[str, str]]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
        return list(reader.fieldnames or []), rows


def _kind(header: list[str]) -> str | None:
    if header == REGION_HEADER:
        return "region"
    if header == CURVES_HEADER:
        return "curves"
    return None


def _quote(path) -> str:
    return "'" + str(path).replace("'", "''") + "'"


def _region_block(path: str, cases: list[str], png: str) -> list[str]:
    if not cases:
        return [f"# {path}: no frontier rows, nothing to plot"]
    lines = [
        f"set terminal pngcairo size {480 * len(cases)},420",
        f"set output {_quote(png)}",
        f"set multiplot layout 1,{len(cases)} title 'Semantic-versus-bit rate regions'",
        "set xlabel 'Bit rate of B-user (bit/s)'",
        "set ylabel 'Semantic rate of S-user (suts/s)'",
        "set key bottom left",
    ]
    for case in cases:
        series = ", \\\n     ".join(
            f"{_quote(path)} every ::1 using (strcol(1) eq \"{s}\" && strcol(2) eq \"{case}\" ? $4 : 1/0):3 "
            f"with lines title \"{s}\""
            for s in _REGION_SCHEMES)
        lines += [f"set title \"{case}\"", f"plot {series}"]
    lines.append("unset multiplot")
    return lines


def _curves_block(path: str, png: str) -> list[str]:
    series = ", \\\n     ".join(
        f"{_quote(path)} every ::1 using (strcol(1) eq \"{s}\" ? $2 : 1/0):3 with linespoints title \"{s}\""
        for s in _CURVE_SCHEMES)
    return [
        "set terminal pngcairo size 640,480",
        f"set output {_quote(png)}",
        "set title 'Secondary ergodic rate vs primary requirement'",
        "set xlabel 'Required ergodic primary rate (bit/s)'",
        "set ylabel 'Ergodic (equivalent) semantic rate (suts/s)'",
        "set key top right",
        f"plot {series}",
    ]


def emit_plot_script(csv_paths: Sequence[str | Path], out_path: str | Path) -> Path:
    """Write a gnuplot script plotting the given result CSVs.

    Region CSVs get one panel per channel case; curve CSVs one panel.
    """
    paths = [Path(p) for p in csv_paths]
    missing = [str(p) for p in paths if not p.is_file()]
    if missing:
        raise FileNotFoundError(f"missing CSV files: {', '.join(missing)}")
    out_path = Path(out_path)
    lines = ["# gnuplot script generated by semnoma", "set datafile separator ','", "set grid"]
    for k, p in enumerate(paths):
        header, rows = _read(p)
        kind = _kind(header)
        png = f"{p.stem}_gnuplot.png"
        if kind == "region":
            cases = list(dict.fromkeys(r["case"] for r in rows))
            lines += _region_block(str(p), cases, png)
        elif kind == "curves":
            lines += _curves_block(str(p), png)
        else:
            raise ValueError(f"{p} is not a semnoma result CSV (header {header})")
        lines.append("")
    lines.append("unset output")
    out_path.write_text("\n".join(lines) + "\n")
    return out_path


def _num(s: str) -> float:
    return float(s) if s != "" else math.nan


def render_region_figure(path: str | Path, out: str | Path) -> Path | None:
    _, rows = _read(Path(path))
    data: dict[str, dict[str, list[tuple[float, float]]]] = defaultdict(lambda: defaultdict(list))
    for r in rows:
        data[r["case"]][r["scheme"]].append((_num(r["bit_rate_bits_per_s"]), _num(r["semantic_rate_suts_per_s"])))
    if not data:
        return None
    fig, axes = plt.subplots(1, len(data), figsize=(4.2 * len(data), 3.8), squeeze=False)
    for ax, (case, schemes) in zip(axes[0], data.items()):
        for s in _REGION_SCHEMES:
            pts = sorted(schemes.get(s, []))
            if pts:
                ax.plot([b / 1e6 for b, _ in pts], [v / 1e3 for _, v in pts], label=s)
        ax.set_title(case)
        ax.set_xlabel("Bit rate (Mbit/s)")
        ax.set_ylabel("Semantic rate (ksuts/s)")
        ax.grid(alpha=0.3)
    axes[0][0].legend(loc="lower left", frameon=False)
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return Path(out)


def render_curves_figure(path: str | Path, out: str | Path) -> Path | None:
    _, rows = _read(Path(path))
    if not rows:
        return None
    fig, ax = plt.subplots(figsize=(5.5, 4.2))
    markers = {"opportunistic": "o", "semantic-only": "s", "bit-only": "^"}
    for s in _CURVE_SCHEMES:
        pts = [(_num(r["r_req_bits_per_s"]), _num(r["ergodic_equiv_semantic_rate_suts_per_s"]))
               for r in rows if r["scheme"] == s]
        if pts:
            ax.plot([x / 1e6 for x, _ in pts], [y / 1e3 for _, y in pts], marker=markers[s], label=s)
    ax.set_xlabel("Required ergodic primary rate (Mbit/s)")
    ax.set_ylabel("Ergodic equiv. semantic rate (ksuts/s)")
    ax.grid(alpha=0.3)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return Path(out)


def plot_directory(result_dir: str | Path, render: bool = True) -> list[Path]:
    """Emit the gnuplot script (and optionally PNGs) for the CSVs found in ``result_dir``."""
    d = Path(result_dir)
    found = [d / name for name in (REGION_FILE, CURVES_FILE) if (d / name).is_file()]
    if not found:
        raise FileNotFoundError(f"missing CSV files: {d / REGION_FILE}, {d / CURVES_FILE}")
    written = [emit_plot_script(found, d / SCRIPT_FILE)]
    if render:
        for p in found:
            fig = render_region_figure(p, d / REGION_FIGURE) if p.name == REGION_FILE \
                else render_curves_figure(p, d / CURVES_FIGURE)
            if fig is not None:
                written.append(fig)
    return written

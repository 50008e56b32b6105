"""Report emission: delimited rows, JSON documents and rendered figures.

The mirror experiment reports one row per cycle and site with the fixed
column set cycle,site,sx,sy,sz,label.  Figures are rendered to files next
to the delimited output when a plot path is supplied; nothing is ever
displayed interactively.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .model import SpectrumReport

CSV_COLUMNS = ("cycle", "site", "sx", "sy", "sz", "label")


@dataclass(frozen=True)
class MirrorRow:
    cycle: int
    site: int
    sx: float
    sy: float
    sz: float
    label: str


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def rows_to_csv(rows: list[MirrorRow], header: bool = True) -> str:
    out = io.StringIO()
    if header:
        out.write(",".join(CSV_COLUMNS) + "\n")
    for r in rows:
        out.write(
            f"{r.cycle},{r.site},{_fmt(r.sx)},{_fmt(r.sy)},{_fmt(r.sz)},{r.label}\n"
        )
    return out.getvalue()


def rows_to_dicts(rows: list[MirrorRow]) -> list[dict]:
    return [
        {
            "cycle": r.cycle,
            "site": r.site,
            "sx": round(r.sx, 12),
            "sy": round(r.sy, 12),
            "sz": round(r.sz, 12),
            "label": r.label,
        }
        for r in rows
    ]


def spectrum_to_dicts(report: SpectrumReport) -> list[dict]:
    out = []
    for ro, axis in zip(report.readouts, report.readout_axes):
        out.append(
            {
                "site": ro.site,
                "sx": round(ro.sx, 12),
                "sy": round(ro.sy, 12),
                "sz": round(ro.sz, 12),
                "readout_axis": axis.value,
                "label": ro.label,
            }
        )
    return out


def render_mirror_figure(
    rows: list[MirrorRow],
    path: str,
    baseline: list[MirrorRow] | None = None,
    title: str = "mirror transport readout",
) -> None:
    """Per-site x and z readouts against cycle number, saved to a file."""
    sites = sorted({r.site for r in rows})
    fig, (ax_x, ax_z) = plt.subplots(1, 2, figsize=(9, 3.6), sharey=True)
    for site in sites:
        history = [r for r in rows if r.site == site]
        cycles = [r.cycle for r in history]
        ax_x.plot(cycles, [r.sx for r in history], marker="o", label=f"site {site}")
        ax_z.plot(cycles, [r.sz for r in history], marker="o", label=f"site {site}")
        if baseline:
            bh = [r for r in baseline if r.site == site]
            ax_x.plot(
                [r.cycle for r in bh], [r.sx for r in bh],
                linestyle=":", marker="x", alpha=0.7,
            )
            ax_z.plot(
                [r.cycle for r in bh], [r.sz for r in bh],
                linestyle=":", marker="x", alpha=0.7,
            )
    ax_x.set_title("x readout")
    ax_z.set_title("z readout")
    for ax in (ax_x, ax_z):
        ax.set_xlabel("cycle")
        ax.axhline(0.0, color="grey", linewidth=0.6)
        ax.set_ylim(-1.1, 1.1)
    ax_x.set_ylabel("expectation")
    ax_x.legend(loc="best", fontsize=8)
    if baseline:
        fig.suptitle(title + " (dotted: swap-network baseline)")
    else:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_spectrum_figure(report: SpectrumReport, path: str, title: str) -> None:
    """Bar chart of the designated-axis readout per site."""
    sites = [ro.site for ro in report.readouts]
    values = []
    for ro, axis in zip(report.readouts, report.readout_axes):
        values.append({"X": ro.sx, "Y": ro.sy, "Z": ro.sz}[axis.value])
    colors = ["tab:green" if v > 0 else "tab:red" for v in values]
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    ax.bar([str(s) for s in sites], values, color=colors)
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_ylim(-1.1, 1.1)
    ax.set_xlabel("site")
    ax.set_ylabel("readout along designated axis")
    for idx, (ro, v) in enumerate(zip(report.readouts, values)):
        ax.annotate(ro.label, (idx, v), ha="center",
                    va="bottom" if v >= 0 else "top", fontsize=8)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)

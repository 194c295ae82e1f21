"""Figures rendered next to the CSV/JSON reports."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from dsrsim.controller import TileState  # noqa: E402
from dsrsim.metrics import SequenceReport  # noqa: E402

# no version/date stamps, so reruns give byte-identical files
_PNG_META = {"Software": None}

STATE_COLORS = {
    "FULL": "#1b3a5c",
    "DOWN1_CANDIDATE": "#3f6e9a",
    "QUARTER": "#6fa0c8",
    "DOWN2_CANDIDATE": "#a9cbe4",
    "SIXTEENTH": "#e3eef7",
}


def _save(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, dpi=100, metadata=_PNG_META)
    plt.close(fig)
    return path


def plot_sequence(report: SequenceReport, path, title: str = "") -> Path:
    """PSNR and shader invocation ratio per frame. Exact frames sit on a marker row at the top."""
    idx = [f.frame_index for f in report.frames]
    db = [f.psnr_db for f in report.frames]
    finite = [v for v in db if not math.isinf(v)]
    top = (max(finite) if finite else 60.0) + 5.0

    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
    ax1.plot([i for i, v in zip(idx, db) if not math.isinf(v)], finite, "o-", ms=3, color="#1b3a5c")
    exact = [i for i, v in zip(idx, db) if math.isinf(v)]
    if exact:
        ax1.plot(exact, [top] * len(exact), "^", color="#2a7d2a", label="exact (inf dB)")
        ax1.legend(loc="lower right", frameon=False)
    ax1.set_ylabel("PSNR [dB]")
    ax1.set_ylim(top=top + 3)

    ax2.step(idx, [f.invocation_ratio for f in report.frames], where="mid", color="#8a3b12")
    ax2.axhline(1 / 16, ls=":", color="gray", lw=0.8)
    ax2.set_ylim(0, 1.05)
    ax2.set_ylabel("invocations / baseline")
    ax2.set_xlabel("frame")
    if title:
        ax1.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_rate_histogram(report: SequenceReport, path) -> Path:
    idx = [f.frame_index for f in report.frames]
    names = [s.name for s in TileState]
    totals = [sum(f.rate_histogram.values()) or 1 for f in report.frames]
    stacks = [[f.rate_histogram.get(n, 0) / t for f, t in zip(report.frames, totals)] for n in names]

    fig, ax = plt.subplots(figsize=(7, 3.2))
    ax.stackplot(idx, stacks, labels=names, colors=[STATE_COLORS[n] for n in names], step="mid")
    ax.set_xlim(idx[0] - 0.5, idx[-1] + 0.5)
    ax.set_ylim(0, 1)
    ax.set_xlabel("frame")
    ax.set_ylabel("fraction of tiles")
    ax.legend(loc="center left", bbox_to_anchor=(1.0, 0.5), frameon=False, fontsize=8)
    fig.tight_layout()
    return _save(fig, path)


def plot_sweep(result, path) -> Path:
    """Savings against mean PSNR for every swept (t, d); the selected point is circled."""
    pts = [p for p in result.sweep if not math.isinf(p.mean_psnr_db)]
    exact = [p for p in result.sweep if math.isinf(p.mean_psnr_db)]
    fig, ax = plt.subplots(figsize=(6, 4))
    sc = ax.scatter(
        [p.mean_psnr_db for p in pts],
        [1 - p.invocation_ratio for p in pts],
        c=[p.d for p in pts],
        cmap="viridis",
        s=18,
    )
    if pts:
        fig.colorbar(sc, ax=ax, label="excluded diagonals d")
    if exact:
        ax.text(
            0.02, 0.02, f"{len(exact)} configs exact (inf dB, 0 savings shown off-axis)",
            transform=ax.transAxes, fontsize=7, color="gray",
        )
    if not math.isinf(result.mean_psnr_db):
        ax.scatter([result.mean_psnr_db], [result.savings], s=120, facecolors="none", edgecolors="r")
    if not math.isinf(result.psnr_floor):
        ax.axvline(result.psnr_floor, ls="--", color="gray", lw=0.8)
    ax.set_xlabel("mean PSNR [dB]")
    ax.set_ylabel("shader invocation savings")
    ax.set_title(f"selected t={result.t:g}, d={result.d}")
    fig.tight_layout()
    return _save(fig, path)

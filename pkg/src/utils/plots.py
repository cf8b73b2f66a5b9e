from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

logger = logging.getLogger(__name__)

MARKERS = {"transformation": ("o", "tab:green"), "geometry": ("^", "tab:blue")}


def _pyplot():
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        logger.warning("matplotlib not installed; skipping plots (install the 'plots' extra)")
        return None
    return plt


def plot_estimates(
    path: Path, rows: Sequence[Mapping[str, Any]], value: str, error: str, truth: Optional[float]
) -> Optional[Path]:
    """Scatter of per-repetition estimates with error bars, one series per framework."""
    plt = _pyplot()
    if plt is None:
        return None
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for offset, name in enumerate(sorted({r["framework"] for r in rows})):
        series = [r for r in rows if r["framework"] == name and r.get(value) is not None]
        marker, color = MARKERS.get(name, ("s", "tab:gray"))
        ax.errorbar(
            [r["repetition"] + 0.15 * offset for r in series],
            [r[value] for r in series],
            yerr=[r[error] for r in series],
            fmt=marker,
            color=color,
            capsize=2,
            label=name,
        )
    if truth is not None:
        ax.axhline(truth, color="gray", linestyle="--", linewidth=1)
    ax.set_xlabel("repetition")
    ax.set_ylabel(value)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def plot_sweep(path: Path, rows: Sequence[Mapping[str, Any]], x: str, y: str, group: str) -> Optional[Path]:
    plt = _pyplot()
    if plt is None:
        return None
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for name in sorted({str(r[group]) for r in rows}):
        series = sorted((r for r in rows if str(r[group]) == name), key=lambda r: r[x])
        marker, color = MARKERS.get(name, ("s", None))
        ax.plot([r[x] for r in series], [r[y] for r in series], marker=marker, color=color, label=f"{group}={name}")
    ax.set_xlabel(x)
    ax.set_ylabel(y)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path

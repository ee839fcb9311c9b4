"""File-backed matplotlib rendering for the CLI report paths."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def plot_columns(path, x, series: dict, xlabel: str, ylabel: str,
                 logy: bool = False, title: str | None = None) -> None:
    """Render one labeled curve per series against a shared x axis."""
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    for label, y in series.items():
        ax.plot(x, y, lw=1.2, label=label)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(series) > 1:
        ax.legend(loc="best", fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)

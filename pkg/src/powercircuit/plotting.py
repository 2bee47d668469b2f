"""Figures for the bench command.  Uses the non-interactive Agg backend."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def fit_loglog(xs, ys) -> tuple[float, float]:
    """Least-squares slope and intercept of log(y) against log(x)."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    slope, icpt = np.polyfit(lx, ly, 1)
    return float(slope), float(icpt)


def plot_scaling(lengths, times_ms, path, title: str = "", xlabel: str = "input length") -> float | None:
    """Log-log runtime plot with the fitted slope; returns the slope (None if < 2 points)."""
    pts = [(x, y) for x, y in zip(lengths, times_ms) if x > 0 and y > 0]
    fig, ax = plt.subplots(figsize=(5, 3.6))
    slope = None
    if pts:
        xs, ys = zip(*pts)
        ax.loglog(xs, ys, "o-", label="measured")
        if len(pts) >= 2:
            slope, icpt = fit_loglog(xs, ys)
            grid = np.geomspace(min(xs), max(xs), 50)
            ax.loglog(grid, np.exp(icpt) * grid ** slope, "--", color="grey", label=f"fit: slope {slope:.2f}")
        ax.legend(frameon=False)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("time [ms]")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return slope

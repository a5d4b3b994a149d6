"""Deterministic SVG plots of trajectories.

Figures are built on bare :class:`matplotlib.figure.Figure` objects, so no
global pyplot state is touched and plotting is safe from worker threads.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
import numpy as np
from matplotlib.collections import LineCollection
from matplotlib.figure import Figure
from matplotlib.patches import Circle

from .dynamics import Trajectory, convert_trajectory
from .errors import ConfigError

__all__ = ["STYLES", "default_style", "plot_trajectory"]

STYLES = ("alpha", "disk", "siegel", "h2")
_STYLE_CHART = {"alpha": "alpha", "disk": "disk", "siegel": "siegel", "h2": "h2"}
_SVG_RC = {"svg.hashsalt": "gausspack", "svg.fonttype": "path"}


def default_style(chart: str) -> str | None:
    return {"alpha": "alpha", "moments": "alpha", "disk": "disk",
            "siegel": "siegel", "h2": "h2"}.get(chart)


def _stationary(z):
    return np.max(np.abs(z - z[0])) < 1e-12


def _complex_path(ax, z, color="C0"):
    if _stationary(z):
        ax.plot([z[0].real], [z[0].imag], "o", color=color)
    else:
        ax.plot(z.real, z.imag, "-", color=color, lw=1.0)
        ax.plot([z[0].real], [z[0].imag], "o", color=color, ms=3)


def _plot_alpha(ax, traj):
    z = traj.values[:, 0]
    _complex_path(ax, z)
    ax.axhline(0, color="0.8", lw=0.5)
    ax.axvline(0, color="0.8", lw=0.5)
    ax.set_xlabel(r"Re $\alpha$")
    ax.set_ylabel(r"Im $\alpha$")
    ax.set_aspect("equal", adjustable="datalim")


def _plot_disk(ax, traj):
    ax.add_patch(Circle((0, 0), 1.0, fill=False, color="k", lw=1.0))
    _complex_path(ax, traj.values[:, 0])
    ax.set_xlim(-1.05, 1.05)
    ax.set_ylim(-1.05, 1.05)
    ax.set_aspect("equal")
    ax.set_xlabel(r"Re $\zeta$")
    ax.set_ylabel(r"Im $\zeta$")


def _plot_siegel(ax, traj):
    z = traj.values[:, 0]
    _complex_path(ax, z)
    ax.axhline(0, color="k", lw=1.0)
    top = float(np.max(z.imag)) * 1.1
    ax.set_ylim(0, max(top, 1e-3))
    ax.set_xlabel(r"Re $\mathcal{C}$")
    ax.set_ylabel(r"Im $\mathcal{C}$")


def _plot_h2(fig, ax, traj):
    tab = traj.table()
    y1, y2, y3 = tab[:, 1], tab[:, 2], tab[:, 3]
    if len(y1) < 2 or (np.ptp(y2) == 0 and np.ptp(y3) == 0):
        ax.plot([y2[0]], [y3[0]], "o")
    else:
        seg = np.stack([np.column_stack([y2[:-1], y3[:-1]]), np.column_stack([y2[1:], y3[1:]])], axis=1)
        lc = LineCollection(seg, cmap="viridis", linewidths=1.2)
        lc.set_array(0.5 * (y1[:-1] + y1[1:]))
        ax.add_collection(lc)
        ax.autoscale_view()
        fig.colorbar(lc, ax=ax, label=r"$y^1$")
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel(r"$y^2$")
    ax.set_ylabel(r"$y^3$")


def plot_trajectory(traj: Trajectory, path, style: str | None = None, title: str | None = None) -> Path:
    """Render ``traj`` to an SVG file at ``path``.

    The trajectory is converted to the chart the style needs when the map
    diagram allows it.
    """
    style = style or default_style(traj.chart)
    if style not in STYLES:
        raise ConfigError(f"unknown plot style {style!r}; use one of {', '.join(STYLES)}", field="style")
    traj = convert_trajectory(traj, _STYLE_CHART[style])
    with matplotlib.rc_context(_SVG_RC):
        fig = Figure(figsize=(5, 5))
        ax = fig.add_subplot()
        if style == "alpha":
            _plot_alpha(ax, traj)
        elif style == "disk":
            _plot_disk(ax, traj)
        elif style == "siegel":
            _plot_siegel(ax, traj)
        else:
            _plot_h2(fig, ax, traj)
        if title:
            ax.set_title(title)
        path = Path(path)
        fig.savefig(path, format="svg", metadata={"Date": None})
    return path

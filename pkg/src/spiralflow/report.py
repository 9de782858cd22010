"""Render run figures to files next to the CSV and VTK artifacts."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_growth(diagnostics, path: str) -> None:
    """Growth statistic S(t) next to S(t)/t, which trends to the growth rate."""
    ts = np.asarray(diagnostics.t)
    Ss = np.asarray(diagnostics.S)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax1.plot(ts, Ss, lw=1.2)
    ax1.set_xlabel("t")
    ax1.set_ylabel("S(t) = max u - max u0")
    positive = ts > 0
    ax2.plot(ts[positive], Ss[positive] / ts[positive], lw=1.2)
    ax2.set_xlabel("t")
    ax2.set_ylabel("S(t)/t")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_spirals(grid, curves, path: str, *, title: str = "") -> None:
    """Extracted curves over the domain mask."""
    fig, ax = plt.subplots(figsize=(5, 5))
    xs, ys = grid.node_mesh()
    ax.contourf(xs, ys, (grid.classification > 0).astype(float),
                levels=[0.5, 1.5], colors=["#e8e8f0"])
    for curve in curves:
        pts = curve.points
        ax.plot(pts[:, 0], pts[:, 1], lw=1.4)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_height(grid, z: np.ndarray, path: str) -> None:
    """Reconstructed terrace height as a filled contour map."""
    xs, ys = grid.node_mesh()
    masked = np.ma.masked_where(grid.classification == 0, z)
    fig, ax = plt.subplots(figsize=(5.4, 4.6))
    im = ax.pcolormesh(xs, ys, masked, shading="nearest")
    fig.colorbar(im, ax=ax, label="height")
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)

"""Figures for phase diagrams (written to files, never shown)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import ListedColormap  # noqa: E402

PHASE_CODES = {"normal": 0, "paired": 1, "failed": 2}


def plot_phase_diagram(pd, path, dpi: int = 120):
    g1, g2 = pd.grids
    codes = np.vectorize(PHASE_CODES.get)(pd.labels())
    amp = np.array([abs(c.c[0]) for c in pd.cells]).reshape(pd.shape)
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(10, 4.2), constrained_layout=True)
    cmap = ListedColormap(["#dfe7f2", "#f2b66d", "#9a9a9a"])
    h1 = (g1[1] - g1[0]) / 2 if len(g1) > 1 else 0.5
    h2 = (g2[1] - g2[0]) / 2 if len(g2) > 1 else 0.5
    ext = [g2[0] - h2, g2[-1] + h2, g1[0] - h1, g1[-1] + h1]  # pixel centres on grid points
    ax0.imshow(codes, origin="lower", aspect="auto", extent=ext, cmap=cmap, vmin=0, vmax=2,
               interpolation="nearest")
    for flag, color, label in (("first_order_edge", "#c0392b", "first order"),
                               ("second_order_edge", "#1f6fb2", "second order")):
        pts = [(c.p2, c.p1) for c in pd.cells if getattr(c, flag)]
        if pts:
            xs, ys = zip(*pts)
            ax0.scatter(xs, ys, s=6, c=color, label=label)
    ax0.set_xlabel(pd.names[1])
    ax0.set_ylabel(pd.names[0])
    ax0.set_title("phase (normal / paired)")
    if ax0.get_legend_handles_labels()[0]:
        ax0.legend(loc="best", fontsize=8)
    im = ax1.imshow(amp, origin="lower", aspect="auto", extent=ext, cmap="viridis", interpolation="nearest")
    fig.colorbar(im, ax=ax1, label="|c1|")
    ax1.set_xlabel(pd.names[1])
    ax1.set_ylabel(pd.names[0])
    ax1.set_title("order parameter")
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
    return path

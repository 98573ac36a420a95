"""Figures written next to the CSV reports: phase diagram and profile plots."""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import ListedColormap  # noqa: E402

REGION_ORDER = ["D0", "D1", "D2", "Gamma01", "Gamma02", "Gamma12", "TriplePoint"]
REGION_COLORS = ["#f0f0f0", "#9ecae1", "#fdae6b", "k", "k", "k", "r"]


def _style(ax, xlabel: str, ylabel: str) -> None:
    ax.set_xlabel(xlabel, fontsize=12)
    ax.set_ylabel(ylabel, fontsize=12)
    ax.tick_params(labelsize=10)
    for side in ("top", "right"):
        ax.spines[side].set_visible(False)


def phase_diagram(thetas: Sequence[float], Ls: Sequence[float], regions: Sequence[Sequence[str]],
                  curves: dict[str, tuple[np.ndarray, np.ndarray]], path: str | Path,
                  log_L: bool = False, title: str | None = None) -> Path:
    """Region map on the sweep grid with the boundary curves on top.

    ``regions[i][j]`` is the tag at ``(thetas[i], Ls[j])``.
    """
    code = np.array([[REGION_ORDER.index(t) for t in row] for row in regions]).T
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    ax.pcolormesh(np.asarray(thetas), np.asarray(Ls), code, shading="nearest",
                  cmap=ListedColormap(REGION_COLORS), vmin=-0.5, vmax=len(REGION_ORDER) - 0.5)
    styles = {"L_d": ":", "L01": "-", "L02": "--", "L12": "-."}
    for name, (th, L) in curves.items():
        ok = np.isfinite(L)
        ax.plot(th[ok], L[ok], styles.get(name, "-"), color="k", lw=1.2, label=name)
    if log_L:
        ax.set_yscale("log")
    ax.set_ylim(min(Ls), max(Ls))
    ax.set_xlim(min(thetas), max(thetas))
    _style(ax, r"$\theta$", r"$L$")
    ax.legend(frameon=False, fontsize=9, loc="upper right")
    for tag, xy in _label_positions(thetas, Ls, regions):
        ax.annotate(tag, xy, ha="center", va="center", fontsize=11)
    if title:
        ax.set_title(title, fontsize=12)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def _label_positions(thetas, Ls, regions):
    th = np.asarray(thetas)
    L = np.asarray(Ls)
    for tag in ("D0", "D1", "D2"):
        ii, jj = np.nonzero(np.array(regions) == tag)
        if ii.size > 20:
            yield tag, (float(np.median(th[ii])), float(np.median(L[jj])))


def profile_figure(x: np.ndarray, zeta1: np.ndarray, zeta2: np.ndarray, path: str | Path,
                   title: str | None = None) -> Path:
    fig, (a1, a2) = plt.subplots(2, 1, figsize=(6.4, 4.8), sharex=True)
    a2.plot(x, zeta2, color="C0", lw=1.5)
    a2.axhline(0.0, color="k", lw=0.6)
    _style(a2, "$x$", r"$\zeta_2$")
    a1.plot(x, zeta1, color="C1", lw=1.5)
    _style(a1, "", r"$\zeta_1$")
    if title:
        a1.set_title(title, fontsize=12)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)

"""Figure construction from pre-computed tables.

Three layouts:

* fig1        AvSk vs LQU scatter with the family boundary lines
* fig2-left   the same plane colored by the spread sqrt(variance)
* fig2-right  sqrt(variance) against AvSk - LQU with the boundary slopes

Rendering is deterministic: fixed style, Agg backend, so identical inputs
produce identical image bytes.
"""

from __future__ import annotations

import glob
import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import BoundaryTable, MissingColumn, ScatterTable, read_boundary, read_scatter

FIGURES = ("fig1", "fig2-left", "fig2-right")

BASE_STYLE = {
    "figure.figsize": (5.2, 4.2),
    "figure.dpi": 130,
    "savefig.dpi": 130,
    "font.size": 9.5,
    "axes.labelsize": 11,
    "axes.linewidth": 0.8,
    "legend.fontsize": 8,
    "legend.framealpha": 0.9,
}

# one visual identity per family, shared by all figures
FAMILY_STYLE = {
    "pure-schmidt": dict(color="#c0392b", linestyle="-.", lw=1.6, label="pure states"),
    "cq-line": dict(color="#1e8449", linestyle=(0, (3, 1, 1, 1, 1, 1)), lw=1.6, label="classical-quantum line"),
    "family_product": dict(color="#1e8449", linestyle=(0, (3, 1, 1, 1, 1, 1)), lw=1.6, label="product line"),
    "family_pqc": dict(color="black", linestyle="--", lw=1.4, label="pure-QC line"),
    "family_sep": dict(color="black", linestyle=":", lw=1.6, label="separable line"),
    "isotropic": dict(color="#2471a3", linestyle="-", lw=1.4, label="isotropic (AvSk = LQU)"),
    "werner": dict(color="#7d3c98", linestyle="-", lw=1.2, label="werner (AvSk = LQU)"),
}


@dataclass
class PlotSpec:
    scatter_path: str
    figure: str
    output_path: str
    boundary_paths: tuple = ()
    style_overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.figure not in FIGURES:
            raise ValueError(f"figure must be one of {FIGURES}, got {self.figure!r}")


def discover_boundaries(directory: str) -> tuple:
    return tuple(sorted(glob.glob(os.path.join(directory, "*.csv"))))


def _save(fig, path: str) -> None:
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)


def _scatter_cloud(ax, x, y, **extra):
    ax.scatter(x, y, s=3.0, c=extra.pop("c", "0.55"), alpha=0.5, linewidths=0, rasterized=True, **extra)


def _fig1(scatter: ScatterTable, boundaries: list[BoundaryTable], ax) -> None:
    _scatter_cloud(ax, scatter.lqu, scatter.avsk)
    diag = np.linspace(0.0, 1.0, 2)
    ax.plot(diag, diag, color="#2471a3", lw=1.4, label="AvSk = LQU")
    ax.axvline(0.5, color="black", linestyle="--", lw=1.0, label="LQU = 1/2")
    ax.axhline(2.0 / 3.0, color="black", linestyle=(0, (5, 3)), lw=1.0, label="AvSk = 2/3")
    for table in boundaries:
        style = FAMILY_STYLE.get(table.family)
        if style is None:
            continue
        order = np.argsort(table.lqu)
        ax.plot(table.lqu[order], table.avsk[order], **style)
    ax.set_xlabel("LQU")
    ax.set_ylabel("AvSk")
    ax.set_xlim(-0.02, 1.02)
    ax.set_ylim(-0.02, 1.05)
    ax.legend(loc="lower right")


def _fig2_left(scatter: ScatterTable, boundaries: list[BoundaryTable], ax, fig) -> None:
    if scatter.variance is None:
        raise MissingColumn("fig2-left needs variance values in the scatter table")
    spread = np.sqrt(scatter.variance)
    sc = ax.scatter(scatter.lqu, scatter.avsk, s=3.5, c=spread, cmap="viridis",
                    alpha=0.8, linewidths=0, rasterized=True)
    fig.colorbar(sc, ax=ax, label=r"$\sqrt{\mathrm{variance}}$")
    for table in boundaries:
        style = FAMILY_STYLE.get(table.family)
        if style is None:
            continue
        order = np.argsort(table.lqu)
        ax.plot(table.lqu[order], table.avsk[order], **style)
    ax.set_xlabel("LQU")
    ax.set_ylabel("AvSk")
    ax.legend(loc="lower right")


def _fig2_right(scatter: ScatterTable, boundaries: list[BoundaryTable], ax) -> None:
    if scatter.variance is None:
        raise MissingColumn("fig2-right needs variance values in the scatter table")
    gap = scatter.avsk - scatter.lqu
    _scatter_cloud(ax, gap, np.sqrt(scatter.variance))
    grid = np.linspace(0.0, max(0.7, float(gap.max()) if len(gap) else 0.7), 2)
    ax.plot(grid, grid / np.sqrt(5.0), color="#c0392b", lw=1.3, label=r"slope $1/\sqrt{5}$")
    ax.plot(grid, 2.0 * grid / np.sqrt(5.0), color="#1e8449", lw=1.3, label=r"slope $2/\sqrt{5}$")
    for table in boundaries:
        style = FAMILY_STYLE.get(table.family)
        if style is None:
            continue
        bgap = table.avsk - table.lqu
        order = np.argsort(bgap)
        ax.plot(bgap[order], np.sqrt(table.variance)[order], **style)
    ax.set_xlabel("AvSk $-$ LQU")
    ax.set_ylabel(r"$\sqrt{\mathrm{variance}}$")
    ax.legend(loc="upper left")


def render(spec: PlotSpec) -> str:
    """Render the requested figure and return the output path."""
    scatter = read_scatter(spec.scatter_path, need_variance=spec.figure.startswith("fig2"))
    boundaries = [read_boundary(p) for p in spec.boundary_paths]
    style = dict(BASE_STYLE)
    style.update(spec.style_overrides)
    with plt.rc_context(style):
        fig, ax = plt.subplots()
        if spec.figure == "fig1":
            _fig1(scatter, boundaries, ax)
        elif spec.figure == "fig2-left":
            _fig2_left(scatter, boundaries, ax, fig)
        else:
            _fig2_right(scatter, boundaries, ax)
        _save(fig, spec.output_path)
    return spec.output_path

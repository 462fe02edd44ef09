"""Render sweep results to image files next to the tabular output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import presets

FIGSIZE = (6.4, 4.0)
DPI = 120
# fixed metadata so reruns produce identical files
_SAVE_KW = {"dpi": DPI, "metadata": {"Software": None}}


def _dashed(ax, values, vertical=False):
    for v in values:
        (ax.axvline if vertical else ax.axhline)(v, color="k", ls="--", lw=0.8)


def _grid_image(result, value, xname="grid_dx", yname="grid_dy", case=None):
    xs = np.unique(result.column(xname, case))
    ys = np.unique(result.column(yname, case))
    img = np.asarray(result.column(value, case), dtype=float).reshape(len(xs), len(ys)).T
    return xs, ys, img


def _mesh(ax, xs, ys, img, label, **kw):
    mesh = ax.pcolormesh(xs, ys, img, shading="nearest", **kw)
    plt.colorbar(mesh, ax=ax, label=label)


def plot_height(result, ax, g):
    true = result.column("true_dz")
    ax.plot(true, true, "k-", lw=0.8, label="correct")
    ax.plot(true, result.column("est_dz"), "o", ms=3, label="computed")
    _dashed(ax, [-presets.vertical_half_resolution(g), presets.vertical_half_resolution(g)], vertical=True)
    ax.set_xlabel(r"true $\Delta z$ [m]")
    ax.set_ylabel(r"computed $\Delta z$ [m]")
    ax.legend(loc="upper left")


def plot_xy(result, ax, g):
    xs, ys, img = _grid_image(result, "dz_error")
    _mesh(ax, xs, ys, img, r"$\Delta z$ error [m]", cmap="RdBu_r")
    ax.set_xlabel(r"$\Delta x$ [m]")
    ax.set_ylabel(r"$\Delta y$ [m]")


def plot_range_ambiguity(result, ax, g):
    for case in result.cases():
        ax.plot(result.column("true_dy", case), result.column("dz_error", case), ".-", label=case)
    ax.set_xlabel(r"true $\Delta y$ [m]")
    ax.set_ylabel(r"$\Delta z$ error [m]")
    ax.legend()


def plot_glint(result, axes, g):
    res = presets.horizontal_resolution(g)
    xs, ys, err = _grid_image(result, "dz_error")
    _, _, det = _grid_image(result, "det_score")
    _mesh(axes[0], xs, ys, np.abs(err), r"|$\Delta z$ error| [m]",
          norm=matplotlib.colors.LogNorm(vmin=max(np.nanmin(np.abs(err)), 1e-6)))
    _mesh(axes[1], xs, ys, det, "normalized |det M|",
          norm=matplotlib.colors.LogNorm(vmin=max(np.nanmin(det), 1e-12)))
    for ax in axes:
        _dashed(ax, [-res / 2, res / 2], vertical=True)
        ax.set_xlabel(r"confuser $\Delta x$ [m]")
        ax.set_ylabel(r"confuser $\Delta y$ [m]")


def render(result, path, g=None) -> None:
    """Write a figure for ``result`` to ``path`` (format from the suffix)."""
    g = g or presets.geometry()
    if result.experiment == "glint-map":
        fig, axes = plt.subplots(2, 1, figsize=(FIGSIZE[0], 2 * FIGSIZE[1]))
        plot_glint(result, axes, g)
    else:
        fig, ax = plt.subplots(figsize=FIGSIZE)
        {"sweep-height": plot_height, "sweep-xy": plot_xy,
         "range-ambiguity": plot_range_ambiguity}[result.experiment](result, ax, g)
    fig.suptitle(result.experiment)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)

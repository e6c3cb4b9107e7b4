"""Figure rendering for the study reports: convergence plots next to each CSV."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _style(ax, xlabel="h", ylabel="max error"):
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)


def _order_line(ax, hs, errs, order):
    """Dotted reference line of the given order anchored at the last point."""
    hs = np.asarray(hs, dtype=float)
    ref = errs[-1] * (hs / hs[-1]) ** order
    ax.loglog(hs, ref, "k:", lw=0.8, label=f"order {order:g}")


def convergence_plot(rows_by_label: dict, path, title: str = "",
                     order_hint: float | None = None):
    """Log-log error-vs-h curves, one per labelled sweep."""
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for label, rows in rows_by_label.items():
        hs = [r.h for r in rows]
        es = [r.error_inf for r in rows]
        ax.loglog(hs, es, "o-", ms=3.5, lw=1.0, label=str(label))
    if order_hint is not None and rows_by_label:
        rows = next(iter(rows_by_label.values()))
        _order_line(ax, [r.h for r in rows], [r.error_inf for r in rows], order_hint)
    if title:
        ax.set_title(title, fontsize=10)
    _style(ax)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def error_field_plot(pointwise: np.ndarray, grid, path, title: str = ""):
    """Heat map of |e| on a 2D grid, or a line plot in 1D."""
    fig, ax = plt.subplots(figsize=(4.6, 3.8))
    pts = grid.interior_nodes()
    e = np.abs(np.asarray(pointwise, dtype=float))
    if grid.d == 1:
        ax.semilogy(pts, np.maximum(e, 1e-300), lw=1.0)
        ax.set_xlabel("x")
        ax.set_ylabel("|e|")
        ax.grid(True, alpha=0.3)
    else:
        shape = grid.interior_shape()
        X = pts[:, 0].reshape(shape)
        Y = pts[:, 1].reshape(shape)
        pc = ax.pcolormesh(X, Y, e.reshape(shape), shading="auto", cmap="viridis")
        fig.colorbar(pc, ax=ax)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_aspect("equal")
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def sibling_figure_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".png")

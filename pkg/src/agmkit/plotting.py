"""Figure rendering for curve reports.

The delimited TSV files remain the data interface; these helpers draw the
same curves to PNG files next to them so report directories are browsable.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .curves import Curve

__all__ = ["render_curve", "render_overlay", "AXIS_STYLES"]

# (log_x, log_y, draw y=x diagonal) per property label
AXIS_STYLES: dict[str, tuple[bool, bool, bool]] = {
    "Vol": (True, True, False),
    "MID": (True, False, False),
    "PC": (False, False, True),
    "EP": (False, False, False),
    "OO": (True, False, False),
    "AABB": (True, False, False),
    "AB": (True, False, False),
    "Deg": (True, True, False),
    "CCF": (True, True, False),
    "Hop": (False, False, False),
    "TP": (True, True, False),
    "EigVal": (False, False, False),
    "EigVec": (False, False, False),
    "SizeCCDF": (True, True, False),
    "MemCCDF": (True, True, False),
}


def _style_axes(ax, curve: Curve, log_x: bool, log_y: bool) -> None:
    ax.set_xlabel(curve.x_label)
    ax.set_ylabel(curve.y_label)
    if log_x and len(curve) and curve.xs[0] > 0:
        ax.set_xscale("log")
    if log_y and len(curve) and (curve.ys > 0).all():
        ax.set_yscale("log")
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)


def render_curve(curve: Curve, path, label: str | None = None) -> Path:
    """Draw one curve to `path`; the style is looked up by property label."""
    log_x, log_y, diagonal = AXIS_STYLES.get(label or "", (False, False, False))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(4.5, 3.4))
    ax.plot(curve.xs, curve.ys, "o-", ms=3.5, color="#1f77b4")
    if diagonal and len(curve):
        lo, hi = float(curve.xs.min()), float(curve.xs.max())
        ax.plot([lo, hi], [lo, hi], "--", color="gray", lw=1, label="y = x")
        ax.legend(frameon=False)
    _style_axes(ax, curve, log_x, log_y)
    if label:
        ax.set_title(label)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def render_overlay(curves: dict[str, Curve], path, label: str | None = None) -> Path:
    """Draw several named curves on shared axes (used by comparison reports)."""
    log_x, log_y, diagonal = AXIS_STYLES.get(label or "", (False, False, False))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(4.5, 3.4))
    first = None
    for name, curve in curves.items():
        if curve is None or len(curve) == 0:
            continue
        if first is None:
            first = curve
        ax.plot(curve.xs, curve.ys, "o-", ms=3.5, label=name)
    if first is not None:
        if diagonal:
            lo = min(float(c.xs.min()) for c in curves.values() if c is not None and len(c))
            hi = max(float(c.xs.max()) for c in curves.values() if c is not None and len(c))
            ax.plot([lo, hi], [lo, hi], "--", color="gray", lw=1, label="y = x")
        _style_axes(ax, first, log_x, log_y)
        ax.legend(frameon=False)
    if label:
        ax.set_title(label)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path

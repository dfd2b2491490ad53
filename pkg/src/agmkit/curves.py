"""Sampled metric curves and the binning helpers shared by the metric modules."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["Curve", "LogBins", "LinearBins", "binned_mean"]


@dataclass(frozen=True)
class Curve:
    """A sampled function y(x) with strictly increasing x.

    `kind` is one of "raw", "binned-mean", "ccdf". CCDF curves additionally
    keep y non-increasing within [0, 1].
    """

    xs: np.ndarray
    ys: np.ndarray
    x_label: str = "x"
    y_label: str = "y"
    kind: str = "raw"

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=np.float64)
        ys = np.asarray(self.ys, dtype=np.float64)
        if xs.ndim != 1 or ys.ndim != 1 or xs.size != ys.size:
            raise ValueError("xs and ys must be 1-d arrays of equal length")
        if xs.size:
            if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
                raise ValueError("curve values must be finite")
            if np.any(np.diff(xs) <= 0):
                raise ValueError("x values must be strictly increasing")
        if self.kind not in ("raw", "binned-mean", "ccdf"):
            raise ValueError(f"unknown curve kind {self.kind!r}")
        if self.kind == "ccdf" and xs.size:
            if np.any(np.diff(ys) > 0) or ys.min() < 0 or ys.max() > 1:
                raise ValueError("ccdf curves must be non-increasing within [0, 1]")
        xs.setflags(write=False)
        ys.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    def __len__(self) -> int:
        return self.xs.size

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.xs.tolist(), self.ys.tolist()))


@dataclass(frozen=True)
class LogBins:
    """Logarithmic bins [factor^j, factor^(j+1)) for size/degree axes.

    Bins collecting fewer than `min_count` samples are suppressed.
    """

    factor: float = 2.0
    min_count: int = 5

    def __post_init__(self):
        if self.factor <= 1.0:
            raise ValueError("log-bin factor must exceed 1")
        if self.min_count < 1:
            raise ValueError("min_count must be at least 1")


@dataclass(frozen=True)
class LinearBins:
    """Equal-width bins over [lo, hi) for ratio-valued axes."""

    count: int = 10
    lo: float = 0.0
    hi: float = 1.0
    min_count: int = 1

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("bin count must be at least 1")
        if not self.hi > self.lo:
            raise ValueError("hi must exceed lo")


def _bin_ids(xs: np.ndarray, bins) -> np.ndarray:
    if isinstance(bins, LogBins):
        if np.any(xs <= 0):
            raise ValueError("log bins require positive x values")
        return np.floor(np.log(xs) / np.log(bins.factor)).astype(np.int64)
    width = (bins.hi - bins.lo) / bins.count
    ids = np.floor((xs - bins.lo) / width).astype(np.int64)
    return np.clip(ids, 0, bins.count - 1)


def binned_mean(xs, ys, bins, x_label: str = "x", y_label: str = "y") -> Curve:
    """Average y per bin of x; bin abscissa is the mean x of its samples."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.size == 0:
        return Curve(xs, ys, x_label, y_label, "binned-mean")
    ids = _bin_ids(xs, bins)
    out_x, out_y = [], []
    for b in np.unique(ids):
        mask = ids == b
        if mask.sum() < bins.min_count:
            continue
        out_x.append(xs[mask].mean())
        out_y.append(ys[mask].mean())
    return Curve(np.array(out_x), np.array(out_y), x_label, y_label, "binned-mean")

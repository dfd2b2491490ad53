"""Curve comparison machinery: cumulative-area KS distance, relative
improvement scores, and the full real-vs-synthetic property suite.

The KS distance here is the supremum over x of the absolute difference
between the two curves' cumulative integrals. Both curves are normalized to
unit total area before integrating (documented in every report header), so
the statistic is scale-free and lands in [0, 1]. Curves are treated as
piecewise-linear densities over their observed x-range; outside that range a
curve contributes nothing. Size- and degree-valued axes are compared in
log-space, ratio- and rank-valued axes in linear space.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import community_stats, network_stats
from .curves import Curve, LinearBins, LogBins
from .ingest import Dataset

__all__ = [
    "COMMUNITY_LABELS",
    "NETWORK_LABELS",
    "ALL_LABELS",
    "MetricConfig",
    "ComparisonReport",
    "ks_statistic",
    "relative_improvement",
    "dataset_curves",
    "compare_suite",
]

COMMUNITY_LABELS = ("Vol", "MID", "PC", "EP", "OO", "AABB")
NETWORK_LABELS = ("Deg", "CCF", "Hop", "TP", "EigVal", "EigVec")
ALL_LABELS = COMMUNITY_LABELS + NETWORK_LABELS

# Axes measured in sizes/degrees/counts are compared on a log x-scale.
_LOG_X = frozenset({"Vol", "MID", "OO", "AABB", "Deg", "CCF", "TP"})

NORMALIZATION_NOTE = (
    "curves normalized to unit area over their observed x-range before "
    "cumulative integration; log-x for size/degree axes"
)


def _cdf_on_grid(xs: np.ndarray, ys: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Normalized cumulative integral of the piecewise-linear curve at grid
    points; the density is zero outside [xs[0], xs[-1]]."""
    vals = np.interp(grid, xs, ys)
    inside = (grid[:-1] >= xs[0]) & (grid[1:] <= xs[-1])
    seg = np.where(inside, np.diff(grid) * (vals[:-1] + vals[1:]) / 2.0, 0.0)
    cdf = np.concatenate([[0.0], np.cumsum(seg)])
    total = cdf[-1]
    if total <= 0.0:
        raise ValueError("curve has zero total area")
    return cdf / total


def ks_statistic(f: Curve, g: Curve, *, log_x: bool = False) -> float:
    """Sup-norm distance between the unit-area cumulative integrals of two curves."""
    for curve in (f, g):
        if len(curve) == 0:
            raise ValueError("cannot compare an empty curve")
    fx, fy = f.xs, f.ys
    gx, gy = g.xs, g.ys
    if log_x:
        if fx[0] <= 0 or gx[0] <= 0:
            raise ValueError("log-x comparison requires positive x values")
        fx, gx = np.log(fx), np.log(gx)
    grid = np.union1d(fx, gx)
    if grid.size < 2:
        raise ValueError("curve has zero total area")
    return float(np.max(np.abs(_cdf_on_grid(fx, fy, grid) - _cdf_on_grid(gx, gy, grid))))


def relative_improvement(ks_a: float, ks_b: float) -> float:
    """(ks_b - ks_a) / max(ks_a, ks_b): positive when model A fits better.

    Ranges over [-1, 1]; when both statistics are zero (both models perfect)
    the score is 0.
    """
    if ks_a < 0 or ks_b < 0:
        raise ValueError("KS statistics must be non-negative")
    largest = max(ks_a, ks_b)
    if largest == 0.0:
        return 0.0
    return (ks_b - ks_a) / largest


@dataclass(frozen=True)
class MetricConfig:
    """Knobs shared by the stats and comparison suites."""

    seed: int = 0
    bin_factor: float = 2.0
    min_bin_count: int = 5
    k_max: int = 8
    pair_sample: int = 1000
    connector_bins: int = 10
    hop_exact_threshold: int = 10_000
    hop_sources: int = 256
    eig_k: int = 50
    eig_tol: float = 1e-8
    eig_max_iter: int = 1000

    def log_bins(self) -> LogBins:
        return LogBins(self.bin_factor, self.min_bin_count)


def _positive_x(curve: Curve) -> Curve:
    if len(curve) and curve.xs[0] <= 0:
        keep = curve.xs > 0
        return replace(curve, xs=curve.xs[keep], ys=curve.ys[keep])
    return curve


def dataset_curves(ds: Dataset, labels=ALL_LABELS, config: MetricConfig | None = None) -> dict[str, Curve | None]:
    """Compute the selected property curves; unavailable ones map to None."""
    cfg = config or MetricConfig()
    bins = cfg.log_bins()
    out: dict[str, Curve | None] = {}
    spectral = None
    overlap_triplet = None
    for label in labels:
        if label == "Vol":
            out[label] = community_stats.edges_vs_size(ds, bins)[0]
        elif label == "MID":
            out[label] = community_stats.max_icdf_vs_size(ds, bins)
        elif label == "PC":
            out[label] = community_stats.connector_in_overlap(ds, LinearBins(cfg.connector_bins))
        elif label == "EP":
            out[label] = community_stats.edge_prob_vs_shared(ds, cfg.k_max)
        elif label in ("OO", "AABB"):
            if overlap_triplet is None:
                overlap_triplet = community_stats.overlap_clustering(ds, cfg.pair_sample, bins, cfg.seed)
            out[label] = overlap_triplet[0] if label == "OO" else overlap_triplet[1]
        elif label == "Deg":
            out[label] = network_stats.degree_distribution(ds.graph)
        elif label == "CCF":
            out[label] = network_stats.clustering_distribution(ds.graph)
        elif label == "Hop":
            sources = None if ds.graph.num_nodes <= cfg.hop_exact_threshold else cfg.hop_sources
            out[label] = network_stats.hop_plot(ds.graph, sources, cfg.seed)
        elif label == "TP":
            out[label] = network_stats.triad_participation(ds.graph)
        elif label in ("EigVal", "EigVec"):
            if spectral is None and ds.graph.num_nodes:
                spectral = network_stats.spectral_summary(ds.graph, cfg.eig_k, cfg.eig_tol, cfg.eig_max_iter)
            if spectral is None:
                out[label] = None
                continue
            out[label] = (
                network_stats.eigenvalue_curve(spectral)
                if label == "EigVal"
                else network_stats.eigenvector_curve(spectral)
            )
        else:
            raise ValueError(f"unknown property label {label!r}")
        if out[label] is not None and len(out[label]) == 0:
            out[label] = None
    return out


@dataclass
class ComparisonReport:
    """Per-property KS values between a reference and a synthetic dataset.

    Properties that could not be computed on either side are None and excluded
    from the averages.
    """

    labels: tuple[str, ...]
    ks: dict[str, float | None]
    notes: dict[str, str] = field(default_factory=dict)

    def _avg(self, labels) -> float | None:
        present = [self.ks[l] for l in labels if l in self.ks and self.ks[l] is not None]
        return float(np.mean(present)) if present else None

    @property
    def community_average(self) -> float | None:
        return self._avg(COMMUNITY_LABELS)

    @property
    def network_average(self) -> float | None:
        return self._avg(NETWORK_LABELS)

    def table_text(self, row_name: str = "synthetic") -> str:
        lines = [f"# KS distance, reference vs {row_name}", f"# {NORMALIZATION_NOTE}"]
        for section, labels in (("communities", COMMUNITY_LABELS), ("network", NETWORK_LABELS)):
            cols = [l for l in labels if l in self.labels]
            if not cols:
                continue
            avg = self._avg(cols)
            header = ["property"] + cols + ["Avg"]
            values = [row_name]
            for l in cols:
                v = self.ks.get(l)
                values.append("absent" if v is None else f"{v:.4f}")
            values.append("absent" if avg is None else f"{avg:.4f}")
            widths = [max(len(h), len(v)) for h, v in zip(header, values)]
            lines.append(f"[{section}]")
            lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)))
            lines.append("  ".join(v.ljust(w) for v, w in zip(values, widths)))
        return "\n".join(lines) + "\n"

    def kv_lines(self) -> str:
        lines = [f"# {NORMALIZATION_NOTE}"]
        for label in self.labels:
            v = self.ks.get(label)
            lines.append(f"ks.{label} = {'absent' if v is None else f'{v:.10g}'}")
            if label in self.notes:
                lines.append(f"note.{label} = {self.notes[label]}")
        for name, value in (("community_avg", self.community_average), ("network_avg", self.network_average)):
            lines.append(f"{name} = {'absent' if value is None else f'{value:.10g}'}")
        return "\n".join(lines) + "\n"


def compare_suite(
    real: Dataset,
    synth: Dataset,
    properties=None,
    config: MetricConfig | None = None,
) -> ComparisonReport:
    """Measure the selected properties on both datasets and tabulate KS per
    property; any property uncomputable on a side is marked absent."""
    labels = tuple(properties) if properties else ALL_LABELS
    unknown = [l for l in labels if l not in ALL_LABELS]
    if unknown:
        raise ValueError(f"unknown property label(s): {', '.join(map(str, unknown))}")
    cfg = config or MetricConfig()
    curves_real = dataset_curves(real, labels, cfg)
    curves_synth = dataset_curves(synth, labels, cfg)
    ks: dict[str, float | None] = {}
    notes: dict[str, str] = {}
    for label in labels:
        f, g = curves_real[label], curves_synth[label]
        if f is None or g is None:
            ks[label] = None
            notes[label] = "not computable on " + ("both datasets" if f is None and g is None else ("the reference" if f is None else "the synthetic dataset"))
            continue
        if label in _LOG_X:
            f, g = _positive_x(f), _positive_x(g)
        try:
            ks[label] = ks_statistic(f, g, log_x=label in _LOG_X)
        except ValueError as exc:
            ks[label] = None
            notes[label] = str(exc)
    return ComparisonReport(labels, ks, notes)

"""Global structural properties: degrees, clustering, hop counts, triangles,
and the leading part of the adjacency spectrum."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .curves import Curve
from .graph import Graph

__all__ = [
    "SpectralSummary",
    "degree_distribution",
    "clustering_distribution",
    "triangle_counts",
    "triad_participation",
    "hop_plot",
    "spectral_summary",
    "eigenvalue_curve",
    "eigenvector_curve",
]


def degree_distribution(g: Graph) -> Curve:
    """(degree, node count) for every observed degree."""
    degrees, counts = np.unique(g.degrees(), return_counts=True) if g.num_nodes else (np.empty(0), np.empty(0))
    return Curve(degrees.astype(np.float64), counts.astype(np.float64), "degree", "node count")


def triangle_counts(g: Graph) -> np.ndarray:
    """Number of triangles each node participates in, via sorted-adjacency
    intersection over edges."""
    t = np.zeros(g.num_nodes, dtype=np.int64)
    for u, v in g.edges:
        common = np.intersect1d(g.neighbors(int(u)), g.neighbors(int(v)), assume_unique=True).size
        t[u] += common
        t[v] += common
    return t // 2


def clustering_distribution(g: Graph) -> Curve:
    """Mean local clustering coefficient per degree, for degrees >= 2."""
    degrees = g.degrees()
    tri = triangle_counts(g)
    mask = degrees >= 2
    xs, ys = [], []
    if mask.any():
        d = degrees[mask]
        c = tri[mask] / (d * (d - 1) / 2)
        for deg in np.unique(d):
            sel = d == deg
            xs.append(float(deg))
            ys.append(float(c[sel].mean()))
    return Curve(np.array(xs), np.array(ys), "degree", "mean clustering coefficient")


def triad_participation(g: Graph) -> Curve:
    """(t, number of nodes in exactly t triangles) for t >= 1."""
    tri = triangle_counts(g)
    tri = tri[tri >= 1]
    if tri.size == 0:
        return Curve(np.empty(0), np.empty(0), "triangles", "node count")
    values, counts = np.unique(tri, return_counts=True)
    return Curve(values.astype(np.float64), counts.astype(np.float64), "triangles", "node count")


def _bfs_reach_per_hop(g: Graph, source: int, max_hops: int) -> np.ndarray:
    """Number of nodes at each distance 1..max_hops from `source`."""
    dist = np.full(g.num_nodes, -1, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    reach = np.zeros(max_hops + 1, dtype=np.int64)
    while queue:
        u = queue.popleft()
        du = dist[u]
        for v in g.neighbors(u):
            if dist[v] < 0:
                dist[v] = du + 1
                if dist[v] <= max_hops:
                    reach[dist[v]] += 1
                    queue.append(int(v))
    return reach[1:]


def hop_plot(g: Graph, sources: int | None = None, seed: int = 0) -> Curve:
    """Estimated number of node pairs within x hops, for x = 1..diameter.

    BFS runs from `sources` uniformly sampled nodes (scaled by N/sources);
    passing None or sources >= N computes the exact count.
    """
    n = g.num_nodes
    if n == 0 or g.edge_count == 0:
        return Curve(np.empty(0), np.empty(0), "hops", "reachable pairs")
    if sources is not None and sources < 1:
        raise ValueError("sources must be at least 1")
    exact = sources is None or sources >= n
    if exact:
        picks = np.arange(n)
        scale = 1.0
    else:
        rng = np.random.default_rng(seed)
        picks = np.sort(rng.choice(n, size=sources, replace=False))
        scale = n / sources
    max_hops = n - 1
    totals = np.zeros(max_hops, dtype=np.float64)
    for source in picks:
        totals += _bfs_reach_per_hop(g, int(source), max_hops)
    cum = np.cumsum(totals) * scale / 2.0
    last = int(np.argmax(cum >= cum[-1] - 1e-12)) if cum.size else 0
    xs = np.arange(1, last + 2, dtype=np.float64)
    return Curve(xs, cum[: last + 1], "hops", "reachable pairs")


@dataclass
class SpectralSummary:
    """Top adjacency eigenvalues (descending) and the unit-norm leading
    eigenvector, oriented so its largest-magnitude component is positive."""

    eigenvalues: np.ndarray
    leading_vector: np.ndarray
    converged: bool
    residuals: np.ndarray


def _adjacency(g: Graph) -> scipy.sparse.csr_matrix:
    m = g.edge_count
    if m == 0:
        return scipy.sparse.csr_matrix((g.num_nodes, g.num_nodes))
    rows = np.concatenate([g.edges[:, 0], g.edges[:, 1]])
    cols = np.concatenate([g.edges[:, 1], g.edges[:, 0]])
    data = np.ones(2 * m, dtype=np.float64)
    return scipy.sparse.csr_matrix((data, (rows, cols)), shape=(g.num_nodes, g.num_nodes))


def spectral_summary(g: Graph, k: int = 50, tol: float = 1e-8, max_iter: int = 1000) -> SpectralSummary:
    """Largest k adjacency eigenvalues with the leading eigenvector.

    Small graphs are solved densely; otherwise a Krylov iteration runs with
    the requested tolerance. A residual exceeding tol * |lambda_1| (or hitting
    the iteration cap) flags the partial result as non-converged.
    """
    n = g.num_nodes
    if n == 0:
        raise ValueError("spectral summary requires a non-empty graph")
    if k < 1:
        raise ValueError("k must be at least 1")
    k_eff = min(k, n)
    adj = _adjacency(g)
    converged = True
    if n <= 128 or k_eff >= n - 1:
        vals, vecs = np.linalg.eigh(adj.toarray())
        order = np.argsort(vals)[::-1][:k_eff]
        vals = vals[order]
        vecs = vecs[:, order]
    else:
        try:
            vals, vecs = scipy.sparse.linalg.eigsh(adj, k=k_eff, which="LA", tol=tol, maxiter=max_iter)
        except scipy.sparse.linalg.ArpackNoConvergence as exc:
            vals, vecs = exc.eigenvalues, exc.eigenvectors
            converged = False
        order = np.argsort(vals)[::-1]
        vals = vals[order]
        vecs = vecs[:, order]
    if vals.size == 0:
        return SpectralSummary(vals, np.zeros(n), False, vals)
    residuals = np.array([float(np.linalg.norm(adj @ vecs[:, i] - vals[i] * vecs[:, i])) for i in range(vals.size)])
    lead_scale = max(abs(vals[0]), 1.0)
    if np.any(residuals > tol * lead_scale * 10):
        converged = False
    lead = vecs[:, 0]
    lead = lead / np.linalg.norm(lead)
    if lead[int(np.argmax(np.abs(lead)))] < 0:
        lead = -lead
    return SpectralSummary(vals, lead, converged, residuals)


def eigenvalue_curve(summary: SpectralSummary) -> Curve:
    """Eigenvalues by rank (rank 1 = largest)."""
    xs = np.arange(1, summary.eigenvalues.size + 1, dtype=np.float64)
    return Curve(xs, summary.eigenvalues, "rank", "eigenvalue")


def eigenvector_curve(summary: SpectralSummary) -> Curve:
    """Leading-eigenvector components sorted descending, by rank."""
    comps = np.sort(summary.leading_vector)[::-1]
    xs = np.arange(1, comps.size + 1, dtype=np.float64)
    return Curve(xs, comps, "rank", "leading eigenvector component")

"""Community-level structural measurements.

Every operation reduces to a Curve: internal edges and maximal internal
degree fraction versus community size, edge probability versus the number of
shared memberships, the chance that a community's connector node sits in an
overlap, and the clustering of an overlap node's neighbors split by which
side of the overlap they fall on.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .curves import Curve, LinearBins, LogBins, binned_mean
from .graph import Graph, internal_edge_count
from .ingest import Dataset

__all__ = [
    "OverlapTriple",
    "edges_vs_size",
    "max_icdf_vs_size",
    "edge_prob_vs_shared",
    "connector_in_overlap",
    "connector_overlap_samples",
    "overlap_clustering",
    "overlap_fractions",
    "ccdf",
]


def _community_internal_edges(ds: Dataset) -> np.ndarray:
    net = ds.affiliations
    return np.array(
        [internal_edge_count(ds.graph, net.members(c)) for c in range(net.num_communities)],
        dtype=np.int64,
    )


def edges_vs_size(ds: Dataset, bins: LogBins = LogBins()) -> tuple[Curve, float | None]:
    """Mean internal edge count per community-size bin, plus the log-log slope.

    The slope is fitted by least squares over communities with at least one
    internal edge and is None when fewer than two distinct sizes remain.
    """
    sizes = ds.affiliations.sizes().astype(np.float64)
    edges = _community_internal_edges(ds).astype(np.float64)
    curve = binned_mean(sizes, edges, bins, "community size", "mean internal edges")
    mask = edges >= 1
    slope = None
    if mask.sum() >= 2 and np.unique(sizes[mask]).size >= 2:
        slope = float(np.polyfit(np.log(sizes[mask]), np.log(edges[mask]), 1)[0])
    return curve, slope


def max_icdf_vs_size(ds: Dataset, bins: LogBins = LogBins()) -> Curve:
    """Mean maximal internal-degree fraction per community-size bin."""
    g = ds.graph
    net = ds.affiliations
    sizes, fracs = [], []
    for c in range(net.num_communities):
        members = net.members(c)
        if members.size == 0:
            continue
        best = max(np.intersect1d(g.neighbors(int(u)), members, assume_unique=True).size for u in members)
        sizes.append(members.size)
        fracs.append(best / members.size)
    return binned_mean(np.array(sizes, dtype=np.float64), np.array(fracs), bins,
                       "community size", "mean maximal internal degree fraction")


def edge_prob_vs_shared(ds: Dataset, k_max: int = 8) -> Curve:
    """Fraction of node pairs sharing exactly k communities that are connected.

    Pairs are enumerated by unioning within-community pair sets, so only
    co-member pairs are ever touched; each unordered pair counts once at its
    total shared-community count. Counts k with no pairs are omitted.
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    g = ds.graph
    net = ds.affiliations
    n = g.num_nodes
    keys = []
    for c in range(net.num_communities):
        m = net.members(c)
        if m.size < 2:
            continue
        i, j = np.triu_indices(m.size, k=1)
        keys.append(m[i] * n + m[j])
    if not keys:
        return Curve(np.empty(0), np.empty(0), "shared communities", "edge probability")
    pair_keys, shared_counts = np.unique(np.concatenate(keys), return_counts=True)
    edge_keys = g.edges[:, 0] * n + g.edges[:, 1]
    connected = np.isin(pair_keys, edge_keys, assume_unique=True)
    xs, ys = [], []
    for k in range(1, k_max + 1):
        mask = shared_counts == k
        total = int(mask.sum())
        if total == 0:
            continue
        xs.append(float(k))
        ys.append(float(connected[mask].sum()) / total)
    return Curve(np.array(xs), np.array(ys), "shared communities", "edge probability")


def _overlapping_pairs(ds: Dataset) -> list[tuple[int, int]]:
    """Unordered community-id pairs with a non-empty member overlap."""
    net = ds.affiliations
    pairs: set[tuple[int, int]] = set()
    for u in range(net.num_nodes):
        comms = net.communities_of(u)
        if comms.size >= 2:
            pairs.update(combinations(comms.tolist(), 2))
    return sorted(pairs)


def _connector(g: Graph, members: np.ndarray) -> int:
    """Member with maximal internal degree; ties go to the smallest node id."""
    degrees = np.array(
        [np.intersect1d(g.neighbors(int(u)), members, assume_unique=True).size for u in members]
    )
    return int(members[int(np.argmax(degrees))])


def connector_overlap_samples(ds: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """Per ordered community pair (A, B) with overlap O, O != A: the overlap
    fraction |O|/|A| and whether A's connector lies in O."""
    g = ds.graph
    net = ds.affiliations
    connectors: dict[int, int] = {}
    ratios, hits = [], []
    for a, b in _overlapping_pairs(ds):
        overlap = np.intersect1d(net.members(a), net.members(b), assume_unique=True)
        for first, second in ((a, b), (b, a)):
            members = net.members(first)
            if overlap.size == members.size:
                continue  # nested or identical: the ratio degenerates to 1
            if first not in connectors:
                connectors[first] = _connector(g, members)
            ratios.append(overlap.size / members.size)
            hits.append(float(np.isin(connectors[first], overlap, assume_unique=True)))
    return np.array(ratios, dtype=np.float64), np.array(hits, dtype=np.float64)


def connector_in_overlap(ds: Dataset, bins: LinearBins = LinearBins(10)) -> Curve:
    """Probability that a community's connector sits in its overlap with
    another community, binned by the overlap fraction.

    A random member would land in the overlap with probability equal to the
    overlap fraction itself, so reports pair this curve with the y = x
    diagonal.
    """
    ratios, hits = connector_overlap_samples(ds)
    return binned_mean(ratios, hits, bins, "overlap fraction |O|/|A|", "Pr[connector in overlap]")


@dataclass(frozen=True)
class OverlapTriple:
    """Connected-neighbor-pair fractions for one overlap node, split by class.

    A class with no candidate pairs is reported as None rather than zero.
    """

    oo: float | None
    aabb: float | None
    ab: float | None
    degree: int


def overlap_fractions(g: Graph, members_a, members_b, u: int) -> OverlapTriple:
    """Classify u's neighbors by side of the A/B overlap and measure how often
    pairs within each class are connected."""
    a = np.unique(np.asarray(list(members_a), dtype=np.int64))
    b = np.unique(np.asarray(list(members_b), dtype=np.int64))
    overlap = np.intersect1d(a, b, assume_unique=True)
    if not np.isin(int(u), overlap):
        raise ValueError(f"node {u} is not in the overlap")
    neigh = g.neighbors(int(u))
    o_u = np.intersect1d(neigh, overlap, assume_unique=True)
    a_u = np.intersect1d(neigh, np.setdiff1d(a, overlap, assume_unique=True), assume_unique=True)
    b_u = np.intersect1d(neigh, np.setdiff1d(b, overlap, assume_unique=True), assume_unique=True)

    def pairs(k: int) -> int:
        return k * (k - 1) // 2

    oo = None
    if o_u.size >= 2:
        oo = internal_edge_count(g, o_u) / pairs(o_u.size)
    aabb = None
    denom = pairs(a_u.size) + pairs(b_u.size)
    if denom:
        aabb = (internal_edge_count(g, a_u) + internal_edge_count(g, b_u)) / denom
    ab = None
    if a_u.size and b_u.size:
        cross = sum(np.intersect1d(g.neighbors(int(x)), b_u, assume_unique=True).size for x in a_u)
        ab = cross / (a_u.size * b_u.size)
    return OverlapTriple(oo, aabb, ab, g.degree(int(u)))


def overlap_clustering(
    ds: Dataset,
    pair_sample: int = 1000,
    bins: LogBins = LogBins(),
    seed: int = 0,
) -> tuple[Curve, Curve, Curve]:
    """Mean OO / AABB / AB fractions per degree bin over sampled overlapping
    community pairs; community pairs are subsampled uniformly (seeded) when
    more than `pair_sample` overlap."""
    g = ds.graph
    net = ds.affiliations
    pairs = _overlapping_pairs(ds)
    if len(pairs) > pair_sample:
        rng = np.random.default_rng(seed)
        chosen = rng.choice(len(pairs), size=pair_sample, replace=False)
        pairs = [pairs[i] for i in sorted(chosen)]
    samples: dict[str, list[tuple[float, float]]] = {"oo": [], "aabb": [], "ab": []}
    for a, b in pairs:
        members_a = net.members(a)
        members_b = net.members(b)
        overlap = np.intersect1d(members_a, members_b, assume_unique=True)
        for u in overlap:
            triple = overlap_fractions(g, members_a, members_b, int(u))
            if triple.degree < 1:
                continue
            for name, value in (("oo", triple.oo), ("aabb", triple.aabb), ("ab", triple.ab)):
                if value is not None:
                    samples[name].append((float(triple.degree), value))

    def to_curve(name: str, label: str) -> Curve:
        data = samples[name]
        if not data:
            return Curve(np.empty(0), np.empty(0), "node degree", label, "binned-mean")
        arr = np.array(data)
        return binned_mean(arr[:, 0], arr[:, 1], bins, "node degree", label)

    return (
        to_curve("oo", "mean fraction connected (both neighbors in overlap)"),
        to_curve("aabb", "mean fraction connected (both neighbors in one community)"),
        to_curve("ab", "mean fraction connected (neighbors in different communities)"),
    )


def ccdf(values) -> Curve:
    """Complementary cumulative distribution: fraction of values >= x at each
    distinct value."""
    arr = np.asarray(list(values), dtype=np.float64)
    if arr.size == 0:
        raise ValueError("ccdf requires at least one value")
    xs, counts = np.unique(arr, return_counts=True)
    below = np.concatenate([[0], np.cumsum(counts)[:-1]])
    ys = 1.0 - below / arr.size
    return Curve(xs, ys, "value", "fraction of values >= x", "ccdf")

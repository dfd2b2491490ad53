"""Random-graph generation from community memberships.

Each community connects its member pairs independently with its own
probability; a pair belonging to several communities gets one chance per
community, and duplicate edges collapse. An optional background probability
connects arbitrary node pairs. Sampling enumerates candidate pairs
lexicographically and jumps between successes with geometric gaps, so the
cost per community is proportional to the number of edges drawn, not to the
number of candidate pairs.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .graph import AffiliationNetwork, Graph, shared_communities

__all__ = [
    "AgmParams",
    "edge_probability",
    "assign_probs_power_law",
    "sample_edge_array",
    "generate",
]


@dataclass(frozen=True)
class AgmParams:
    """Per-community edge probabilities plus a background probability."""

    p: np.ndarray
    epsilon: float = 0.0

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64)
        if p.ndim != 1:
            raise ValueError("p must be a 1-d array of probabilities")
        if p.size and (p.min() < 0.0 or p.max() > 1.0):
            raise ValueError("community probabilities must lie in [0, 1]")
        if not 0.0 <= self.epsilon < 1.0:
            raise ValueError("epsilon must lie in [0, 1)")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)


def edge_probability(net: AffiliationNetwork, params: AgmParams, u: int, v: int) -> float:
    """Probability that the model connects u and v: 1 - (1-eps) * prod(1-p_k)
    over their shared communities."""
    if int(u) == int(v):
        raise ValueError("edge probability is undefined for u == v")
    if params.p.size != net.num_communities:
        raise ValueError("params.p length does not match the community count")
    keep = 1.0 - params.epsilon
    for k in shared_communities(net, u, v):
        keep *= 1.0 - params.p[k]
    return 1.0 - keep


def assign_probs_power_law(net: AffiliationNetwork, beta: float, scale: float = 1.0) -> AgmParams:
    """Set each community's probability to scale * size^(-beta), clipped to 1.

    With 0 < beta < 1 the expected internal edge count grows as size^(2-beta),
    i.e. superlinearly.
    """
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must lie strictly between 0 and 1")
    if scale <= 0.0:
        raise ValueError("scale must be positive")
    sizes = net.sizes().astype(np.float64)
    if np.any(sizes < 1):
        raise ValueError("every community must be non-empty")
    p = scale * sizes ** (-beta)
    if np.any(p > 1.0):
        warnings.warn("some probabilities exceeded 1 and were clipped", stacklevel=2)
        p = np.minimum(p, 1.0)
    return AgmParams(p=p, epsilon=0.0)


def _community_rng(seed: int, stream: int) -> np.random.Generator:
    # Counter-based generator keyed by (seed, stream): communities can be
    # sampled in any order, or in parallel, with identical output.
    key = np.array([np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF), np.uint64(stream)])
    return np.random.Generator(np.random.Philox(key=key))


def _bernoulli_indices(rng: np.random.Generator, total: int, p: float) -> np.ndarray:
    """Indices in [0, total) kept with independent probability p."""
    if total <= 0 or p <= 0.0:
        return np.empty(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(total, dtype=np.int64)
    chunks = []
    last = -1
    while True:
        expect = (total - last) * p
        n_draw = int(expect + 10.0 * np.sqrt(expect + 1.0)) + 16
        gaps = rng.geometric(p, size=n_draw)
        pos = last + np.cumsum(gaps)
        if pos[-1] >= total:
            chunks.append(pos[pos < total])
            break
        chunks.append(pos)
        last = int(pos[-1])
    return np.concatenate(chunks) if len(chunks) > 1 else chunks[0]


def _pairs_from_indices(idx: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Map lexicographic pair indices to (i, j) with 0 <= i < j < n."""
    if idx.size == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty
    b = 2 * n - 1
    i = np.floor((b - np.sqrt(b * b - 8.0 * idx.astype(np.float64))) / 2.0).astype(np.int64)
    i = np.clip(i, 0, n - 2)
    # fix any float rounding: base(i) <= idx < base(i+1) must hold
    for _ in range(4):
        base = i * (2 * n - i - 1) // 2
        too_high = base > idx
        too_low = (i + 1) * (2 * n - i - 2) // 2 <= idx
        if not (too_high.any() or too_low.any()):
            break
        i = np.clip(i - too_high.astype(np.int64) + too_low.astype(np.int64), 0, n - 2)
    base = i * (2 * n - i - 1) // 2
    j = idx - base + i + 1
    return i, j


def sample_edge_array(net: AffiliationNetwork, params: AgmParams, seed: int) -> np.ndarray:
    """Draw one edge set; returns a deduplicated (m, 2) array with u < v."""
    if params.p.size != net.num_communities:
        raise ValueError("params.p length does not match the community count")
    parts = []
    for c in range(net.num_communities):
        members = net.members(c)
        n = members.size
        p = float(params.p[c])
        if n < 2 or p <= 0.0:
            continue
        rng = _community_rng(seed, c)
        idx = _bernoulli_indices(rng, n * (n - 1) // 2, p)
        if idx.size:
            i, j = _pairs_from_indices(idx, n)
            parts.append(np.column_stack([members[i], members[j]]))
    if params.epsilon > 0.0 and net.num_nodes >= 2:
        rng = _community_rng(seed, net.num_communities)
        n = net.num_nodes
        idx = _bernoulli_indices(rng, n * (n - 1) // 2, params.epsilon)
        if idx.size:
            i, j = _pairs_from_indices(idx, n)
            parts.append(np.column_stack([i, j]))
    if not parts:
        return np.empty((0, 2), dtype=np.int64)
    edges = np.concatenate(parts)
    return np.unique(edges, axis=0)


def generate(
    net: AffiliationNetwork,
    params: AgmParams,
    seed: int,
    *,
    epsilon_node_guard: int = 100_000,
    allow_large_epsilon: bool = False,
) -> Graph:
    """Sample a simple undirected graph; deterministic for a fixed seed.

    A positive background probability costs about epsilon * N^2 / 2 expected
    edges, so it is refused above `epsilon_node_guard` nodes unless
    `allow_large_epsilon` is set.
    """
    if params.epsilon > 0.0 and net.num_nodes > epsilon_node_guard and not allow_large_epsilon:
        raise ValueError(
            f"background sampling over {net.num_nodes} nodes exceeds the guard "
            f"({epsilon_node_guard}); pass allow_large_epsilon=True to proceed"
        )
    return Graph(net.num_nodes, sample_edge_array(net, params, seed))

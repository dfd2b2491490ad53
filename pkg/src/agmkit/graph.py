"""In-memory graph and node-community membership containers.

Nodes are dense non-negative integer ids. Both structures are immutable after
construction, so they can be read concurrently without locking.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Graph",
    "AffiliationNetwork",
    "CommunityView",
    "shared_communities",
    "internal_degree",
    "internal_edge_count",
    "split_into_components",
    "community_view",
]

_EMPTY = np.empty(0, dtype=np.int64)
_EMPTY.setflags(write=False)


def _as_edge_array(edges) -> np.ndarray:
    arr = np.asarray(edges, dtype=np.int64) if not isinstance(edges, np.ndarray) else edges.astype(np.int64, copy=False)
    if arr.size == 0:
        return arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("edges must be an iterable of (u, v) pairs")
    return arr


class Graph:
    """Undirected simple graph with sorted per-node neighbor arrays.

    Duplicate input edges are collapsed; self-loops are rejected. Neighbor
    lists are kept sorted so edge lookups are binary searches and triangle
    counting can intersect adjacency arrays directly.
    """

    __slots__ = ("num_nodes", "_adj", "_edges")

    def __init__(self, num_nodes: int, edges: Iterable = ()):
        num_nodes = int(num_nodes)
        if num_nodes < 0:
            raise ValueError("num_nodes must be non-negative")
        arr = _as_edge_array(edges)
        if arr.size:
            if arr.min() < 0 or arr.max() >= num_nodes:
                raise ValueError("edge endpoint outside [0, num_nodes)")
            if np.any(arr[:, 0] == arr[:, 1]):
                raise ValueError("self-loops are not allowed")
            lo = np.minimum(arr[:, 0], arr[:, 1])
            hi = np.maximum(arr[:, 0], arr[:, 1])
            arr = np.unique(np.column_stack([lo, hi]), axis=0)
        else:
            arr = arr.reshape(0, 2)
        arr.setflags(write=False)
        self.num_nodes = num_nodes
        self._edges = arr
        if arr.size:
            src = np.concatenate([arr[:, 0], arr[:, 1]])
            dst = np.concatenate([arr[:, 1], arr[:, 0]])
            order = np.lexsort((dst, src))
            src = src[order]
            dst = dst[order]
            starts = np.searchsorted(src, np.arange(num_nodes + 1))
            adj = []
            for u in range(num_nodes):
                block = dst[starts[u]:starts[u + 1]]
                block.setflags(write=False)
                adj.append(block)
            self._adj = adj
        else:
            self._adj = [_EMPTY] * num_nodes

    def _check_node(self, u: int) -> int:
        u = int(u)
        if not 0 <= u < self.num_nodes:
            raise ValueError(f"unknown node id {u}")
        return u

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    @property
    def edges(self) -> np.ndarray:
        """Edge array of shape (m, 2) with u < v, sorted lexicographically."""
        return self._edges

    def neighbors(self, u: int) -> np.ndarray:
        return self._adj[self._check_node(u)]

    def degree(self, u: int) -> int:
        return len(self._adj[self._check_node(u)])

    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self._adj], dtype=np.int64)

    def has_edge(self, u: int, v: int) -> bool:
        row = self._adj[self._check_node(u)]
        v = self._check_node(v)
        i = np.searchsorted(row, v)
        return i < len(row) and row[i] == v

    def __repr__(self) -> str:
        return f"Graph(num_nodes={self.num_nodes}, edges={self.edge_count})"


class AffiliationNetwork:
    """Bipartite membership structure between graph nodes and communities.

    Community member lists and per-node membership lists are mutual inverses
    and both kept sorted.
    """

    __slots__ = ("num_nodes", "_members", "_memberships")

    def __init__(self, num_nodes: int, communities: Sequence[Iterable[int]]):
        num_nodes = int(num_nodes)
        if num_nodes < 0:
            raise ValueError("num_nodes must be non-negative")
        members: list[np.ndarray] = []
        for cid, ms in enumerate(communities):
            m = np.unique(np.asarray(list(ms), dtype=np.int64))
            if m.size and (m[0] < 0 or m[-1] >= num_nodes):
                raise ValueError(f"community {cid} has a member outside [0, num_nodes)")
            m.setflags(write=False)
            members.append(m)
        self.num_nodes = num_nodes
        self._members = members
        if members and any(m.size for m in members):
            node_ids = np.concatenate(members)
            comm_ids = np.repeat(
                np.arange(len(members), dtype=np.int64),
                [m.size for m in members],
            )
            order = np.lexsort((comm_ids, node_ids))
            node_ids = node_ids[order]
            comm_ids = comm_ids[order]
            starts = np.searchsorted(node_ids, np.arange(num_nodes + 1))
            memberships = []
            for u in range(num_nodes):
                block = comm_ids[starts[u]:starts[u + 1]]
                block.setflags(write=False)
                memberships.append(block)
            self._memberships = memberships
        else:
            self._memberships = [_EMPTY] * num_nodes

    def _check_node(self, u: int) -> int:
        u = int(u)
        if not 0 <= u < self.num_nodes:
            raise ValueError(f"unknown node id {u}")
        return u

    def _check_community(self, c: int) -> int:
        c = int(c)
        if not 0 <= c < len(self._members):
            raise ValueError(f"unknown community id {c}")
        return c

    @property
    def num_communities(self) -> int:
        return len(self._members)

    def members(self, c: int) -> np.ndarray:
        return self._members[self._check_community(c)]

    def communities_of(self, u: int) -> np.ndarray:
        return self._memberships[self._check_node(u)]

    def size(self, c: int) -> int:
        return len(self._members[self._check_community(c)])

    def sizes(self) -> np.ndarray:
        return np.array([m.size for m in self._members], dtype=np.int64)

    def membership_counts(self) -> np.ndarray:
        return np.array([m.size for m in self._memberships], dtype=np.int64)

    def __repr__(self) -> str:
        return f"AffiliationNetwork(num_nodes={self.num_nodes}, communities={self.num_communities})"


@dataclass(frozen=True)
class CommunityView:
    """A single community together with its induced edge count."""

    community_id: int
    members: np.ndarray
    internal_edges: int

    @property
    def size(self) -> int:
        return len(self.members)


def shared_communities(net: AffiliationNetwork, u: int, v: int) -> list[int]:
    """Sorted ids of the communities both u and v belong to."""
    a = net.communities_of(u)
    b = net.communities_of(v)
    return np.intersect1d(a, b, assume_unique=True).tolist()


def internal_degree(g: Graph, u: int, members) -> int:
    """Number of nodes in `members` adjacent to u; u must itself be a member."""
    m = np.unique(np.asarray(list(members), dtype=np.int64))
    u = g._check_node(u)
    i = np.searchsorted(m, u)
    if i >= len(m) or m[i] != u:
        raise ValueError(f"node {u} is not a member of the given community")
    return int(np.intersect1d(g.neighbors(u), m, assume_unique=True).size)


def internal_edge_count(g: Graph, members) -> int:
    """Number of graph edges with both endpoints in `members`."""
    m = np.unique(np.asarray(list(members), dtype=np.int64))
    total = 0
    for u in m:
        total += np.intersect1d(g.neighbors(int(u)), m, assume_unique=True).size
    return int(total // 2)


def split_into_components(g: Graph, members) -> list[list[int]]:
    """Partition `members` into connected components of the induced subgraph.

    Components are listed in order of their smallest member id and each
    component is sorted ascending. An empty member set yields an empty list.
    """
    mset = {int(u) for u in members}
    for u in mset:
        g._check_node(u)
    seen: set[int] = set()
    components: list[list[int]] = []
    for u in sorted(mset):
        if u in seen:
            continue
        comp = [u]
        seen.add(u)
        frontier = [u]
        while frontier:
            w = frontier.pop()
            for nb in g.neighbors(w):
                nb = int(nb)
                if nb in mset and nb not in seen:
                    seen.add(nb)
                    comp.append(nb)
                    frontier.append(nb)
        components.append(sorted(comp))
    return components


def community_view(g: Graph, net: AffiliationNetwork, c: int) -> CommunityView:
    members = net.members(c)
    return CommunityView(int(c), members, internal_edge_count(g, members))

"""Parsing, preprocessing, and file output for graphs, communities, and curves.

File formats
------------
Edge list: ASCII, one edge per line, two integer labels separated by runs of
spaces/tabs, '#' starts a comment line.

Community file: ASCII, '#' comments, and either one community per line
(whitespace-separated member labels) or "node<TAB>community" pairs; the pair
format is auto-detected when every data line has exactly two columns.

Curve TSV: "x<TAB>y" rows sorted by x ascending, '#' header lines.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .curves import Curve
from .errors import ParseError
from .graph import AffiliationNetwork, Graph, split_into_components

__all__ = [
    "Dataset",
    "DatasetSummary",
    "parse_edge_list",
    "parse_community_file",
    "parse_node_community_pairs",
    "detect_community_format",
    "read_edge_file",
    "read_community_file",
    "preprocess",
    "summarize",
    "load_dataset",
    "read_dataset",
    "write_dataset",
    "write_curve",
    "read_curve",
    "format_summary",
]


@dataclass
class Dataset:
    """A graph plus its community memberships, with the original labels kept."""

    graph: Graph
    affiliations: AffiliationNetwork
    id_map: np.ndarray | None = None  # dense id -> original label


@dataclass(frozen=True)
class DatasetSummary:
    """Headline counts: nodes, edges, communities, mean community size,
    and mean community memberships per node."""

    nodes: int
    edges: int
    communities: int
    mean_size: float
    mean_memberships: float


def _int_token(tok: str, line_no: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer label, got {tok!r}", line_no) from None


def _data_lines(stream: Iterable[str]):
    for line_no, line in enumerate(stream, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield line_no, stripped.split()


def parse_edge_list(stream: Iterable[str]) -> list[tuple[int, int]]:
    """Parse "<src> <dst>" lines into label pairs.

    Duplicates and self-loops are preserved here; `preprocess` removes them.
    """
    edges = []
    for line_no, fields in _data_lines(stream):
        if len(fields) != 2:
            raise ParseError(f"expected 2 fields, got {len(fields)}", line_no)
        edges.append((_int_token(fields[0], line_no), _int_token(fields[1], line_no)))
    return edges


def parse_community_file(stream: Iterable[str]) -> list[set[int]]:
    """Parse one community per line; duplicate labels within a line collapse."""
    communities = []
    for line_no, fields in _data_lines(stream):
        communities.append({_int_token(tok, line_no) for tok in fields})
    return communities


def parse_node_community_pairs(stream: Iterable[str]) -> list[set[int]]:
    """Parse "node community" pair lines into member sets ordered by community label."""
    groups: dict[int, set[int]] = {}
    for line_no, fields in _data_lines(stream):
        if len(fields) != 2:
            raise ParseError(f"expected 2 fields, got {len(fields)}", line_no)
        node = _int_token(fields[0], line_no)
        comm = _int_token(fields[1], line_no)
        groups.setdefault(comm, set()).add(node)
    return [groups[c] for c in sorted(groups)]


def detect_community_format(lines: list[str]) -> str:
    """Return "pairs" when every data line has exactly two columns, else "lines"."""
    saw_data = False
    for _, fields in _data_lines(lines):
        saw_data = True
        if len(fields) != 2:
            return "lines"
    return "pairs" if saw_data else "lines"


def read_edge_file(path) -> list[tuple[int, int]]:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_edge_list(fh)
    except ParseError as exc:
        raise ParseError(str(exc), exc.line_no, str(path)) from None


def read_community_file(path, fmt: str = "auto") -> list[set[int]]:
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    if fmt == "auto":
        fmt = detect_community_format(lines)
    try:
        if fmt == "pairs":
            return parse_node_community_pairs(lines)
        if fmt == "lines":
            return parse_community_file(lines)
    except ParseError as exc:
        raise ParseError(str(exc), exc.line_no, str(path)) from None
    raise ValueError(f"unknown community file format {fmt!r}")


def preprocess(edges: Iterable[tuple[int, int]], communities: Iterable[Iterable[int]]) -> Dataset:
    """Build a canonical Dataset from raw label pairs and member sets.

    Self-loops and duplicate edges are dropped, labels are remapped to dense
    ids (sorted label order), community members absent from the graph are
    dropped, each community is split into its connected components, and
    single-node components are discarded. Identical member sets coming from
    different input lines are kept as distinct communities.
    """
    edge_arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
    edge_arr = edge_arr[edge_arr[:, 0] != edge_arr[:, 1]]
    labels = np.unique(edge_arr)
    graph = Graph(labels.size, np.searchsorted(labels, edge_arr) if edge_arr.size else ())

    comps: list[list[int]] = []
    for members in communities:
        m = np.unique(np.asarray(list(members), dtype=np.int64))
        pos = np.searchsorted(labels, m)
        present = (pos < labels.size) & (labels[np.minimum(pos, labels.size - 1)] == m) if labels.size else np.zeros(m.size, bool)
        ids = pos[present]
        if ids.size == 0:
            continue
        for comp in split_into_components(graph, ids):
            if len(comp) >= 2:
                comps.append(comp)
    net = AffiliationNetwork(graph.num_nodes, comps)
    return Dataset(graph, net, id_map=labels)


def summarize(ds: Dataset) -> DatasetSummary:
    sizes = ds.affiliations.sizes()
    n = ds.graph.num_nodes
    c = ds.affiliations.num_communities
    total = int(sizes.sum()) if c else 0
    return DatasetSummary(
        nodes=n,
        edges=ds.graph.edge_count,
        communities=c,
        mean_size=total / c if c else 0.0,
        mean_memberships=total / n if n else 0.0,
    )


def load_dataset(edge_path, community_path, community_format: str = "auto") -> Dataset:
    """Read and preprocess an edge-list file plus a community file."""
    return preprocess(read_edge_file(edge_path), read_community_file(community_path, community_format))


_EDGES_FILE = "edges.tsv"
_COMMUNITIES_FILE = "communities.tsv"
_IDMAP_FILE = "idmap.tsv"
_SUMMARY_FILE = "summary.txt"


def format_summary(summary: DatasetSummary) -> str:
    lines = [
        f"N = {summary.nodes}",
        f"E = {summary.edges}",
        f"C = {summary.communities}",
        f"S = {summary.mean_size:.6g}",
        f"A = {summary.mean_memberships:.6g}",
        "# duplicate member sets from distinct source groups are retained as distinct communities",
    ]
    return "\n".join(lines) + "\n"


def write_dataset(ds: Dataset, out_dir) -> Path:
    """Write the canonical dataset files (edges, communities, id map, summary)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / _EDGES_FILE, "w", encoding="utf-8") as fh:
        fh.write("# source\ttarget\n")
        for u, v in ds.graph.edges:
            fh.write(f"{u}\t{v}\n")
    with open(out_dir / _COMMUNITIES_FILE, "w", encoding="utf-8") as fh:
        fh.write("# one community per line\n")
        for c in range(ds.affiliations.num_communities):
            fh.write("\t".join(str(u) for u in ds.affiliations.members(c)) + "\n")
    with open(out_dir / _IDMAP_FILE, "w", encoding="utf-8") as fh:
        fh.write("# dense_id\toriginal_label\n")
        id_map = ds.id_map if ds.id_map is not None else np.arange(ds.graph.num_nodes)
        for dense, label in enumerate(id_map):
            fh.write(f"{dense}\t{label}\n")
    with open(out_dir / _SUMMARY_FILE, "w", encoding="utf-8") as fh:
        fh.write(format_summary(summarize(ds)))
    return out_dir


def read_dataset(path) -> Dataset:
    """Load a dataset directory produced by `write_dataset`."""
    path = Path(path)
    ds = preprocess(
        read_edge_file(path / _EDGES_FILE),
        read_community_file(path / _COMMUNITIES_FILE, fmt="lines"),
    )
    idmap_path = path / _IDMAP_FILE
    if idmap_path.exists():
        pairs = read_edge_file(idmap_path)
        mapping = dict(pairs)
        if ds.id_map is not None:
            ds.id_map = np.array([mapping.get(int(i), int(i)) for i in ds.id_map], dtype=np.int64)
    return ds


def write_curve(curve: Curve, path, header_notes: Iterable[str] = ()) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# x: {curve.x_label}\n")
        fh.write(f"# y: {curve.y_label}\n")
        fh.write(f"# kind: {curve.kind}\n")
        for note in header_notes:
            fh.write(f"# {note}\n")
        for x, y in zip(curve.xs, curve.ys):
            fh.write(f"{x:.12g}\t{y:.12g}\n")
    return path


def read_curve(path) -> Curve:
    path = Path(path)
    x_label, y_label, kind = "x", "y", "raw"
    xs, ys = [], []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith("#"):
                body = stripped.lstrip("#").strip()
                if body.startswith("x:"):
                    x_label = body[2:].strip()
                elif body.startswith("y:"):
                    y_label = body[2:].strip()
                elif body.startswith("kind:"):
                    kind = body[5:].strip()
                continue
            fields = stripped.split()
            if len(fields) != 2:
                raise ParseError(f"expected 2 fields, got {len(fields)}", line_no, str(path))
            try:
                xs.append(float(fields[0]))
                ys.append(float(fields[1]))
            except ValueError:
                raise ParseError("expected numeric fields", line_no, str(path)) from None
    return Curve(np.array(xs), np.array(ys), x_label, y_label, kind)

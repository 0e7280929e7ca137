"""Attributed graph data model."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

ATTRIBUTE_MODES = ("raw_attributes", "one_hot_labels", "degree_scalar")


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class AttributedGraph:
    """Undirected graph with one real attribute row per node.

    ``edges`` is an (E, 2) integer array of 0-based node pairs. Construction
    does not validate; use :func:`validate_graph` or :func:`make_graph`.
    """

    graph_id: int
    num_nodes: int
    edges: np.ndarray
    attributes: np.ndarray
    node_labels: Optional[np.ndarray] = None
    anomaly_label: Optional[bool] = None
    class_label: Optional[int] = None
    # generator ground truth, unused by detection
    motif_nodes: Optional[tuple] = None
    base_kind: Optional[str] = None

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        object.__setattr__(self, "edges", _frozen(edges, np.int64))
        attrs = np.asarray(self.attributes, dtype=np.float64)
        if attrs.ndim == 1:
            attrs = attrs.reshape(-1, 1)
        object.__setattr__(self, "attributes", _frozen(attrs, np.float64))
        if self.node_labels is not None:
            object.__setattr__(self, "node_labels", _frozen(self.node_labels, np.int64))

    @property
    def attr_dim(self) -> int:
        return self.attributes.shape[1]

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.num_nodes, dtype=np.int64)
        np.add.at(deg, self.edges[:, 0], 1)
        np.add.at(deg, self.edges[:, 1], 1)
        return deg

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.num_nodes)]
        for u, v in self.edges:
            adj[u].append(int(v))
            adj[v].append(int(u))
        return adj

    def with_(self, **changes) -> "AttributedGraph":
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class GraphDataset:
    name: str
    graphs: tuple
    attr_dim: int
    attribute_mode: str = "raw_attributes"

    def __post_init__(self):
        object.__setattr__(self, "graphs", tuple(self.graphs))

    def __len__(self):
        return len(self.graphs)

    def __iter__(self):
        return iter(self.graphs)

    def __getitem__(self, i):
        return self.graphs[i]

    @property
    def anomaly_labels(self) -> np.ndarray:
        return np.array([bool(g.anomaly_label) for g in self.graphs])

    def pooled_attributes(self) -> np.ndarray:
        return np.vstack([g.attributes for g in self.graphs])


def canonical_edges(edges, warn: bool = True) -> np.ndarray:
    """Sort each pair to (min, max) and drop duplicates, keeping first-seen order."""
    seen = set()
    out = []
    dupes = 0
    for u, v in np.asarray(edges, dtype=np.int64).reshape(-1, 2):
        key = (int(min(u, v)), int(max(u, v)))
        if key in seen:
            dupes += 1
            continue
        seen.add(key)
        out.append(key)
    if dupes and warn:
        warnings.warn(f"dropped {dupes} duplicate edge(s)", stacklevel=2)
    return np.array(out, dtype=np.int64).reshape(-1, 2)


def make_graph(graph_id, num_nodes, edges, attributes, **kw) -> AttributedGraph:
    """Build a graph with deduplicated undirected edges."""
    return AttributedGraph(graph_id, num_nodes, canonical_edges(edges), attributes, **kw)


def validate_graph(g: AttributedGraph, attr_dim: Optional[int] = None) -> Optional[str]:
    """Return the first violated invariant as a message, or None when valid."""
    if g.num_nodes < 0:
        return "negative node count"
    seen = set()
    for u, v in g.edges:
        u, v = int(u), int(v)
        if u < 0 or v < 0 or u >= g.num_nodes or v >= g.num_nodes:
            return f"endpoint out of range: ({u}, {v})"
        if u == v:
            return f"self-loop at node {u}"
        key = (min(u, v), max(u, v))
        if key in seen:
            return f"duplicate edge {key}"
        seen.add(key)
    if g.attributes.shape[0] != g.num_nodes:
        return f"attributes have {g.attributes.shape[0]} rows for {g.num_nodes} nodes"
    if attr_dim is not None and g.attributes.shape[1] != attr_dim:
        return f"attribute dimension {g.attributes.shape[1]} != {attr_dim}"
    if g.node_labels is not None and len(g.node_labels) != g.num_nodes:
        return "node_labels length mismatch"
    return None


def validate_dataset(ds: GraphDataset) -> Optional[str]:
    for i, g in enumerate(ds.graphs):
        if g.graph_id != i:
            return f"graph ids not contiguous at position {i} (id {g.graph_id})"
        msg = validate_graph(g, ds.attr_dim)
        if msg:
            return f"graph {g.graph_id}: {msg}"
    return None


def derive_attributes(g: AttributedGraph, mode: str, label_alphabet_size: int = 0) -> AttributedGraph:
    if mode == "raw_attributes":
        return g
    if mode == "one_hot_labels":
        if g.node_labels is None:
            raise ValueError("one_hot_labels requires node_labels")
        size = max(label_alphabet_size, int(g.node_labels.max(initial=-1)) + 1)
        attrs = np.zeros((g.num_nodes, size))
        attrs[np.arange(g.num_nodes), g.node_labels] = 1.0
        return g.with_(attributes=attrs)
    if mode == "degree_scalar":
        return g.with_(attributes=g.degrees().astype(np.float64).reshape(-1, 1))
    raise ValueError(f"unknown attribute mode {mode!r}")


def derive_dataset(ds: GraphDataset, mode: str) -> GraphDataset:
    """Apply :func:`derive_attributes` to every graph with a shared label alphabet."""
    alphabet = 0
    if mode == "one_hot_labels":
        alphabet = 1 + max(int(g.node_labels.max(initial=-1)) for g in ds.graphs
                           if g.node_labels is not None)
    graphs = [derive_attributes(g, mode, alphabet) for g in ds.graphs]
    dim = graphs[0].attr_dim if graphs else 0
    return GraphDataset(ds.name, graphs, dim, mode)

"""WL propagation of IK node vectors and graph mean embeddings."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .graph import AttributedGraph, GraphDataset
from .ik import IkModel, assignments_to_dense, ik_assign

MODES = ("final", "concat")


@dataclass(frozen=True, eq=False)
class NodeEmbeddings:
    """Per-iteration node rows. ``assign`` is the sparse iteration-0 form."""

    graph_id: int
    assign: np.ndarray  # (n, t) cell indices, -1 = uncovered
    per_iteration: tuple  # h+1 dense (n, t*psi) arrays
    t: int

    @property
    def h(self) -> int:
        return len(self.per_iteration) - 1

    @property
    def num_nodes(self) -> int:
        return self.assign.shape[0]

    def rows(self, mode: str) -> np.ndarray:
        """Node rows matching a graph embedding of the given mode."""
        if mode == "final":
            return self.per_iteration[-1]
        if mode == "concat":
            return np.hstack(self.per_iteration)
        raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True, eq=False)
class GraphEmbedding:
    graph_id: int
    vector: np.ndarray
    mode: str
    t: int
    h: int

    @property
    def scale(self) -> float:
        """Normalizer applied to dot products so similarities lie in [0, 1]."""
        return 1.0 / (self.t * (self.h + 1)) if self.mode == "concat" else 1.0 / self.t


def _neighbor_mean_operator(g: AttributedGraph) -> tuple[sp.csr_matrix, np.ndarray]:
    n = g.num_nodes
    e = g.edges
    rows = np.concatenate([e[:, 0], e[:, 1]])
    cols = np.concatenate([e[:, 1], e[:, 0]])
    A = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    deg = np.asarray(A.sum(axis=1)).ravel()
    inv = np.divide(1.0, deg, out=np.zeros(n), where=deg > 0)
    return sp.diags(inv) @ A, deg == 0


def wl_propagate(g: AttributedGraph, model: IkModel, h: int) -> NodeEmbeddings:
    if h < 0:
        raise ValueError("h must be >= 0")
    assign = ik_assign(model, g.attributes) if g.num_nodes else np.empty((0, model.t), np.int64)
    cur = assignments_to_dense(assign, model.psi)
    layers = [cur]
    if h:
        P, isolated = _neighbor_mean_operator(g)
        for _ in range(h):
            nxt = 0.5 * (cur + P @ cur)
            # nodes without neighbours carry their vector forward unchanged
            nxt[isolated] = cur[isolated]
            cur = nxt
            layers.append(cur)
    for a in layers:
        a.setflags(write=False)
    return NodeEmbeddings(g.graph_id, assign, tuple(layers), model.t)


def graph_embedding(ne: NodeEmbeddings, mode: str = "final") -> GraphEmbedding:
    if ne.num_nodes == 0:
        raise ValueError(f"graph {ne.graph_id} has no nodes")
    if mode == "final":
        vec = ne.per_iteration[-1].mean(axis=0)
    elif mode == "concat":
        vec = np.concatenate([layer.mean(axis=0) for layer in ne.per_iteration])
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return GraphEmbedding(ne.graph_id, vec, mode, ne.t, ne.h)


def check_compatible(a: GraphEmbedding, b: GraphEmbedding) -> None:
    if a.mode != b.mode or a.vector.shape != b.vector.shape or a.t != b.t or a.h != b.h:
        raise ValueError(
            f"incompatible embeddings: {a.mode}/{a.vector.shape} vs {b.mode}/{b.vector.shape}")


def graph_similarity(a: GraphEmbedding, b: GraphEmbedding) -> float:
    check_compatible(a, b)
    return float(a.vector @ b.vector) * a.scale


@dataclass(frozen=True, eq=False)
class EmbeddedDataset:
    """Graph embeddings for a dataset under one fitted model.

    Node embeddings are not retained (they are dense and large); they are
    recomputed per graph by :meth:`node_embeddings`.
    """

    model: IkModel
    source: tuple  # AttributedGraph per embedding
    graphs: tuple  # GraphEmbedding per graph
    h: int
    mode: str

    def matrix(self) -> np.ndarray:
        return np.vstack([g.vector for g in self.graphs])

    def position(self, graph_id: int) -> int:
        for i, g in enumerate(self.graphs):
            if g.graph_id == graph_id:
                return i
        raise KeyError(f"no graph with id {graph_id}")

    def embedding(self, graph_id: int) -> GraphEmbedding:
        return self.graphs[self.position(graph_id)]

    def node_embeddings(self, graph_id: int) -> NodeEmbeddings:
        return wl_propagate(self.source[self.position(graph_id)], self.model, self.h)


def embed_dataset(ds: GraphDataset | Sequence[AttributedGraph], model: IkModel,
                  h: int = 2, mode: str = "final") -> EmbeddedDataset:
    graphs = tuple(ds.graphs if isinstance(ds, GraphDataset) else ds)
    embs = tuple(graph_embedding(wl_propagate(g, model, h), mode) for g in graphs)
    return EmbeddedDataset(model, graphs, embs, h, mode)

"""Prototype discovery and anomaly scoring with a point-set kernel.

Similarities here are *normality* scores: high means close to a discovered
normal cluster. Consumers that rank anomalies first must negate them.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .embed import EmbeddedDataset, GraphEmbedding, check_compatible


class ZeroClusterError(RuntimeError):
    """Raised when not a single cluster could be grown."""

    def __init__(self, gamma: float, tau: float):
        self.gamma = gamma
        self.tau = tau
        super().__init__(
            f"no cluster discovered: first candidate gamma={gamma:.6g} <= tau={tau:.6g}; "
            f"try a lower tau (or a lower --tau-quantile)")


@dataclass(frozen=True, eq=False)
class Cluster:
    index: int  # 1-based creation order
    prototype_id: int
    member_ids: tuple  # sorted graph ids
    mean_vector: np.ndarray
    scale: float
    passes: int = 0  # growth passes run while building the cluster

    def __len__(self):
        return len(self.member_ids)

    def to_json(self) -> dict:
        return {"index": self.index, "prototype_id": self.prototype_id,
                "member_ids": list(self.member_ids)}


@dataclass(frozen=True, eq=False)
class DetectionResult:
    graph_ids: tuple
    scores: np.ndarray  # normality, aligned with graph_ids
    nearest_cluster: tuple  # 1-based cluster index per graph
    clusters: tuple
    params: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return len(self.clusters)

    @property
    def prototypes(self) -> list[int]:
        return [c.prototype_id for c in self.clusters]

    def anomaly_scores(self) -> np.ndarray:
        return -self.scores

    def score_of(self, graph_id: int) -> float:
        return float(self.scores[self.graph_ids.index(graph_id)])

    def to_json(self) -> dict:
        return {
            "params": self.params,
            "k": self.k,
            "prototypes": self.prototypes,
            "clusters": [c.to_json() for c in self.clusters],
            "graph_ids": list(self.graph_ids),
            "scores": [float(s) for s in self.scores],
            "nearest_cluster": list(self.nearest_cluster),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)


def _rowdot(A, v):
    # BLAS gemv may round identical rows differently depending on their
    # position; einsum reduces every row the same way, so ties stay ties.
    return np.einsum("ij,j->i", A, v)


def _stack(embeddings: Sequence[GraphEmbedding]):
    if not embeddings:
        raise ValueError("empty embedding set")
    first = embeddings[0]
    for e in embeddings[1:]:
        check_compatible(first, e)
    ids = [e.graph_id for e in embeddings]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate graph ids")
    order = np.argsort(ids, kind="stable")
    E = np.vstack([embeddings[i].vector for i in order])
    return [ids[i] for i in order], E, first.scale


def _as_list(embeddings) -> list[GraphEmbedding]:
    if isinstance(embeddings, EmbeddedDataset):
        return list(embeddings.graphs)
    return list(embeddings)


def point_set_kernel(g: GraphEmbedding, c: Union[Cluster, Sequence[GraphEmbedding]]) -> float:
    if isinstance(c, Cluster):
        if len(c.mean_vector) != len(g.vector):
            raise ValueError("embedding length mismatch")
        return float(_rowdot(g.vector[None], c.mean_vector)[0]) * g.scale
    c = list(c)
    if not c:
        raise ValueError("point-set kernel against an empty set")
    for y in c:
        check_compatible(g, y)
    mean = np.vstack([y.vector for y in c]).mean(axis=0)
    return float(_rowdot(g.vector[None], mean)[0]) * g.scale


# Index-level workers. ``E`` rows are sorted by graph id so that argmax
# (first maximum) breaks ties toward the lowest id.

def _prototype(E, scale, pi):
    sub = E[pi]
    vals = _rowdot(sub, sub.mean(axis=0)) * scale
    return int(pi[np.argmax(vals)])


def _grow(E, scale, pi, p, tau, rho):
    """Return (member indices or None, first gamma, passes)."""
    rest = pi[pi != p]
    to_p = _rowdot(E[rest], E[p]) * scale
    q = int(rest[np.argmax(to_p)])
    gamma = (1.0 - rho) * float(to_p.max())
    gamma0 = gamma
    if gamma <= tau:
        return None, gamma0, 0
    members = np.sort(np.array([p, q]))
    passes = 0
    sub = E[pi]
    while gamma > tau:
        vals = _rowdot(sub, E[members].mean(axis=0)) * scale
        keep = pi[vals > gamma]
        # the prototype always stays in its own cluster
        members = np.union1d(keep, [p])
        gamma = (1.0 - rho) * gamma
        passes += 1
    return members, gamma0, passes


def _check_params(tau, rho):
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    if not tau > 0.0:
        # gamma only decays geometrically toward 0, so tau <= 0 never terminates
        raise ValueError(f"tau must be > 0, got {tau}")


def find_prototype(pi: Sequence[GraphEmbedding]) -> int:
    ids, E, scale = _stack(_as_list(pi))
    return ids[_prototype(E, scale, np.arange(len(ids)))]


def grow_cluster(pi: Sequence[GraphEmbedding], g_p: int, tau: float, rho: float,
                 index: int = 1) -> Optional[Cluster]:
    """Grow a cluster around prototype ``g_p``; None when growth is rejected."""
    _check_params(tau, rho)
    ids, E, scale = _stack(_as_list(pi))
    if len(ids) < 2:
        raise ValueError("cluster growth needs at least 2 graphs")
    p = ids.index(g_p)
    members, _, passes = _grow(E, scale, np.arange(len(ids)), p, tau, rho)
    if members is None:
        return None
    return Cluster(index, g_p, tuple(ids[i] for i in members),
                   E[members].mean(axis=0), scale, passes)


def detect(embeddings, tau: float, rho: float = 0.1, params: Optional[dict] = None) -> DetectionResult:
    _check_params(tau, rho)
    ids, E, scale = _stack(_as_list(embeddings))
    n = len(ids)
    if n < 2:
        raise ValueError("detection needs at least 2 graphs")
    pi = np.arange(n)
    clusters = []
    first_gamma = None
    while len(pi) > 1:
        p = _prototype(E, scale, pi)
        members, gamma0, passes = _grow(E, scale, pi, p, tau, rho)
        if first_gamma is None:
            first_gamma = gamma0
        if members is None:
            break
        clusters.append(Cluster(len(clusters) + 1, ids[p], tuple(ids[i] for i in members),
                                E[members].mean(axis=0), scale, passes))
        pi = np.setdiff1d(pi, members)
    if not clusters:
        raise ZeroClusterError(first_gamma, tau)

    means = np.vstack([c.mean_vector for c in clusters])
    S = np.column_stack([_rowdot(E, m) for m in means]) * scale
    scores = S.max(axis=1)
    nearest = S.argmax(axis=1) + 1
    block = {"tau": float(tau), "rho": float(rho)}
    block.update(params or {})
    return DetectionResult(tuple(ids), scores, tuple(int(j) for j in nearest),
                           tuple(clusters), block)


def pairwise_similarities(embeddings, max_graphs: int = 2000, seed: int = 0) -> np.ndarray:
    """Upper-triangle graph similarities, on a seeded subsample beyond ``max_graphs``."""
    ids, E, scale = _stack(_as_list(embeddings))
    if len(ids) < 2:
        raise ValueError("need at least 2 embeddings")
    if len(ids) > max_graphs:
        pick = np.sort(np.random.default_rng(seed).choice(len(ids), max_graphs, replace=False))
        E = E[pick]
    K = (E @ E.T) * scale
    return K[np.triu_indices(len(E), k=1)]


def auto_tau(embeddings, quantile: float = 0.85, max_graphs: int = 2000, seed: int = 0) -> float:
    if not 0.0 <= quantile <= 1.0:
        raise ValueError(f"quantile must lie in [0, 1], got {quantile}")
    return float(np.quantile(pairwise_similarities(embeddings, max_graphs, seed), quantile))


def expected_passes(gamma0: float, tau: float, rho: float) -> int:
    return math.ceil(math.log(tau / gamma0) / math.log(1.0 - rho))


def result_from_json(d: dict, embeddings) -> DetectionResult:
    """Rebuild a result from its JSON; cluster means are recomputed from ``embeddings``."""
    ids, E, scale = _stack(_as_list(embeddings))
    pos = {g: i for i, g in enumerate(ids)}
    clusters = []
    for c in d["clusters"]:
        members = tuple(sorted(c["member_ids"]))
        rows = [pos[m] for m in members]
        clusters.append(Cluster(int(c["index"]), int(c["prototype_id"]), members,
                                E[rows].mean(axis=0), scale))
    return DetectionResult(tuple(d["graph_ids"]), np.asarray(d["scores"], dtype=np.float64),
                           tuple(d["nearest_cluster"]), tuple(clusters), dict(d["params"]))

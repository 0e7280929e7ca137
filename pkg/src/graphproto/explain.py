"""Node-level contrast between a graph and its nearest prototype."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .detect import DetectionResult, point_set_kernel
from .embed import EmbeddedDataset, GraphEmbedding, NodeEmbeddings, graph_similarity


@dataclass(frozen=True, eq=False)
class Explanation:
    anomaly_id: int
    prototype_id: int
    cluster_index: int
    similarity: float
    anomaly_node_scores: np.ndarray
    prototype_node_scores: np.ndarray

    def lowest_nodes(self, fraction: float = 0.25, side: str = "anomaly") -> list[int]:
        """Indices of the lowest-scored ``ceil(fraction * n)`` nodes, lowest first."""
        s = self.anomaly_node_scores if side == "anomaly" else self.prototype_node_scores
        k = max(1, math.ceil(fraction * len(s)))
        return [int(i) for i in np.argsort(s, kind="stable")[:k]]

    def to_json(self) -> dict:
        return {
            "anomaly_id": self.anomaly_id,
            "prototype_id": self.prototype_id,
            "cluster_index": self.cluster_index,
            "similarity": self.similarity,
            "anomaly_node_scores": [float(x) for x in self.anomaly_node_scores],
            "prototype_node_scores": [float(x) for x in self.prototype_node_scores],
        }


def node_scores(ne: NodeEmbeddings, target: GraphEmbedding) -> np.ndarray:
    """c(u) = scaled inner product of each node row with the target graph's embedding."""
    rows = ne.rows(target.mode)
    if target.mode == "concat" and ne.h != target.h:
        raise ValueError(f"WL depth mismatch: {ne.h} vs {target.h}")
    if rows.shape[1] != target.vector.shape[0] or ne.t != target.t:
        raise ValueError(f"node rows of width {rows.shape[1]} vs embedding {target.vector.shape[0]}")
    return (rows @ target.vector) * target.scale


def nearest_cluster(result: DetectionResult, g: GraphEmbedding):
    if result.k == 0:
        raise ValueError("detection result has no clusters")
    vals = [point_set_kernel(g, c) for c in result.clusters]
    return result.clusters[int(np.argmax(vals))]


def explain_pair(result: DetectionResult, embedded: EmbeddedDataset, anomaly_id: int) -> Explanation:
    g_a = embedded.embedding(anomaly_id)
    cluster = nearest_cluster(result, g_a)
    g_p = embedded.embedding(cluster.prototype_id)
    return Explanation(
        anomaly_id=anomaly_id,
        prototype_id=cluster.prototype_id,
        cluster_index=cluster.index,
        similarity=graph_similarity(g_a, g_p),
        anomaly_node_scores=node_scores(embedded.node_embeddings(anomaly_id), g_p),
        prototype_node_scores=node_scores(embedded.node_embeddings(cluster.prototype_id), g_a),
    )

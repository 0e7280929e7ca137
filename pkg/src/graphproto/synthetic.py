"""Synthetic base-plus-motif graphs with planted house anomalies."""
from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .graph import AttributedGraph, GraphDataset

BASE_KINDS = ("tree", "wheel", "ladder")
DEGREE_BUCKETS = 4  # degree 1, 2, 3, >=4


@dataclass(frozen=True)
class SyntheticConfig:
    num_normal: int = 500
    num_anomalous: int = 25
    base_kinds: tuple = BASE_KINDS
    base_size_range: tuple = (8, 12)
    cycle_size: int = 5
    attr_noise_std: float = 0.05
    seed: int = 0

    def validate(self) -> None:
        if self.num_anomalous >= self.num_normal:
            raise ValueError("anomalies must be the minority (num_anomalous < num_normal)")
        if self.num_anomalous < 0:
            raise ValueError("num_anomalous must be non-negative")
        lo, hi = self.base_size_range
        if lo < 4 or hi < lo:
            raise ValueError(f"bad base_size_range {self.base_size_range}; lower bound must be >= 4")
        bad = set(self.base_kinds) - set(BASE_KINDS)
        if bad or not self.base_kinds:
            raise ValueError(f"unknown base kinds {sorted(bad)}")
        if self.cycle_size < 3:
            raise ValueError("cycle_size must be >= 3")
        if self.attr_noise_std < 0:
            raise ValueError("attr_noise_std must be non-negative")

    def to_json(self) -> dict:
        d = asdict(self)
        d["base_kinds"] = list(self.base_kinds)
        d["base_size_range"] = list(self.base_size_range)
        return d


def random_tree(s: int, rng) -> list:
    """Uniform random recursive tree: node i hooks onto a uniform earlier node."""
    return [(int(rng.integers(i)), i) for i in range(1, s)]


def wheel(s: int) -> list:
    rim = list(range(1, s))
    edges = [(0, r) for r in rim]
    edges += [(rim[i], rim[(i + 1) % len(rim)]) for i in range(len(rim))]
    return edges


def ladder(s: int) -> list:
    """2 x (s // 2) grid; nodes 0..L-1 on one rail, L..2L-1 on the other."""
    L = s // 2
    edges = [(i, i + 1) for i in range(L - 1)]
    edges += [(L + i, L + i + 1) for i in range(L - 1)]
    edges += [(i, L + i) for i in range(L)]
    return edges


def cycle_motif(size: int = 5) -> list:
    return [(i, (i + 1) % size) for i in range(size)]


def house_motif() -> list:
    """Square 0-1-2-3 with roof apex 4 joined to adjacent corners 2 and 3."""
    return [(0, 1), (1, 2), (2, 3), (3, 0), (2, 4), (3, 4)]


def base_graph(kind: str, s: int, rng) -> tuple[int, list]:
    if kind == "tree":
        return s, random_tree(s, rng)
    if kind == "wheel":
        return s, wheel(s)
    if kind == "ladder":
        return 2 * (s // 2), ladder(s)
    raise ValueError(f"unknown base kind {kind!r}")


def degree_bucket_attributes(num_nodes: int, edges, noise_std: float, rng) -> np.ndarray:
    deg = np.zeros(num_nodes, dtype=np.int64)
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    bucket = np.clip(deg, 1, DEGREE_BUCKETS) - 1
    X = np.zeros((num_nodes, DEGREE_BUCKETS))
    X[np.arange(num_nodes), bucket] = 1.0
    if noise_std > 0:
        X += rng.normal(0.0, noise_std, size=X.shape)
    return X


def _one_graph(anomalous: bool, cfg: SyntheticConfig, rng):
    kind = cfg.base_kinds[int(rng.integers(len(cfg.base_kinds)))]
    lo, hi = cfg.base_size_range
    n_base, edges = base_graph(kind, int(rng.integers(lo, hi + 1)), rng)
    motif = house_motif() if anomalous else cycle_motif(cfg.cycle_size)
    m_size = 5 if anomalous else cfg.cycle_size
    edges = edges + [(n_base + u, n_base + v) for u, v in motif]
    # one bridge from a random base node to motif node 0
    edges.append((int(rng.integers(n_base)), n_base))
    n = n_base + m_size
    X = degree_bucket_attributes(n, edges, cfg.attr_noise_std, rng)
    return kind, n, edges, X, tuple(range(n_base, n))


def gen_synthetic(cfg: SyntheticConfig) -> GraphDataset:
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    flags = np.array([False] * cfg.num_normal + [True] * cfg.num_anomalous)
    flags = flags[rng.permutation(len(flags))]
    graphs = []
    for gid, anomalous in enumerate(flags):
        kind, n, edges, X, motif_nodes = _one_graph(bool(anomalous), cfg, rng)
        graphs.append(AttributedGraph(
            gid, n, [(min(u, v), max(u, v)) for u, v in edges], X,
            anomaly_label=bool(anomalous), class_label=int(anomalous),
            motif_nodes=motif_nodes, base_kind=kind))
    return GraphDataset("synthetic", graphs, DEGREE_BUCKETS, "raw_attributes")

"""TUDataset ingestion, GLAD preparation, and the JSON interchange format.

JSON layout (UTF-8)::

    {"name": ..., "attr_dim": m, "attribute_mode": ...,
     "graphs": [{"id": 0, "n": 3, "edges": [[0, 1], ...],
                 "attrs": [[...], ...], "label": true|false|null,
                 "class": 1, "node_labels": [...], "motif_nodes": [...]}]}

``label`` is the anomaly ground truth; the remaining per-graph keys are
optional metadata.
"""
from __future__ import annotations

import json
import logging
import warnings
from collections import Counter
from pathlib import Path

import numpy as np

from .graph import AttributedGraph, GraphDataset, derive_dataset

log = logging.getLogger(__name__)


class DataError(ValueError):
    """Malformed or inconsistent input data."""


def _read_lines(path: Path) -> list[str]:
    with open(path, encoding="utf-8") as f:
        return [ln.strip() for ln in f if ln.strip()]


def _read_ints(path: Path) -> list[int]:
    try:
        return [int(ln) for ln in _read_lines(path)]
    except ValueError as e:
        raise DataError(f"{path.name}: {e}") from None


def _read_rows(path: Path) -> list[list[float]]:
    try:
        return [[float(x) for x in ln.split(",")] for ln in _read_lines(path)]
    except ValueError as e:
        raise DataError(f"{path.name}: {e}") from None


def parse_tudataset(directory, name: str, attribute_mode: str | None = None) -> GraphDataset:
    """Read ``{name}_A.txt`` and friends from ``directory``.

    Without ``_node_attributes.txt`` attributes fall back to one-hot node
    labels when present, else to node degree; ``attribute_mode`` forces
    a choice.
    """
    d = Path(directory)
    files = {k: d / f"{name}_{k}.txt" for k in
             ("A", "graph_indicator", "graph_labels", "node_labels", "node_attributes")}
    for k in ("A", "graph_indicator"):
        if not files[k].exists():
            raise DataError(f"missing mandatory file {files[k]}")

    indicator = _read_ints(files["graph_indicator"])
    n_nodes = len(indicator)
    gids = sorted(set(indicator))
    gpos = {g: i for i, g in enumerate(gids)}
    node_graph = np.array([gpos[g] for g in indicator], dtype=np.int64)
    counts = np.bincount(node_graph, minlength=len(gids))
    offsets = np.concatenate([[0], np.cumsum(counts)])[:-1]
    if np.any(np.diff(node_graph) < 0):
        raise DataError("graph indicator is not grouped by graph")

    edges_per_graph: list[list[tuple[int, int]]] = [[] for _ in gids]
    seen_directed = Counter()
    dropped_loops = 0
    for ln in _read_lines(files["A"]):
        parts = ln.split(",")
        if len(parts) != 2:
            raise DataError(f"bad edge line {ln!r}")
        u, v = int(parts[0]) - 1, int(parts[1]) - 1
        if not (0 <= u < n_nodes and 0 <= v < n_nodes):
            raise DataError(f"node index out of range: {ln!r} with {n_nodes} nodes")
        if node_graph[u] != node_graph[v]:
            raise DataError(f"edge {ln!r} crosses graphs")
        seen_directed[(u, v)] += 1
        if u == v:
            dropped_loops += 1
            continue
        gi = node_graph[u]
        edges_per_graph[gi].append((u - offsets[gi], v - offsets[gi]))
    repeats = sum(c - 1 for c in seen_directed.values() if c > 1)
    if repeats:
        warnings.warn(f"{name}: {repeats} repeated edge line(s) deduplicated", stacklevel=2)
    if dropped_loops:
        warnings.warn(f"{name}: dropped {dropped_loops} self-loop(s)", stacklevel=2)

    graph_labels = None
    if files["graph_labels"].exists():
        graph_labels = _read_ints(files["graph_labels"])
        if len(graph_labels) != len(gids):
            raise DataError(f"{len(graph_labels)} graph labels for {len(gids)} graphs")
    node_labels = None
    if files["node_labels"].exists():
        node_labels = np.array(_read_ints(files["node_labels"]), dtype=np.int64)
        if len(node_labels) != n_nodes:
            raise DataError(f"{len(node_labels)} node labels for {n_nodes} nodes")
        # some datasets start labels at 1; one-hot needs them dense from 0
        node_labels = node_labels - node_labels.min()
    attrs = None
    if files["node_attributes"].exists():
        rows = _read_rows(files["node_attributes"])
        if len(rows) != n_nodes:
            raise DataError(f"{len(rows)} attribute rows for {n_nodes} nodes")
        widths = {len(r) for r in rows}
        if len(widths) != 1:
            raise DataError(f"ragged attribute rows (widths {sorted(widths)})")
        attrs = np.array(rows)

    graphs = []
    for gi in range(len(gids)):
        lo, n = offsets[gi], counts[gi]
        pairs = {(min(u, v), max(u, v)) for u, v in edges_per_graph[gi]}
        graphs.append(AttributedGraph(
            gi, int(n), sorted(pairs),
            attrs[lo:lo + n] if attrs is not None else np.zeros((n, 0)),
            node_labels=node_labels[lo:lo + n] if node_labels is not None else None,
            class_label=graph_labels[gi] if graph_labels is not None else None))
    ds = GraphDataset(name, graphs, attrs.shape[1] if attrs is not None else 0)

    if attribute_mode is None:
        attribute_mode = ("raw_attributes" if attrs is not None
                          else "one_hot_labels" if node_labels is not None
                          else "degree_scalar")
    if attribute_mode == "raw_attributes" and attrs is None:
        raise DataError(f"{name} has no node attributes")
    return derive_dataset(ds, attribute_mode)


def achievable_ratio(n_normal: int, n_candidates: int) -> float:
    return n_candidates / (n_normal + n_candidates)


def prepare_glad(ds: GraphDataset, anomalous_class: int, anomaly_ratio: float,
                 seed: int) -> GraphDataset:
    """Keep every other-class graph as normal; downsample ``anomalous_class``.

    The number of anomalies is ``round(ratio * n_normal / (1 - ratio))``.
    Output graph ids are renumbered 0..n-1 preserving input order.
    """
    if not 0.0 < anomaly_ratio < 0.5:
        raise DataError(f"ratio out of range: {anomaly_ratio} not in (0, 0.5)")
    classes = [g.class_label for g in ds.graphs]
    if any(c is None for c in classes):
        raise DataError("dataset carries no class labels")
    cand = [i for i, c in enumerate(classes) if c == anomalous_class]
    if not cand:
        raise DataError(f"class {anomalous_class} not present (classes {sorted(set(classes))})")
    n_normal = len(ds.graphs) - len(cand)
    n_anom = max(1, int(round(anomaly_ratio * n_normal / (1.0 - anomaly_ratio))))
    if n_anom > len(cand):
        raise DataError(
            f"anomalous class too small: need {n_anom}, have {len(cand)}; "
            f"achievable ratio is {achievable_ratio(n_normal, len(cand)):.4f}")
    rng = np.random.default_rng(seed)
    chosen = set(rng.choice(np.array(cand), size=n_anom, replace=False).tolist())
    out = []
    for i, g in enumerate(ds.graphs):
        is_anom = classes[i] == anomalous_class
        if is_anom and i not in chosen:
            continue
        out.append(g.with_(graph_id=len(out), anomaly_label=is_anom))
    return GraphDataset(ds.name, out, ds.attr_dim, ds.attribute_mode)


def dataset_to_json(ds: GraphDataset) -> dict:
    graphs = []
    for g in ds.graphs:
        d = {"id": g.graph_id, "n": g.num_nodes, "edges": g.edges.tolist(),
             "attrs": g.attributes.tolist(), "label": g.anomaly_label}
        if g.class_label is not None:
            d["class"] = g.class_label
        if g.node_labels is not None:
            d["node_labels"] = g.node_labels.tolist()
        if g.motif_nodes is not None:
            d["motif_nodes"] = list(g.motif_nodes)
        if g.base_kind is not None:
            d["base_kind"] = g.base_kind
        graphs.append(d)
    return {"name": ds.name, "attr_dim": ds.attr_dim,
            "attribute_mode": ds.attribute_mode, "graphs": graphs}


def dataset_from_json(d: dict) -> GraphDataset:
    try:
        m = int(d["attr_dim"])
        graphs = []
        for gd in d["graphs"]:
            attrs = np.asarray(gd["attrs"], dtype=np.float64).reshape(gd["n"], m)
            graphs.append(AttributedGraph(
                int(gd["id"]), int(gd["n"]), gd["edges"], attrs,
                node_labels=gd.get("node_labels"),
                anomaly_label=gd.get("label"),
                class_label=gd.get("class"),
                motif_nodes=tuple(gd["motif_nodes"]) if "motif_nodes" in gd else None,
                base_kind=gd.get("base_kind")))
        return GraphDataset(d["name"], graphs, m, d.get("attribute_mode", "raw_attributes"))
    except (KeyError, TypeError, ValueError) as e:
        raise DataError(f"malformed dataset JSON: {e}") from None


def save_dataset(ds: GraphDataset, path) -> None:
    Path(path).write_text(json.dumps(dataset_to_json(ds)), encoding="utf-8")


def load_dataset(path) -> GraphDataset:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise DataError(str(e)) from None
    try:
        return dataset_from_json(json.loads(text))
    except json.JSONDecodeError as e:
        raise DataError(f"{path}: {e}") from None

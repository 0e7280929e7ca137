"""Write graphs with per-node scores as Graphviz DOT or JSON."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .graph import AttributedGraph


def gray_levels(scores) -> list[int]:
    """8-bit gray per node: highest score darkest (0), lowest lightest (255).

    Constant scores map to mid-gray (128).
    """
    s = np.asarray(scores, dtype=np.float64)
    lo, hi = s.min(), s.max()
    if hi == lo:
        return [128] * len(s)
    v = (s - lo) / (hi - lo)
    return [int(round(255 * (1.0 - x))) for x in v]


def to_dot(g: AttributedGraph, node_scores, name: str | None = None) -> str:
    lines = [f"graph {name or f'g{g.graph_id}'} {{", "  node [style=filled];"]
    for u, level in enumerate(gray_levels(node_scores)):
        font = "white" if level < 128 else "black"
        lines.append(f'  {u} [fillcolor="#{level:02x}{level:02x}{level:02x}", '
                     f'fontcolor={font}, score="{float(node_scores[u]):.6g}"];')
    for u, v in g.edges:
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_score_json(g: AttributedGraph, node_scores) -> dict:
    return {"id": g.graph_id, "nodes": list(range(g.num_nodes)),
            "edges": g.edges.tolist(), "scores": [float(x) for x in node_scores]}


def export_scored_graph(g: AttributedGraph, node_scores, path, format: str = "dot") -> Path:
    if len(node_scores) != g.num_nodes:
        raise ValueError(f"{len(node_scores)} scores for {g.num_nodes} nodes")
    if format == "dot":
        text = to_dot(g, node_scores)
    elif format == "json":
        text = json.dumps(to_score_json(g, node_scores))
    else:
        raise ValueError(f"unknown format {format!r}")
    path = Path(path)
    path.write_text(text, encoding="utf-8")
    return path

import json

import numpy as np
import pydot
import pytest

from graphproto.export import export_scored_graph, gray_levels, to_dot
from graphproto.graph import AttributedGraph


def path3():
    return AttributedGraph(7, 3, [(0, 1), (1, 2)], np.zeros((3, 1)))


def test_constant_scores_are_mid_gray():
    assert gray_levels([0.4, 0.4, 0.4]) == [128, 128, 128]


def test_extremes_map_to_endpoints():
    assert gray_levels([1.0, 0.0, 0.5]) == [0, 255, 128]


def test_dot_parses_with_independent_parser(tmp_path):
    path = export_scored_graph(path3(), [0.9, 0.1, 0.5], tmp_path / "g.dot")
    (g,) = pydot.graph_from_dot_file(str(path))
    assert g.get_type() == "graph"
    nodes = [n for n in g.get_nodes() if n.get_name() not in ("node", "edge", "graph")]
    assert len(nodes) == 3 and len(g.get_edges()) == 2
    colours = {n.get_name(): n.get("fillcolor").strip('"') for n in nodes}
    assert colours == {"0": "#000000", "1": "#ffffff", "2": "#808080"}
    assert {(e.get_source(), e.get_destination()) for e in g.get_edges()} == {("0", "1"), ("1", "2")}


def test_dot_header():
    text = to_dot(path3(), [1, 2, 3])
    assert text.startswith("graph g7 {")
    assert text.rstrip().endswith("}")


def test_json_format(tmp_path):
    path = export_scored_graph(path3(), [0.1, 0.2, 0.3], tmp_path / "g.json", "json")
    d = json.loads(path.read_text())
    assert d["edges"] == [[0, 1], [1, 2]] and d["scores"] == [0.1, 0.2, 0.3]


def test_length_mismatch(tmp_path):
    with pytest.raises(ValueError, match="scores"):
        export_scored_graph(path3(), [0.1, 0.2], tmp_path / "g.dot")
    with pytest.raises(ValueError):
        export_scored_graph(path3(), [0.1, 0.2, 0.3], tmp_path / "g.x", "svg")

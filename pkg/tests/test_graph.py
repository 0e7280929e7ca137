import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graphproto.graph import (AttributedGraph, GraphDataset, derive_attributes, derive_dataset,
                              make_graph, validate_dataset, validate_graph)


def path3(attrs=None):
    return AttributedGraph(0, 3, [(0, 1), (1, 2)], np.zeros((3, 1)) if attrs is None else attrs)


def test_minimal_valid_graph():
    g = AttributedGraph(0, 2, [(0, 1)], np.zeros((2, 1)))
    assert validate_graph(g) is None


@pytest.mark.parametrize("edges, n, fragment", [
    ([(0, 5)], 3, "out of range"),
    ([(1, 1)], 3, "self-loop"),
    ([(0, 1), (1, 0)], 3, "duplicate"),
])
def test_violations(edges, n, fragment):
    g = AttributedGraph(0, n, edges, np.zeros((n, 1)))
    assert fragment in validate_graph(g)


def test_attribute_rows_must_match():
    g = AttributedGraph(0, 3, [(0, 1)], np.zeros((2, 1)))
    assert "rows" in validate_graph(g)
    assert "dimension" in validate_graph(path3(), attr_dim=2)


def test_make_graph_dedups_with_warning():
    with pytest.warns(UserWarning, match="duplicate"):
        g = make_graph(0, 3, [(0, 1), (1, 0), (1, 2)], np.zeros((3, 1)))
    assert g.edges.tolist() == [[0, 1], [1, 2]]
    assert validate_graph(g) is None


def test_isolated_nodes_allowed():
    g = AttributedGraph(0, 3, [(0, 1)], np.zeros((3, 1)))
    assert validate_graph(g) is None
    assert g.degrees().tolist() == [1, 1, 0]


def test_graph_is_immutable():
    g = path3()
    with pytest.raises(ValueError):
        g.attributes[0, 0] = 1.0
    with pytest.raises(AttributeError):
        g.num_nodes = 4


def test_one_hot_labels():
    g = AttributedGraph(0, 2, [(0, 1)], np.zeros((2, 0)), node_labels=[0, 2])
    out = derive_attributes(g, "one_hot_labels", 3)
    assert out.attributes.tolist() == [[1, 0, 0], [0, 0, 1]]


def test_one_hot_requires_labels():
    with pytest.raises(ValueError, match="node_labels"):
        derive_attributes(path3(), "one_hot_labels", 3)


def test_degree_scalar_on_path():
    assert derive_attributes(path3(), "degree_scalar", 0).attributes[:, 0].tolist() == [1, 2, 1]


def test_raw_attributes_identity():
    a = np.arange(3.0).reshape(3, 1)
    g = path3(a)
    out = derive_attributes(g, "raw_attributes", 0)
    assert np.array_equal(out.attributes, a)
    assert derive_attributes(out, "raw_attributes", 0) is out


def test_dataset_alphabet_is_shared():
    g1 = AttributedGraph(0, 1, [], np.zeros((1, 0)), node_labels=[0])
    g2 = AttributedGraph(1, 1, [], np.zeros((1, 0)), node_labels=[3])
    ds = derive_dataset(GraphDataset("x", [g1, g2], 0), "one_hot_labels")
    assert ds.attr_dim == 4
    assert validate_dataset(ds) is None


@st.composite
def labelled_graphs(draw):
    n = draw(st.integers(1, 12))
    pairs = draw(st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
                         .filter(lambda p: p[0] < p[1]), max_size=20))
    labels = draw(st.lists(st.integers(0, 4), min_size=n, max_size=n))
    return AttributedGraph(0, n, sorted(pairs), np.zeros((n, 0)), node_labels=labels)


@settings(max_examples=60, deadline=None)
@given(labelled_graphs(), st.sampled_from(["one_hot_labels", "degree_scalar"]))
def test_derived_graphs_stay_valid(g, mode):
    assert validate_graph(g) is None
    out = derive_attributes(g, mode, 5)
    assert validate_graph(out) is None
    if mode == "one_hot_labels":
        assert np.all(out.attributes.sum(axis=1) == 1.0)

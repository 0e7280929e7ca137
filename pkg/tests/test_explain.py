import numpy as np
import pytest

from graphproto.detect import DetectionResult, auto_tau, detect, point_set_kernel
from graphproto.embed import embed_dataset, graph_embedding, graph_similarity, wl_propagate
from graphproto.explain import explain_pair, nearest_cluster, node_scores
from graphproto.graph import AttributedGraph
from graphproto.ik import fit_ik
from instances import random_graph, random_instance


@pytest.fixture(scope="module")
def model():
    return fit_ik(np.random.default_rng(0).uniform(-2, 2, size=(500, 2)), 8, 50, 2)


def test_identical_rows_score_equal(model):
    g = AttributedGraph(0, 4, [(0, 1), (1, 2), (2, 3)], np.tile([0.3, -0.1], (4, 1)))
    y = graph_embedding(wl_propagate(random_graph(np.random.default_rng(1), 1, 6, [0, 0]), model, 2))
    c = node_scores(wl_propagate(g, model, 2), y)
    x = graph_embedding(wl_propagate(g, model, 2))
    np.testing.assert_allclose(c, graph_similarity(x, y), rtol=1e-12)


@pytest.mark.parametrize("mode", ["final", "concat"])
def test_mean_identity(model, mode):
    rng = np.random.default_rng(2)
    for _ in range(30):
        a = random_graph(rng, 0, int(rng.integers(1, 12)), rng.uniform(-1, 1, 2), spread=0.5)
        b = random_graph(rng, 1, int(rng.integers(1, 12)), rng.uniform(-1, 1, 2), spread=0.5)
        h = int(rng.integers(0, 4))
        na, nb = wl_propagate(a, model, h), wl_propagate(b, model, h)
        ea, eb = graph_embedding(na, mode), graph_embedding(nb, mode)
        sim = graph_similarity(ea, eb)
        assert np.mean(node_scores(na, eb)) == pytest.approx(sim, rel=1e-9, abs=1e-15)
        assert np.mean(node_scores(nb, ea)) == pytest.approx(sim, rel=1e-9, abs=1e-15)


def test_depth_mismatch_rejected(model):
    g = random_graph(np.random.default_rng(3), 0, 5, [0, 0])
    with pytest.raises(ValueError):
        node_scores(wl_propagate(g, model, 1), graph_embedding(wl_propagate(g, model, 2), "concat"))


def detected(seed, q=0.5):
    rng = np.random.default_rng(seed)
    while True:
        E = random_instance(rng, 30)
        if len(E.graphs) >= 6 and auto_tau(E, q) > 0:
            break
    return E, detect(E, auto_tau(E, q))


def test_prototype_choice_matches_argmax_oracle():
    for seed in range(10):
        E, r = detected(seed, 0.3)
        for e in E.graphs:
            ks = [point_set_kernel(e, c) for c in r.clusters]
            best = max(range(r.k), key=lambda j: (ks[j], -j))
            ex = explain_pair(r, E, e.graph_id)
            assert ex.cluster_index == best + 1
            assert ex.prototype_id == r.clusters[best].prototype_id
            assert len(ex.anomaly_node_scores) == E.source[E.position(e.graph_id)].num_nodes


def test_single_cluster_is_forced():
    g = AttributedGraph(0, 3, [(0, 1), (1, 2)], np.zeros((3, 2)))
    graphs = [g.with_(graph_id=i) for i in range(4)] + [
        AttributedGraph(4, 2, [(0, 1)], [[1.5, 1.5], [1.4, 1.6]])]
    E = embed_dataset(graphs, fit_ik(np.vstack([x.attributes for x in graphs]), 2, 20, 0), 1)
    r = detect(E, 0.05)
    assert r.k == 1
    ex = explain_pair(r, E, 4)
    assert ex.prototype_id == r.prototypes[0] == 0


def test_explaining_a_prototype_is_well_defined():
    E, r = detected(4)
    p = r.prototypes[0]
    ex = explain_pair(r, E, p)
    assert np.all(np.isfinite(ex.anomaly_node_scores))
    assert ex.similarity == graph_similarity(E.embedding(p), E.embedding(ex.prototype_id))


def test_role_swap_reproduces_scores():
    E, r = detected(5)
    for e in E.graphs[:8]:
        ex = explain_pair(r, E, e.graph_id)
        swapped = node_scores(E.node_embeddings(ex.prototype_id), E.embedding(e.graph_id))
        np.testing.assert_array_equal(swapped, ex.prototype_node_scores)
        again = node_scores(E.node_embeddings(e.graph_id), E.embedding(ex.prototype_id))
        np.testing.assert_array_equal(again, ex.anomaly_node_scores)


def test_lowest_nodes_and_json():
    E, r = detected(6)
    ex = explain_pair(r, E, E.graphs[0].graph_id)
    n = len(ex.anomaly_node_scores)
    low = ex.lowest_nodes(0.25)
    assert len(low) == max(1, int(np.ceil(0.25 * n)))
    assert all(ex.anomaly_node_scores[i] <= ex.anomaly_node_scores[j]
               for i, j in zip(low, low[1:]))
    d = ex.to_json()
    assert set(d) >= {"anomaly_id", "prototype_id", "similarity", "anomaly_node_scores",
                      "prototype_node_scores"}


def test_no_clusters_rejected():
    E, _ = detected(7)
    empty = DetectionResult(tuple(), np.zeros(0), tuple(), tuple())
    with pytest.raises(ValueError):
        nearest_cluster(empty, E.graphs[0])

import math

import networkx as nx
import numpy as np
import pytest

from conftest import complete_graph, cycle_graph, path_graph, random_corpus, star_graph
from propenc.errors import NotConverged, TooLarge
from propenc.graph import GraphDataset, gen_erdos_renyi, graph_from_edges
from propenc.metrics import (
    Metric,
    SolverSettings,
    betweenness,
    betweenness_oracle,
    closeness,
    compute_graph_metric,
    compute_metric,
    degree,
    eigenvector,
    pagerank,
)


def to_nx(g):
    G = nx.Graph()
    G.add_nodes_from(range(g.num_nodes))
    G.add_edges_from(g.edges().tolist())
    return G


def adjacency(g):
    A = np.zeros((g.num_nodes, g.num_nodes))
    e = g.edges()
    A[e[:, 0], e[:, 1]] = 1
    A[e[:, 1], e[:, 0]] = 1
    return A


class TestDegree:
    def test_examples(self):
        assert degree(complete_graph(3)).values.tolist() == [2, 2, 2]
        assert degree(path_graph(3)).values.tolist() == [1, 2, 1]
        assert degree(graph_from_edges(1, [])).values.tolist() == [0]


class TestBetweenness:
    def test_path(self):
        np.testing.assert_array_equal(betweenness(path_graph(3)).values, [0.0, 1.0, 0.0])

    def test_complete(self):
        np.testing.assert_array_equal(betweenness(complete_graph(4)).values, np.zeros(4))

    def test_star(self):
        np.testing.assert_allclose(betweenness(star_graph(4)).values, [1, 0, 0, 0, 0], atol=1e-15)

    @pytest.mark.parametrize("n", [0, 1, 2])
    def test_tiny_graphs_normalise_to_zero(self, n):
        assert betweenness(path_graph(n) if n else graph_from_edges(0, [])).values.tolist() == [0.0] * n

    def test_oracle_examples(self):
        assert betweenness_oracle(path_graph(3)).values.tolist() == [0, 1, 0]
        np.testing.assert_allclose(betweenness_oracle(cycle_graph(4)).values, [0.5] * 4)
        assert betweenness_oracle(complete_graph(4)).values.tolist() == [0] * 4

    def test_oracle_node_cap(self):
        with pytest.raises(TooLarge):
            betweenness_oracle(path_graph(13))

    def test_matches_oracle(self):
        for g in random_corpus(seed=5, count=60, n_max=12):
            np.testing.assert_allclose(
                betweenness(g, normalized=False).values, betweenness_oracle(g).values, atol=1e-9
            )

    def test_matches_networkx(self):
        for g in random_corpus(seed=6, count=20, n_max=40):
            ref = nx.betweenness_centrality(to_nx(g), normalized=True)
            np.testing.assert_allclose(betweenness(g).values, [ref[v] for v in range(g.num_nodes)], atol=1e-12)

    def test_normalised_range(self):
        for g in random_corpus(seed=7, count=30, n_max=30):
            v = betweenness(g).values
            assert v.min() >= 0 and v.max() <= 1 + 1e-12


class TestCloseness:
    def test_path(self):
        np.testing.assert_allclose(closeness(path_graph(3)).values, [2 / 3, 1.0, 2 / 3], rtol=1e-15)

    def test_isolated(self):
        assert closeness(graph_from_edges(3, [(0, 1)])).values[2] == 0.0

    def test_small_component(self):
        # nodes 0,1 form a component of size 2 in a 5-node graph: (1/4) * (1/1)
        g = graph_from_edges(5, [(0, 1), (2, 3), (3, 4)])
        np.testing.assert_allclose(closeness(g).values[:2], [0.25, 0.25])

    def test_connected_graph_is_plain_closeness(self):
        rng = np.random.default_rng(1)
        for g in random_corpus(seed=8, count=30, n_max=25, p_range=(0.4, 0.9)):
            G = to_nx(g)
            if g.num_nodes < 2 or not nx.is_connected(G):
                continue
            values = closeness(g).values
            for v in rng.choice(g.num_nodes, size=min(3, g.num_nodes), replace=False):
                s = sum(nx.single_source_shortest_path_length(G, int(v)).values())
                assert values[v] == (g.num_nodes - 1) / s

    def test_matches_networkx_wf(self):
        for g in random_corpus(seed=9, count=30, n_max=30, p_range=(0.02, 0.3)):
            ref = nx.closeness_centrality(to_nx(g), wf_improved=True)
            np.testing.assert_allclose(closeness(g).values, [ref[v] for v in range(g.num_nodes)], atol=1e-12)


class TestEigenvector:
    def test_triangle(self):
        np.testing.assert_allclose(eigenvector(complete_graph(3), tol=1e-10).values, [1 / math.sqrt(3)] * 3, atol=1e-9)

    def test_path_analytic(self):
        # principal eigenvector of the P3 adjacency, eigenvalue sqrt(2)
        np.testing.assert_allclose(
            eigenvector(path_graph(3), tol=1e-10).values, [0.5, math.sqrt(2) / 2, 0.5], atol=1e-9
        )

    def test_no_edges(self):
        with pytest.raises(NotConverged):
            eigenvector(graph_from_edges(3, []))

    def test_max_iter_exhausted(self):
        with pytest.raises(NotConverged) as info:
            eigenvector(gen_erdos_renyi(30, 0.2, 1), tol=1e-14, max_iter=2)
        assert info.value.residual > 0

    def test_matches_dense_eigensolver(self):
        for g in random_corpus(seed=10, count=30, n_max=30, p_range=(0.3, 0.9)):
            G = to_nx(g)
            if g.num_nodes < 2 or not nx.is_connected(G):
                continue
            w, vecs = np.linalg.eigh(adjacency(g))
            ref = np.abs(vecs[:, -1])
            np.testing.assert_allclose(eigenvector(g, tol=1e-10).values, ref, atol=1e-7)

    def test_rayleigh_residual(self):
        for tol in (1e-4, 1e-6, 1e-8):
            for g in random_corpus(seed=11, count=40, n_max=30):
                try:
                    x = eigenvector(g, tol=tol).values
                except NotConverged:
                    continue
                A = adjacency(g)
                lam = x @ A @ x
                assert np.abs(A @ x - lam * x).max() <= 10 * tol
                assert abs(np.linalg.norm(x) - 1) <= 1e-6
                assert x.min() >= 0


class TestPageRank:
    def test_triangle(self):
        np.testing.assert_allclose(pagerank(complete_graph(3)).values, [1 / 3] * 3, atol=1e-12)

    def test_star_fixed_point(self):
        # c = 0.03 + 3.4 x and x = 0.03 + 0.2125 c
        c = 0.132 / 0.2775
        x = 0.03 + 0.2125 * c
        values = pagerank(star_graph(4), damping=0.85).values
        np.testing.assert_allclose(values, [c] + [x] * 4, atol=1e-9)
        assert round(values[0], 5) == 0.47568 and round(values[1], 5) == 0.13108

    def test_all_dangling(self):
        np.testing.assert_allclose(pagerank(graph_from_edges(2, [])).values, [0.5, 0.5])

    def test_matches_networkx(self):
        for g in random_corpus(seed=12, count=30, n_max=30, p_range=(0.02, 0.5)):
            ref = nx.pagerank(to_nx(g), alpha=0.85, tol=1e-12, max_iter=10000)
            np.testing.assert_allclose(pagerank(g).values, [ref[v] for v in range(g.num_nodes)], atol=1e-8)

    def test_distribution(self):
        for g in random_corpus(seed=13, count=50, n_max=20, p_range=(0.0, 0.4)):
            v = pagerank(g).values
            assert abs(v.sum() - 1) <= 1e-8 and (v > 0).all()

    def test_bad_damping(self):
        with pytest.raises(ValueError):
            pagerank(path_graph(3), damping=1.0)


class TestComputeMetric:
    def test_degree_dataset(self):
        ds = GraphDataset((complete_graph(3), path_graph(3)), (0, 1))
        assert [m.values.tolist() for m in compute_metric(ds, Metric.DEGREE)] == [[2, 2, 2], [1, 2, 1]]

    def test_empty_dataset(self):
        assert compute_metric(GraphDataset((), ()), "pagerank") == []

    def test_error_carries_graph_index(self):
        ds = GraphDataset((complete_graph(3), graph_from_edges(3, [])), (0, 1))
        with pytest.raises(NotConverged) as info:
            compute_metric(ds, "eigenvector")
        assert info.value.graph_index == 1
        assert "graph 1" in str(info.value)

    def test_parallel_matches_serial(self):
        ds = GraphDataset(tuple(random_corpus(seed=14, count=12, n_max=25)), (0,) * 12)
        serial = compute_metric(ds, "closeness")
        parallel = compute_metric(ds, "closeness", workers=2)
        for a, b in zip(serial, parallel):
            assert a.values.tobytes() == b.values.tobytes()

    def test_settings_are_used(self):
        g = path_graph(4)
        raw = compute_graph_metric(g, "betweenness", SolverSettings(betweenness_normalized=False))
        assert raw.values.tolist() == [0, 2, 2, 0]

    def test_unknown_metric(self):
        with pytest.raises(ValueError):
            Metric.parse("katz")


@pytest.mark.parametrize("metric, atol", [
    ("degree", 1e-12), ("betweenness", 1e-12), ("closeness", 1e-12),
    ("eigenvector", 1e-6), ("pagerank", 1e-6),
])
def test_permutation_equivariance(metric, atol):
    rng = np.random.default_rng(15)
    for g in random_corpus(seed=15, count=15, n_max=25, p_range=(0.3, 0.8)):
        if g.num_edges == 0:
            continue
        perm = rng.permutation(g.num_nodes)
        try:
            base = compute_graph_metric(g, metric).values
        except NotConverged:
            continue
        moved = compute_graph_metric(g.relabel(perm), metric).values
        np.testing.assert_allclose(moved[perm], base, atol=atol)

import numpy as np
import pytest
from hypothesis import strategies as st

from propenc.graph import graph_from_edges, make_rng

ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def path_graph(n):
    return graph_from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n):
    return graph_from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star_graph(leaves):
    return graph_from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def cycle_graph(n):
    return graph_from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def random_graph(rng, n_max, p_range=(0.1, 0.8)):
    n = int(rng.integers(1, n_max + 1))
    p = float(rng.uniform(*p_range))
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    return graph_from_edges(n, np.column_stack([iu[keep], ju[keep]]))


def random_corpus(seed, count, n_max, p_range=(0.1, 0.8)):
    rng = make_rng(seed)
    return [random_graph(rng, n_max, p_range) for _ in range(count)]


@st.composite
def graphs(draw, max_nodes=12):
    n = draw(st.integers(0, max_nodes))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if not pairs:
        return graph_from_edges(n, [])
    chosen = draw(st.lists(st.sampled_from(pairs), max_size=len(pairs)))
    return graph_from_edges(n, chosen)


@pytest.fixture
def P3():
    return path_graph(3)


@pytest.fixture
def K3():
    return complete_graph(3)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")

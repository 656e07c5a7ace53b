"""Node-level graph metrics.

Each metric maps a :class:`~propenc.graph.Graph` to a :class:`NodePropertyMap`
holding one finite float per node. Shortest-path metrics are exact BFS
computations; eigenvector centrality and PageRank are power iterations that
raise :class:`~propenc.errors.NotConverged` instead of returning a partial
answer.
"""

from __future__ import annotations

import enum
import itertools
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from propenc.errors import NotConverged, PropEncError, TooLarge
from propenc.graph import Graph, GraphDataset

__all__ = [
    "Metric",
    "NodePropertyMap",
    "SolverSettings",
    "degree",
    "betweenness",
    "closeness",
    "eigenvector",
    "pagerank",
    "compute_metric",
    "compute_graph_metric",
    "betweenness_oracle",
]


class Metric(str, enum.Enum):
    DEGREE = "degree"
    BETWEENNESS = "betweenness"
    CLOSENESS = "closeness"
    EIGENVECTOR = "eigenvector"
    PAGERANK = "pagerank"

    @classmethod
    def parse(cls, name: str | Metric) -> Metric:
        try:
            return cls(str(getattr(name, "value", name)).lower())
        except ValueError:
            choices = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown metric {name!r}; choose from {choices}") from None


@dataclass(frozen=True, eq=False)
class NodePropertyMap:
    """One metric value per node of one graph."""

    values: np.ndarray
    metric: Metric

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class SolverSettings:
    betweenness_normalized: bool = True
    eigenvector_tol: float = 1e-6
    eigenvector_max_iter: int = 1000
    pagerank_damping: float = 0.85
    pagerank_tol: float = 1e-9
    pagerank_max_iter: int = 1000

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def degree(g: Graph) -> NodePropertyMap:
    return NodePropertyMap(g.degrees().astype(np.float64), Metric.DEGREE)


def _bfs_distances(adj: list[list[int]], source: int) -> dict[int, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        dv = dist[v] + 1
        for w in adj[v]:
            if w not in dist:
                dist[w] = dv
                queue.append(w)
    return dist


def betweenness(g: Graph, normalized: bool = True) -> NodePropertyMap:
    """Shortest-path betweenness by Brandes' dependency accumulation.

    Unnormalized values count each unordered pair once. With ``normalized``
    the values are divided by ``(n-1)(n-2)/2``; graphs with ``n <= 2`` get
    all zeros.
    """
    n = g.num_nodes
    adj = g.adjacency_lists()
    score = [0.0] * n
    for s in range(n):
        order = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = [0] * n
        dist = [-1] * n
        sigma[s] = 1
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                score[w] += delta[w]
    values = np.asarray(score) / 2.0  # every pair was visited from both ends
    if normalized:
        values = values / ((n - 1) * (n - 2) / 2.0) if n > 2 else np.zeros(n)
    return NodePropertyMap(values, Metric.BETWEENNESS)


def closeness(g: Graph) -> NodePropertyMap:
    """Closeness scaled by the fraction of the graph each node can reach.

    ``((r-1)/(n-1)) * ((r-1)/S)`` where ``r`` counts reachable nodes including
    the node itself and ``S`` sums their BFS distances; isolated nodes get 0.
    """
    n = g.num_nodes
    adj = g.adjacency_lists()
    values = np.zeros(n)
    for v in range(n):
        dist = _bfs_distances(adj, v)
        reach = len(dist) - 1
        if reach > 0:
            values[v] = (reach / (n - 1)) * (reach / sum(dist.values()))
    return NodePropertyMap(values, Metric.CLOSENESS)


def eigenvector(g: Graph, tol: float = 1e-6, max_iter: int = 1000) -> NodePropertyMap:
    """Principal adjacency eigenvector, non-negative with unit L2 norm.

    Iterates ``x <- (A + I) x / ||(A + I) x||`` from the uniform vector. The
    identity shift leaves the eigenvectors unchanged but keeps bipartite
    graphs (eigenvalues ``+/- lambda``) from oscillating. Stops once no entry
    moves by ``tol`` or more.
    """
    if tol <= 0 or max_iter < 1:
        raise ValueError("need tol > 0 and max_iter >= 1")
    n = g.num_nodes
    if g.num_edges == 0:
        raise NotConverged("eigenvector centrality undefined: graph has no edges (eigenvalue 0)")
    src = g.sources()
    x = np.full(n, 1.0 / np.sqrt(n))
    change = np.inf
    for _ in range(max_iter):
        y = x + np.bincount(src, weights=x[g.targets], minlength=n)
        y /= np.linalg.norm(y)
        change = np.abs(y - x).max()
        x = y
        if change < tol:
            return NodePropertyMap(x, Metric.EIGENVECTOR)
    raise NotConverged(
        f"eigenvector centrality did not converge in {max_iter} iterations "
        f"(max change {change:.3g})",
        residual=float(change),
    )


def pagerank(
    g: Graph, damping: float = 0.85, tol: float = 1e-9, max_iter: int = 1000
) -> NodePropertyMap:
    """PageRank of the undirected random walk with uniform teleport.

    Mass sitting on degree-0 nodes is spread evenly over all nodes each step.
    Converged when the L1 change between iterates drops below ``tol``.
    """
    if not 0.0 < damping < 1.0:
        raise ValueError(f"damping must lie in (0, 1), got {damping}")
    if tol <= 0 or max_iter < 1:
        raise ValueError("need tol > 0 and max_iter >= 1")
    n = g.num_nodes
    if n == 0:
        return NodePropertyMap(np.zeros(0), Metric.PAGERANK)
    deg = g.degrees().astype(np.float64)
    dangling = deg == 0
    inv_deg = np.divide(1.0, deg, out=np.zeros(n), where=~dangling)
    src = g.sources()
    x = np.full(n, 1.0 / n)
    change = np.inf
    for _ in range(max_iter):
        spread = np.bincount(src, weights=(x * inv_deg)[g.targets], minlength=n)
        y = damping * (spread + x[dangling].sum() / n) + (1.0 - damping) / n
        y /= y.sum()
        change = np.abs(y - x).sum()
        x = y
        if change < tol:
            return NodePropertyMap(x, Metric.PAGERANK)
    raise NotConverged(
        f"pagerank did not converge in {max_iter} iterations (L1 change {change:.3g})",
        residual=float(change),
    )


def compute_graph_metric(
    g: Graph, metric: Metric | str, settings: SolverSettings | None = None
) -> NodePropertyMap:
    metric = Metric.parse(metric)
    s = settings or SolverSettings()
    if metric is Metric.DEGREE:
        return degree(g)
    if metric is Metric.BETWEENNESS:
        return betweenness(g, normalized=s.betweenness_normalized)
    if metric is Metric.CLOSENESS:
        return closeness(g)
    if metric is Metric.EIGENVECTOR:
        return eigenvector(g, tol=s.eigenvector_tol, max_iter=s.eigenvector_max_iter)
    return pagerank(
        g, damping=s.pagerank_damping, tol=s.pagerank_tol, max_iter=s.pagerank_max_iter
    )


def _indexed_metric(args):
    index, g, metric, settings = args
    try:
        return compute_graph_metric(g, metric, settings)
    except PropEncError as exc:
        exc.graph_index = index
        raise


def compute_metric(
    ds: GraphDataset,
    metric: Metric | str,
    settings: SolverSettings | None = None,
    workers: int = 1,
) -> list[NodePropertyMap]:
    """One property map per graph, in dataset order.

    With ``workers > 1`` graphs are farmed out to a process pool; results are
    still returned in dataset order. The first failing graph's error is
    re-raised with ``graph_index`` set.
    """
    metric = Metric.parse(metric)
    jobs = [(i, g, metric, settings) for i, g in enumerate(ds.graphs)]
    if workers <= 1 or len(jobs) < 2:
        return [_indexed_metric(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_indexed_metric, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


ORACLE_MAX_NODES = 12


def betweenness_oracle(g: Graph) -> NodePropertyMap:
    """Unnormalized betweenness by listing every shortest path explicitly.

    For each unordered pair ``(s, t)`` all shortest paths are enumerated by
    walking down the BFS layers from ``s``; each interior node of a path is
    credited ``1 / (number of shortest s-t paths)``. Exponential in the worst
    case, hence the node cap.
    """
    n = g.num_nodes
    if n > ORACLE_MAX_NODES:
        raise TooLarge(f"oracle limited to {ORACLE_MAX_NODES} nodes, got {n}")
    adj = g.adjacency_lists()
    score = np.zeros(n)
    for s, t in itertools.combinations(range(n), 2):
        dist = _bfs_distances(adj, s)
        if t not in dist:
            continue
        paths = []
        stack = [[s]]
        while stack:
            path = stack.pop()
            last = path[-1]
            if last == t:
                paths.append(path)
                continue
            for w in adj[last]:
                if dist.get(w) == len(path) and dist[t] >= len(path):
                    stack.append(path + [w])
        for path in paths:
            for v in path[1:-1]:
                score[v] += 1.0 / len(paths)
    return NodePropertyMap(score, Metric.BETWEENNESS)

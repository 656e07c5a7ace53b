"""Undirected simple graphs in compressed adjacency form, plus seeded generators.

All randomness goes through ``numpy.random.Generator(PCG64(seed))`` so the
same parameters and seed produce the same graph on every platform.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from propenc.errors import IndexOutOfRange, InvalidParams, InvalidProbability, SelfLoop

__all__ = [
    "Graph",
    "GraphDataset",
    "graph_from_edges",
    "neighbors",
    "make_rng",
    "gen_erdos_renyi",
    "gen_barabasi_albert",
    "synth_dataset",
]


def make_rng(seed: int) -> np.random.Generator:
    """The one PRNG used for every seeded construction in the package."""
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph.

    Attributes
    ----------
    num_nodes : int
        Node ids are ``0 .. num_nodes - 1``.
    offsets : ndarray of int64, shape (num_nodes + 1,)
        Neighbors of ``v`` are ``targets[offsets[v]:offsets[v + 1]]``.
    targets : ndarray of int64, shape (2 * num_edges,)
        Flat neighbor array, ascending within each node's slice.
    """

    num_nodes: int
    offsets: np.ndarray
    targets: np.ndarray
    num_edges: int = field(init=False)

    def __post_init__(self):
        offsets = np.ascontiguousarray(self.offsets, dtype=np.int64)
        targets = np.ascontiguousarray(self.targets, dtype=np.int64)
        if offsets.shape != (self.num_nodes + 1,) or offsets[0] != 0 or offsets[-1] != targets.size:
            raise InvalidParams("offsets do not describe the target array")
        if targets.size % 2:
            raise InvalidParams("odd number of adjacency entries")
        offsets.setflags(write=False)
        targets.setflags(write=False)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "num_edges", targets.size // 2)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.num_nodes == other.num_nodes
            and np.array_equal(self.offsets, other.offsets)
            and np.array_equal(self.targets, other.targets)
        )

    def __hash__(self):
        return hash((self.num_nodes, self.offsets.tobytes(), self.targets.tobytes()))

    def __repr__(self):
        return f"Graph(num_nodes={self.num_nodes}, num_edges={self.num_edges})"

    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def sources(self) -> np.ndarray:
        """Row index of every entry of ``targets`` (the COO source array)."""
        return np.repeat(np.arange(self.num_nodes, dtype=np.int64), self.degrees())

    def edges(self) -> np.ndarray:
        """Undirected edges as an ``(num_edges, 2)`` array with ``u < v``, sorted."""
        src = self.sources()
        keep = src < self.targets
        return np.column_stack([src[keep], self.targets[keep]])

    def adjacency_lists(self) -> list[list[int]]:
        """Plain Python neighbor lists; faster than array slicing in BFS loops."""
        flat = self.targets.tolist()
        bounds = self.offsets.tolist()
        return [flat[bounds[v]:bounds[v + 1]] for v in range(self.num_nodes)]

    def relabel(self, perm: Sequence[int]) -> Graph:
        """Graph with node ``v`` renamed to ``perm[v]``."""
        perm = np.asarray(perm, dtype=np.int64)
        return graph_from_edges(self.num_nodes, perm[self.edges()])


@dataclass(frozen=True)
class GraphDataset:
    """Ordered graphs with one integer class label each."""

    graphs: tuple[Graph, ...]
    labels: tuple[int, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "graphs", tuple(self.graphs))
        object.__setattr__(self, "labels", tuple(int(y) for y in self.labels))
        if len(self.graphs) != len(self.labels):
            raise InvalidParams(
                f"{len(self.graphs)} graphs but {len(self.labels)} labels"
            )

    def __len__(self):
        return len(self.graphs)

    @property
    def num_classes(self) -> int:
        return len(set(self.labels))


def graph_from_edges(num_nodes: int, edges: Iterable[Sequence[int]] | np.ndarray) -> Graph:
    """Build the canonical graph for an edge list.

    Both orientations and repeated pairs collapse to one undirected edge.

    Raises
    ------
    IndexOutOfRange
        An endpoint is negative or ``>= num_nodes``.
    SelfLoop
        An edge joins a node to itself.
    """
    if num_nodes < 0:
        raise InvalidParams(f"num_nodes must be non-negative, got {num_nodes}")
    arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
    arr = arr.reshape(-1, 2)
    if arr.size:
        bad = (arr < 0) | (arr >= num_nodes)
        if bad.any():
            u, v = arr[np.flatnonzero(bad.any(axis=1))[0]]
            raise IndexOutOfRange(f"edge ({u}, {v}) out of range for {num_nodes} nodes")
        loops = arr[:, 0] == arr[:, 1]
        if loops.any():
            u = arr[np.flatnonzero(loops)[0], 0]
            raise SelfLoop(f"self-loop at node {u}")
    lo = np.minimum(arr[:, 0], arr[:, 1])
    hi = np.maximum(arr[:, 0], arr[:, 1])
    # one key per undirected pair; np.unique sorts and deduplicates
    keys = np.unique(lo * max(num_nodes, 1) + hi)
    lo, hi = keys // max(num_nodes, 1), keys % max(num_nodes, 1)
    src = np.concatenate([lo, hi])
    dst = np.concatenate([hi, lo])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    offsets = np.zeros(num_nodes + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=num_nodes), out=offsets[1:])
    return Graph(num_nodes, offsets, dst)


def neighbors(g: Graph, v: int) -> list[int]:
    if not 0 <= v < g.num_nodes:
        raise IndexOutOfRange(f"node {v} out of range for {g.num_nodes} nodes")
    return g.targets[g.offsets[v]:g.offsets[v + 1]].tolist()


def gen_erdos_renyi(n: int, p: float, seed: int) -> Graph:
    """G(n, p): every unordered pair is kept independently with probability ``p``."""
    if n < 1:
        raise InvalidParams(f"n must be >= 1, got {n}")
    if not 0.0 <= p <= 1.0:
        raise InvalidProbability(f"p must lie in [0, 1], got {p}")
    rng = make_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    return graph_from_edges(n, np.column_stack([iu[keep], ju[keep]]))


def gen_barabasi_albert(n: int, m: int, seed: int) -> Graph:
    """Preferential attachment graph with ``m * (n - m)`` edges.

    Starts from ``m`` isolated nodes. Node ``m`` links to all of them; every
    later node draws targets uniformly from the list of edge endpoints seen so
    far (so proportional to degree), rejecting repeats until it has ``m``
    distinct targets.
    """
    if m < 1 or m >= n:
        raise InvalidParams(f"need 1 <= m < n, got n={n}, m={m}")
    rng = make_rng(seed)
    endpoints: list[int] = []
    edges: list[tuple[int, int]] = []
    for new in range(m, n):
        if new == m:
            targets = list(range(m))
        else:
            targets = []
            while len(targets) < m:
                t = endpoints[int(rng.integers(len(endpoints)))]
                if t not in targets:
                    targets.append(t)
        edges.extend((new, t) for t in targets)
        endpoints.extend(targets)
        endpoints.extend([new] * m)
    return graph_from_edges(n, edges)


def synth_dataset(n: int, m: int, per_class: int, seed: int, name: str = "SYNTH") -> GraphDataset:
    """Two-class benchmark: ``per_class`` Erdos-Renyi graphs (label 0) followed
    by ``per_class`` Barabasi-Albert graphs (label 1).

    The ER edge probability ``m (n - m) / C(n, 2)`` matches the BA edge count
    in expectation, so the classes differ in degree distribution rather than
    density.
    """
    if per_class < 1:
        raise InvalidParams(f"per_class must be >= 1, got {per_class}")
    if m < 1 or m >= n:
        raise InvalidParams(f"need 1 <= m < n, got n={n}, m={m}")
    p = m * (n - m) / (n * (n - 1) / 2)
    seeds = make_rng(seed).integers(0, 2**63 - 1, size=2 * per_class).tolist()
    graphs = [gen_erdos_renyi(n, p, s) for s in seeds[:per_class]]
    graphs += [gen_barabasi_albert(n, m, s) for s in seeds[per_class:]]
    return GraphDataset(tuple(graphs), (0,) * per_class + (1,) * per_class, name)

"""Reading TU-format graph datasets and writing feature matrices.

TU layout for a dataset ``DS`` in one directory:

``DS_A.txt``
    one ``u, v`` line per directed edge record, 1-based global node ids
``DS_graph_indicator.txt``
    one line per node giving its 1-based graph id
``DS_graph_labels.txt``
    one integer class label per graph

Node/edge attribute files that may sit alongside are ignored.
"""

from __future__ import annotations

import ast
import csv
import os
import re
import struct
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from propenc.encoder import FeatureMatrix, stack
from propenc.errors import (
    CrossGraphEdge,
    InconsistentCounts,
    LengthMismatch,
    MalformedLine,
    UnsupportedFormat,
)
from propenc.graph import GraphDataset, graph_from_edges

__all__ = [
    "tu_paths",
    "parse_tu_dataset",
    "write_tu_dataset",
    "format_real",
    "write_csv",
    "write_npy",
    "read_npy",
    "read_boundaries",
]

_SPLIT = re.compile(r"[,\s]+")


def tu_paths(directory: str | os.PathLike, name: str) -> dict[str, Path]:
    base = Path(directory)
    return {
        "edges": base / f"{name}_A.txt",
        "indicator": base / f"{name}_graph_indicator.txt",
        "labels": base / f"{name}_graph_labels.txt",
    }


def _read_ints(path: Path, per_line: int) -> np.ndarray:
    """Integer table from a comma/whitespace separated file, blank lines skipped."""
    rows = []
    for number, line in enumerate(path.read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        fields = [f for f in _SPLIT.split(stripped) if f]
        if len(fields) != per_line:
            raise MalformedLine(str(path), number, line)
        try:
            rows.append([int(f) for f in fields])
        except ValueError:
            raise MalformedLine(str(path), number, line) from None
    return np.asarray(rows, dtype=np.int64).reshape(-1, per_line)


def parse_tu_dataset(directory: str | os.PathLike, name: str) -> GraphDataset:
    """Load a TU dataset into per-graph canonical graphs.

    Labels are remapped to ``0..C-1`` following the sorted order of the
    original label values.
    """
    paths = tu_paths(directory, name)
    for p in paths.values():
        if not p.is_file():
            raise FileNotFoundError(f"missing TU file {p}")
    labels_raw = _read_ints(paths["labels"], 1)[:, 0]
    indicator = _read_ints(paths["indicator"], 1)[:, 0]
    edges = _read_ints(paths["edges"], 2)

    num_graphs = labels_raw.size
    if num_graphs == 0:
        raise InconsistentCounts(f"{paths['labels']} lists no graphs")
    if indicator.size == 0:
        raise InconsistentCounts(f"{paths['indicator']} lists no nodes")
    if indicator.min() < 1 or indicator.max() > num_graphs:
        raise InconsistentCounts(
            f"graph ids in {paths['indicator'].name} span {indicator.min()}..{indicator.max()}, "
            f"but there are {num_graphs} labels"
        )
    sizes = np.bincount(indicator - 1, minlength=num_graphs)
    if (sizes == 0).any():
        missing = int(np.flatnonzero(sizes == 0)[0]) + 1
        raise InconsistentCounts(f"graph {missing} has no nodes in {paths['indicator'].name}")

    # local id = rank of the node among nodes of the same graph, in file order
    graph_of = indicator - 1
    order = np.argsort(graph_of, kind="stable")
    local = np.empty_like(graph_of)
    starts = np.concatenate([[0], np.cumsum(sizes)[:-1]])
    local[order] = np.arange(indicator.size) - np.repeat(starts, sizes)

    if edges.size:
        bad = (edges < 1) | (edges > indicator.size)
        if bad.any():
            row = int(np.flatnonzero(bad.any(axis=1))[0])
            raise InconsistentCounts(
                f"{paths['edges'].name} record {row + 1} refers to a node outside 1..{indicator.size}"
            )
        eg = graph_of[edges - 1]
        cross = eg[:, 0] != eg[:, 1]
        if cross.any():
            row = int(np.flatnonzero(cross)[0])
            u, v = edges[row]
            raise CrossGraphEdge(
                f"{paths['edges'].name} record {row + 1}: edge ({u}, {v}) joins graphs "
                f"{eg[row, 0] + 1} and {eg[row, 1] + 1}"
            )
        edge_graph = eg[:, 0]
        edge_order = np.argsort(edge_graph, kind="stable")
        local_edges = local[edges - 1][edge_order]
        splits = np.cumsum(np.bincount(edge_graph, minlength=num_graphs))[:-1]
        per_graph = np.split(local_edges, splits)
    else:
        per_graph = [np.zeros((0, 2), dtype=np.int64)] * num_graphs

    graphs = [graph_from_edges(int(sizes[g]), per_graph[g]) for g in range(num_graphs)]
    classes = {value: i for i, value in enumerate(sorted(set(labels_raw.tolist())))}
    labels = [classes[v] for v in labels_raw.tolist()]
    return GraphDataset(tuple(graphs), tuple(labels), name)


def write_tu_dataset(ds: GraphDataset, directory: str | os.PathLike, name: str) -> dict[str, Path]:
    """Write ``ds`` in TU text format; each undirected edge becomes two records."""
    paths = tu_paths(directory, name)
    Path(directory).mkdir(parents=True, exist_ok=True)
    edge_lines = []
    indicator_lines = []
    offset = 0
    for gid, g in enumerate(ds.graphs, start=1):
        src = g.sources() + offset + 1
        dst = g.targets + offset + 1
        edge_lines.extend(f"{u}, {v}\n" for u, v in zip(src.tolist(), dst.tolist()))
        indicator_lines.append(f"{gid}\n" * g.num_nodes)
        offset += g.num_nodes
    paths["edges"].write_text("".join(edge_lines))
    paths["indicator"].write_text("".join(indicator_lines))
    paths["labels"].write_text("".join(f"{y}\n" for y in ds.labels))
    return paths


def format_real(x: float) -> str:
    """Shortest round-trip decimal; integral values drop the trailing ``.0``."""
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def write_csv(
    matrices: Sequence[FeatureMatrix],
    path: str | os.PathLike,
    graph_ids: Sequence[int] | None = None,
) -> Path:
    """One CSV row per node: ``graph_id,node_id,f0,...,f{w-1}``."""
    widths = {m.width for m in matrices}
    if len(widths) > 1:
        raise LengthMismatch(f"feature widths differ across graphs: {sorted(widths)}")
    if graph_ids is None:
        graph_ids = range(len(matrices))
    if len(graph_ids) != len(matrices):
        raise LengthMismatch("graph_ids and matrices differ in length")
    width = widths.pop() if widths else 0
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["graph_id", "node_id"] + [f"f{j}" for j in range(width)])
        for gid, mat in sorted(zip(graph_ids, matrices), key=lambda pair: pair[0]):
            for node, row in enumerate(mat.rows.tolist()):
                writer.writerow([gid, node] + [format_real(x) for x in row])
    return path


_MAGIC = b"\x93NUMPY"
_ALIGN = 64


def _npy_header(shape: tuple[int, int]) -> bytes:
    text = "{'descr': '<f8', 'fortran_order': False, 'shape': (%d, %d), }" % shape
    # magic(6) + version(2) + length(2) + text + newline, padded to the alignment
    pad = -(10 + len(text) + 1) % _ALIGN
    text = text + " " * pad + "\n"
    return _MAGIC + bytes([1, 0]) + struct.pack("<H", len(text)) + text.encode("latin1")


def write_npy(
    matrices: FeatureMatrix | np.ndarray | Sequence[FeatureMatrix],
    path: str | os.PathLike,
) -> Path:
    """Write a 2-D float64 array as an NPY 1.0 file.

    A list of per-graph matrices is stacked; ``<path>.graphs.csv`` records
    where each graph's rows start and how many there are.
    """
    if isinstance(matrices, FeatureMatrix):
        parts = [matrices.rows]
    elif isinstance(matrices, np.ndarray):
        parts = [np.asarray(matrices, dtype=np.float64)]
    else:
        parts = [m.rows for m in matrices]
    if parts and any(p.ndim != 2 for p in parts):
        raise UnsupportedFormat("only 2-D matrices can be written")
    if len(parts) == 1:
        data = parts[0]
    else:
        data = stack([FeatureMatrix(p) for p in parts]) if parts else np.zeros((0, 0))
    data = np.ascontiguousarray(data, dtype="<f8")
    path = Path(path)
    with path.open("wb") as fh:
        fh.write(_npy_header(data.shape))
        fh.write(data.tobytes(order="C"))
    with Path(f"{path}.graphs.csv").open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["graph_id", "node_offset", "node_count"])
        offset = 0
        for gid, part in enumerate(parts):
            writer.writerow([gid, offset, part.shape[0]])
            offset += part.shape[0]
    return path


def read_npy(path: str | os.PathLike) -> FeatureMatrix:
    """Inverse of :func:`write_npy`; rejects anything but 2-D little-endian float64 v1.0."""
    raw = Path(path).read_bytes()
    if raw[:6] != _MAGIC:
        raise UnsupportedFormat(f"magic: not an NPY file ({raw[:6]!r})")
    if raw[6:8] != b"\x01\x00":
        raise UnsupportedFormat(f"version: {raw[6]}.{raw[7]} (only 1.0 is supported)")
    (hlen,) = struct.unpack("<H", raw[8:10])
    try:
        header = ast.literal_eval(raw[10:10 + hlen].decode("latin1"))
    except (ValueError, SyntaxError) as exc:
        raise UnsupportedFormat(f"header: cannot parse ({exc})") from None
    if not isinstance(header, dict) or set(header) != {"descr", "fortran_order", "shape"}:
        raise UnsupportedFormat(f"header: unexpected keys {header!r}")
    if header["descr"] not in ("<f8", "<d"):
        raise UnsupportedFormat(f"descr: {header['descr']!r} (need '<f8')")
    if header["fortran_order"]:
        raise UnsupportedFormat("fortran_order: True (need C order)")
    shape = header["shape"]
    if not isinstance(shape, tuple) or len(shape) != 2:
        raise UnsupportedFormat(f"shape: {shape!r} (need 2-D)")
    payload = raw[10 + hlen:]
    if len(payload) != 8 * shape[0] * shape[1]:
        raise UnsupportedFormat(f"shape: {shape!r} does not match {len(payload)} payload bytes")
    data = np.frombuffer(payload, dtype="<f8").reshape(shape).astype(np.float64)
    return FeatureMatrix(data)


def read_boundaries(path: str | os.PathLike) -> list[tuple[int, int, int]]:
    """``(graph_id, node_offset, node_count)`` rows from the companion of an NPY file."""
    with Path(f"{path}.graphs.csv").open(newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        return [tuple(int(x) for x in row) for row in reader]

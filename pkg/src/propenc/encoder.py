"""Histogram-indexed one-hot node features and the classical baselines.

PropEnc fits one equal-width histogram over a node property across a whole
dataset, then gives every node a length-``d`` one-hot row marking the bin its
value falls in. Stacking those rows and summing columns gives back the
histogram counts, so the feature width is ``d`` no matter how large the
property values get.

Bins are left-closed and right-open except the last, which also takes the
upper edge::

    bin(x) = clamp(floor((x - lo) * d / (hi - lo)), 0, d - 1)

With integer values covering ``a..b``, ``d = b - a + 1`` and range ``[a, b]``
this sends value ``a + j`` to bin ``j``, i.e. plain one-hot encoding.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from propenc.errors import EmptyInput, LengthMismatch, NonFinite, NonIntegral, OutOfRange
from propenc.metrics import NodePropertyMap

__all__ = [
    "HistogramSpec",
    "FeatureMatrix",
    "fit_histogram",
    "bin_index",
    "bin_indices",
    "encode_node",
    "propenc_encode",
    "propenc_encode_dataset",
    "one_hot_integer",
    "raw_scalar_features",
    "concat_features",
    "stack",
]


@dataclass(frozen=True, eq=False)
class HistogramSpec:
    """Equal-width histogram fitted over a dataset's property values.

    Edge ``i`` sits at ``lo + i * (hi - lo) / d``.
    """

    d: int
    lo: float
    hi: float
    counts: np.ndarray
    fitted_on: int

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64)
        if self.d < 1:
            raise ValueError(f"bin count must be >= 1, got {self.d}")
        if not self.lo <= self.hi:
            raise ValueError(f"need lo <= hi, got ({self.lo}, {self.hi})")
        if counts.shape != (self.d,) or counts.sum() != self.fitted_on:
            raise ValueError("counts do not match d / fitted_on")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))

    @property
    def edges(self) -> np.ndarray:
        return self.lo + np.arange(self.d + 1) * (self.hi - self.lo) / self.d

    @property
    def degenerate(self) -> bool:
        return self.hi == self.lo

    def __eq__(self, other):
        if not isinstance(other, HistogramSpec):
            return NotImplemented
        return (
            (self.d, self.lo, self.hi, self.fitted_on) == (other.d, other.lo, other.hi, other.fitted_on)
            and np.array_equal(self.counts, other.counts)
        )


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """Node-major feature rows for one graph."""

    rows: np.ndarray
    encoding_tag: str = ""

    def __post_init__(self):
        rows = np.array(self.rows, dtype=np.float64)
        if rows.ndim != 2:
            raise ValueError(f"feature matrix must be 2-D, got shape {rows.shape}")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def num_rows(self) -> int:
        return self.rows.shape[0]

    @property
    def width(self) -> int:
        return self.rows.shape[1]

    def __eq__(self, other):
        if not isinstance(other, FeatureMatrix):
            return NotImplemented
        return self.rows.shape == other.rows.shape and np.array_equal(self.rows, other.rows)


def _check_values(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size == 0:
        raise EmptyInput("no property values to fit")
    if not np.isfinite(arr).all():
        raise NonFinite("property values must be finite")
    return arr


def bin_indices(spec: HistogramSpec, values) -> np.ndarray:
    """Vectorised :func:`bin_index`."""
    x = np.asarray(values, dtype=np.float64)
    if spec.degenerate:
        return np.zeros(x.shape, dtype=np.int64)
    with np.errstate(over="ignore", invalid="ignore"):
        raw = np.floor((x - spec.lo) * spec.d / (spec.hi - spec.lo))
    # clamp before the int cast so far out-of-range values cannot overflow
    return np.clip(raw, 0, spec.d - 1).astype(np.int64)


def bin_index(spec: HistogramSpec, x: float) -> int:
    """Bin holding ``x``; values outside ``[lo, hi]`` go to the end bins."""
    if not math.isfinite(x):
        raise NonFinite(f"cannot bin {x}")
    return int(bin_indices(spec, np.float64(x)))


def fit_histogram(values, d: int, range_override: tuple[float, float] | None = None) -> HistogramSpec:
    """Fit ``d`` equal-width bins spanning ``min(values)..max(values)``.

    Parameters
    ----------
    values : array_like
        Every node property value of the dataset.
    d : int
        Number of bins, i.e. the feature width.
    range_override : (lo, hi), optional
        Fixed range instead of the data extremes. Values outside it are
        counted in the end bins.
    """
    arr = _check_values(values)
    if d < 1:
        raise ValueError(f"bin count must be >= 1, got {d}")
    if range_override is None:
        lo, hi = float(arr.min()), float(arr.max())
    else:
        lo, hi = map(float, range_override)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise NonFinite("range bounds must be finite")
    probe = HistogramSpec(d, lo, hi, np.zeros(d, dtype=np.int64), 0)
    counts = np.bincount(bin_indices(probe, arr), minlength=d)
    return HistogramSpec(d, lo, hi, counts, int(arr.size))


def encode_node(spec: HistogramSpec, x: float) -> np.ndarray:
    row = np.zeros(spec.d)
    row[bin_index(spec, x)] = 1.0
    return row


def _tag(metric, spec: HistogramSpec) -> str:
    return f"propenc(metric={metric},d={spec.d},lo={spec.lo!r},hi={spec.hi!r})"


def propenc_encode(spec: HistogramSpec, pmap: NodePropertyMap | Sequence[float], metric: str = "") -> FeatureMatrix:
    """Encode one graph's property map against an already fitted histogram."""
    if isinstance(pmap, NodePropertyMap):
        metric = metric or pmap.metric.value
        values = pmap.values
    else:
        values = np.asarray(pmap, dtype=np.float64)
    if not np.isfinite(values).all():
        raise NonFinite("property values must be finite")
    rows = np.zeros((values.size, spec.d))
    rows[np.arange(values.size), bin_indices(spec, values)] = 1.0
    return FeatureMatrix(rows, _tag(metric, spec))


def propenc_encode_dataset(
    property_maps: Sequence[NodePropertyMap],
    d: int,
    spec: HistogramSpec | None = None,
    range_override: tuple[float, float] | None = None,
) -> tuple[HistogramSpec, list[FeatureMatrix]]:
    """Fit a histogram over every node of every graph and one-hot encode them.

    Passing ``spec`` skips fitting, e.g. to apply a histogram fitted on a
    training split to held-out graphs.
    """
    if not property_maps:
        raise EmptyInput("no property maps to encode")
    metrics = {m.metric for m in property_maps if isinstance(m, NodePropertyMap)}
    if len(metrics) > 1:
        raise ValueError(f"property maps mix metrics: {sorted(m.value for m in metrics)}")
    if spec is None:
        spec = fit_histogram(np.concatenate([np.asarray(_values(m)) for m in property_maps]), d, range_override)
    return spec, [propenc_encode(spec, m) for m in property_maps]


def _values(pmap) -> np.ndarray:
    return pmap.values if isinstance(pmap, NodePropertyMap) else np.asarray(pmap, dtype=np.float64)


def one_hot_integer(property_maps: Sequence[NodePropertyMap], vmin: int, vmax: int) -> list[FeatureMatrix]:
    """Classical one-hot encoding of integer values, width ``vmax - vmin + 1``."""
    if vmax < vmin:
        raise ValueError(f"need vmin <= vmax, got ({vmin}, {vmax})")
    width = vmax - vmin + 1
    out = []
    for i, pmap in enumerate(property_maps):
        values = _values(pmap)
        if not np.isfinite(values).all() or not np.array_equal(values, np.round(values)):
            raise NonIntegral(f"graph {i}: one-hot encoding needs integer values")
        if values.size and (values.min() < vmin or values.max() > vmax):
            raise OutOfRange(
                f"graph {i}: values span [{values.min():g}, {values.max():g}] outside [{vmin}, {vmax}]"
            )
        rows = np.zeros((values.size, width))
        rows[np.arange(values.size), values.astype(np.int64) - vmin] = 1.0
        metric = pmap.metric.value if isinstance(pmap, NodePropertyMap) else ""
        out.append(FeatureMatrix(rows, f"onehot(metric={metric},vmin={vmin},vmax={vmax})"))
    return out


def raw_scalar_features(maps_per_metric: Sequence[Sequence[NodePropertyMap]]) -> list[FeatureMatrix]:
    """Unscaled metric values side by side, one column per metric."""
    if not maps_per_metric:
        raise EmptyInput("no metrics given")
    num_graphs = len(maps_per_metric[0])
    if any(len(maps) != num_graphs for maps in maps_per_metric):
        raise LengthMismatch("metrics cover different numbers of graphs")
    names = ",".join(
        maps[0].metric.value if maps and isinstance(maps[0], NodePropertyMap) else "?"
        for maps in maps_per_metric
    )
    out = []
    for g in range(num_graphs):
        cols = [_values(maps[g]) for maps in maps_per_metric]
        if len({c.size for c in cols}) > 1:
            raise LengthMismatch(f"graph {g}: metrics disagree on node count")
        out.append(FeatureMatrix(np.column_stack(cols), f"raw(metrics={names})"))
    return out


def concat_features(per_encoding: Sequence[Sequence[FeatureMatrix]]) -> list[FeatureMatrix]:
    """Horizontally join several encodings of the same graphs."""
    if not per_encoding:
        raise EmptyInput("nothing to concatenate")
    num_graphs = len(per_encoding[0])
    if any(len(mats) != num_graphs for mats in per_encoding):
        raise LengthMismatch("encodings cover different numbers of graphs")
    out = []
    for g in range(num_graphs):
        parts = [mats[g] for mats in per_encoding]
        if len({p.num_rows for p in parts}) > 1:
            raise LengthMismatch(f"graph {g}: row counts differ {[p.num_rows for p in parts]}")
        out.append(FeatureMatrix(np.hstack([p.rows for p in parts]), "+".join(p.encoding_tag for p in parts)))
    return out


def stack(matrices: Sequence[FeatureMatrix]) -> np.ndarray:
    """All node rows of all graphs in one array."""
    widths = {m.width for m in matrices}
    if len(widths) > 1:
        raise LengthMismatch(f"feature widths differ: {sorted(widths)}")
    if not matrices:
        return np.zeros((0, 0))
    return np.vstack([m.rows for m in matrices])

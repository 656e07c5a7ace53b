"""Linear probe for checking that node features carry graph-class signal.

Node rows are pooled into one vector per graph, standardised with training
statistics, and fed to a multinomial logistic regression trained by
full-batch gradient descent. ``kfold_eval`` wraps this in stratified k-fold
cross-validation.
"""

from __future__ import annotations

import enum
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from propenc.encoder import FeatureMatrix
from propenc.errors import EmptyInput, InvalidParams, SingleClass, TooFewSamples, WidthMismatch
from propenc.graph import make_rng
from propenc.io import format_real

__all__ = [
    "Pooling",
    "PooledDataset",
    "ProbeParams",
    "ProbeModel",
    "KFoldResult",
    "pool_graphs",
    "standardize_stats",
    "loss_and_grad",
    "train_probe",
    "predict",
    "accuracy",
    "stratified_folds",
    "kfold_eval",
    "format_report",
]


class Pooling(str, enum.Enum):
    SUM = "sum"
    MEAN = "mean"


@dataclass(frozen=True, eq=False)
class PooledDataset:
    features: np.ndarray
    labels: np.ndarray
    pooling: Pooling = Pooling.MEAN

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        if features.ndim != 2 or features.shape[0] != labels.size:
            raise InvalidParams(f"{features.shape[0]} feature rows but {labels.size} labels")
        if not np.isfinite(features).all():
            raise InvalidParams("pooled features must be finite")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return self.labels.size

    def subset(self, index) -> PooledDataset:
        return PooledDataset(self.features[index], self.labels[index], self.pooling)


@dataclass(frozen=True)
class ProbeParams:
    epochs: int = 500
    learning_rate: float = 0.1
    l2: float = 1e-4


@dataclass(eq=False)
class ProbeModel:
    """Softmax classifier on standardised inputs.

    ``weights`` is ``(num_classes, width)``. Inputs are mapped through
    ``(x - mean) / scale`` before the linear layer.
    """

    weights: np.ndarray
    bias: np.ndarray
    mean: np.ndarray
    scale: np.ndarray
    epochs: int = 0
    learning_rate: float = 0.0
    initial_loss: float = float("nan")
    final_loss: float = float("nan")

    @property
    def num_classes(self) -> int:
        return self.bias.size

    @property
    def width(self) -> int:
        return self.mean.size

    def standardize(self, features) -> np.ndarray:
        x = np.asarray(features, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.width:
            raise WidthMismatch(f"model expects width {self.width}, got shape {x.shape}")
        return (x - self.mean) / self.scale

    def logits(self, features) -> np.ndarray:
        return self.standardize(features) @ self.weights.T + self.bias


def pool_graphs(
    matrices: Sequence[FeatureMatrix], labels: Sequence[int] | None = None, mode: Pooling | str = Pooling.MEAN
) -> PooledDataset:
    """Collapse each graph's node rows into one vector (column sum or mean)."""
    mode = Pooling(getattr(mode, "value", mode))
    widths = {m.width for m in matrices}
    if len(widths) > 1:
        raise WidthMismatch(f"feature widths differ: {sorted(widths)}")
    width = widths.pop() if widths else 0
    pooled = np.zeros((len(matrices), width))
    for i, m in enumerate(matrices):
        if m.num_rows:
            pooled[i] = m.rows.sum(axis=0)
            if mode is Pooling.MEAN:
                pooled[i] /= m.num_rows
    if labels is None:
        labels = np.zeros(len(matrices), dtype=np.int64)
    return PooledDataset(pooled, labels, mode)


def standardize_stats(features: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Column means and scales; constant columns get scale 1 so they map to 0."""
    mean = features.mean(axis=0)
    std = features.std(axis=0)
    return mean, np.where(std > 0, std, 1.0)


def loss_and_grad(weights, bias, x, y, l2):
    """Mean softmax cross-entropy plus ``l2/2 * ||weights||^2``, with its gradient.

    Returns ``(loss, grad_weights, grad_bias)``.
    """
    n = x.shape[0]
    z = x @ weights.T + bias
    z = z - z.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(z).sum(axis=1))
    loss = float((log_norm - z[np.arange(n), y]).mean() + 0.5 * l2 * np.sum(weights * weights))
    resid = np.exp(z - log_norm[:, None])
    resid[np.arange(n), y] -= 1.0
    resid /= n
    return loss, resid.T @ x + l2 * weights, resid.sum(axis=0)


def train_probe(
    data: PooledDataset,
    epochs: int = 500,
    learning_rate: float = 0.1,
    l2: float = 1e-4,
    seed: int = 0,
    num_classes: int | None = None,
) -> ProbeModel:
    """Fit the probe by full-batch gradient descent from zero weights.

    Zero initialisation makes training deterministic; ``seed`` is accepted
    for interface symmetry and does not change the result.
    """
    if len(data) == 0:
        raise EmptyInput("no training samples")
    present = np.unique(data.labels)
    if present.size < 2:
        raise SingleClass(f"training labels contain a single class ({present.tolist()})")
    c = int(num_classes if num_classes is not None else data.labels.max() + 1)
    mean, scale = standardize_stats(data.features)
    x = (data.features - mean) / scale
    y = data.labels
    w = np.zeros((c, x.shape[1]))
    b = np.zeros(c)
    initial = loss_and_grad(w, b, x, y, l2)[0]
    for _ in range(epochs):
        _, gw, gb = loss_and_grad(w, b, x, y, l2)
        w -= learning_rate * gw
        b -= learning_rate * gb
    final = loss_and_grad(w, b, x, y, l2)[0]
    return ProbeModel(w, b, mean, scale, epochs, learning_rate, initial, final)


def predict(model: ProbeModel, features) -> np.ndarray:
    """Argmax class per row; ties go to the lowest class index."""
    return np.argmax(model.logits(np.atleast_2d(features)), axis=1)


def accuracy(model: ProbeModel, data: PooledDataset) -> float:
    if len(data) == 0:
        raise EmptyInput("accuracy of an empty set is undefined")
    return float(np.mean(predict(model, data.features) == data.labels))


def stratified_folds(labels: Sequence[int], k: int, seed: int) -> np.ndarray:
    """Fold id per sample.

    Each class is shuffled with the seeded generator, classes are laid end to
    end in label order, and position ``i`` goes to fold ``i % k``.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if k < 2:
        raise TooFewSamples(f"k must be >= 2, got {k}")
    classes, counts = np.unique(labels, return_counts=True)
    if classes.size and counts.min() < k:
        c = classes[np.argmin(counts)]
        raise TooFewSamples(f"class {c} has {counts.min()} samples, fewer than k={k}")
    rng = make_rng(seed)
    sequence = np.concatenate(
        [rng.permutation(np.flatnonzero(labels == c)) for c in classes]
    ) if classes.size else np.zeros(0, dtype=np.int64)
    folds = np.empty(labels.size, dtype=np.int64)
    folds[sequence] = np.arange(sequence.size) % k
    return folds


@dataclass
class KFoldResult:
    mean: float
    std: float
    fold_accuracies: list[float]
    folds: np.ndarray = field(repr=False)


def kfold_eval(
    matrices: Sequence[FeatureMatrix] | None,
    labels: Sequence[int],
    k: int = 5,
    pooling: Pooling | str = Pooling.MEAN,
    params: ProbeParams = ProbeParams(),
    seed: int = 0,
    encode_fold: Callable[[np.ndarray], Sequence[FeatureMatrix]] | None = None,
) -> KFoldResult:
    """Stratified k-fold accuracy of the probe.

    Parameters
    ----------
    matrices
        Per-graph features, already encoded. Ignored when ``encode_fold`` is set.
    encode_fold
        Optional ``train_index -> matrices for every graph``; lets the caller
        refit its encoder on each training split.

    Returns mean and population standard deviation of the fold accuracies.
    """
    labels = np.asarray(labels, dtype=np.int64)
    folds = stratified_folds(labels, k, seed)
    num_classes = int(labels.max()) + 1 if labels.size else 0
    if encode_fold is None:
        if matrices is None or len(matrices) != labels.size:
            raise InvalidParams("need one feature matrix per label")
        pooled = pool_graphs(matrices, labels, pooling)
    scores = []
    for fold in range(k):
        test = np.flatnonzero(folds == fold)
        train = np.flatnonzero(folds != fold)
        if encode_fold is not None:
            pooled = pool_graphs(encode_fold(train), labels, pooling)
        model = train_probe(
            pooled.subset(train), params.epochs, params.learning_rate, params.l2, seed, num_classes
        )
        scores.append(accuracy(model, pooled.subset(test)))
    arr = np.asarray(scores)
    return KFoldResult(float(arr.mean()), float(arr.std()), scores, folds)


def format_report(fields: dict) -> str:
    """``key=value`` lines in insertion order; floats use shortest round-trip form."""
    lines = []
    for key, value in fields.items():
        if isinstance(value, float):
            value = format_real(value)
        elif isinstance(value, (list, tuple)):
            value = ",".join(format_real(v) if isinstance(v, float) else str(v) for v in value)
        lines.append(f"{key}={value}")
    return "\n".join(lines) + "\n"

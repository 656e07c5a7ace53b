"""Fixed-width one-hot node features from arbitrary graph metrics.

Typical use::

    from propenc import parse_tu_dataset, compute_metric, propenc_encode_dataset

    ds = parse_tu_dataset("data/REDDIT-BINARY", "REDDIT-BINARY")
    spec, features = propenc_encode_dataset(compute_metric(ds, "degree"), d=10)
"""

__version__ = "0.1.0"

from propenc.encoder import (
    FeatureMatrix,
    HistogramSpec,
    bin_index,
    concat_features,
    encode_node,
    fit_histogram,
    one_hot_integer,
    propenc_encode,
    propenc_encode_dataset,
    raw_scalar_features,
)
from propenc.graph import (
    Graph,
    GraphDataset,
    gen_barabasi_albert,
    gen_erdos_renyi,
    graph_from_edges,
    neighbors,
    synth_dataset,
)
from propenc.io import parse_tu_dataset, read_npy, write_csv, write_npy, write_tu_dataset
from propenc.metrics import (
    Metric,
    NodePropertyMap,
    SolverSettings,
    betweenness,
    closeness,
    compute_metric,
    degree,
    eigenvector,
    pagerank,
)
from propenc.probe import kfold_eval, pool_graphs, train_probe

__all__ = [
    "FeatureMatrix",
    "Graph",
    "GraphDataset",
    "HistogramSpec",
    "Metric",
    "NodePropertyMap",
    "SolverSettings",
    "betweenness",
    "bin_index",
    "closeness",
    "compute_metric",
    "concat_features",
    "degree",
    "eigenvector",
    "encode_node",
    "fit_histogram",
    "gen_barabasi_albert",
    "gen_erdos_renyi",
    "graph_from_edges",
    "kfold_eval",
    "neighbors",
    "one_hot_integer",
    "pagerank",
    "parse_tu_dataset",
    "pool_graphs",
    "propenc_encode",
    "propenc_encode_dataset",
    "raw_scalar_features",
    "read_npy",
    "synth_dataset",
    "train_probe",
    "write_csv",
    "write_npy",
    "write_tu_dataset",
]

"""Command-line entry point: ``propenc {synth,inspect,encode,eval}``.

Exit codes: 0 success, 2 bad input or contract violation, 3 a solver failed
to converge.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections import Counter
from pathlib import Path

import numpy as np

from propenc import __version__
from propenc.encoder import (
    concat_features,
    fit_histogram,
    one_hot_integer,
    propenc_encode,
    propenc_encode_dataset,
    raw_scalar_features,
)
from propenc.errors import NotConverged, PropEncError
from propenc.graph import synth_dataset
from propenc.io import format_real, parse_tu_dataset, write_csv, write_npy, write_tu_dataset
from propenc.metrics import Metric, SolverSettings, compute_metric
from propenc.probe import Pooling, ProbeParams, format_report, kfold_eval

log = logging.getLogger("propenc")

ENCODERS = ("propenc", "onehot", "raw", "concat")
EXIT_INPUT = 2
EXIT_NOT_CONVERGED = 3


def _metric_list(text: str) -> list[Metric]:
    try:
        return [Metric.parse(t.strip()) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_list(text: str) -> list[int]:
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError(f"bin counts must be positive integers, got {text!r}")
    return values


def _add_dataset_args(p: argparse.ArgumentParser):
    p.add_argument("--dataset", required=True, type=Path, help="directory holding the TU files")
    p.add_argument("--name", required=True, help="dataset name, the DS in DS_A.txt")


def _add_solver_args(p: argparse.ArgumentParser):
    g = p.add_argument_group("solver settings")
    d = SolverSettings()
    g.add_argument("--unnormalized-betweenness", action="store_true")
    g.add_argument("--eig-tol", type=float, default=d.eigenvector_tol)
    g.add_argument("--eig-max-iter", type=int, default=d.eigenvector_max_iter)
    g.add_argument("--pr-damping", type=float, default=d.pagerank_damping)
    g.add_argument("--pr-tol", type=float, default=d.pagerank_tol)
    g.add_argument("--pr-max-iter", type=int, default=d.pagerank_max_iter)
    g.add_argument("--workers", type=int, default=1, help="processes for metric computation")


def _add_encoding_args(p: argparse.ArgumentParser, bins_default: str):
    p.add_argument("--metric", "--metrics", dest="metrics", type=_metric_list, default=[Metric.DEGREE],
                   help="comma-separated metrics: " + ",".join(m.value for m in Metric))
    p.add_argument("--encoder", choices=ENCODERS, default="propenc")
    p.add_argument("--bins", type=_int_list, default=_int_list(bins_default),
                   help="comma-separated bin counts (feature widths)")
    p.add_argument("--fit", choices=("all", "train"), default="all",
                   help="fit the histogram on all graphs or only on each training split")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="propenc", description="Histogram-indexed node features for featureless graphs.")
    parser.add_argument("--version", action="version", version=f"propenc {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a two-class ER-vs-BA dataset in TU format")
    p.add_argument("--n", type=int, default=50, help="nodes per graph")
    p.add_argument("--m", type=int, default=3, help="BA attachment count; ER density matches it")
    p.add_argument("--per-class", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--name", default="SYNTH")
    p.add_argument("--out", required=True, type=Path, help="output directory")

    p = sub.add_parser("inspect", help="dataset statistics and one-hot vs PropEnc widths")
    _add_dataset_args(p)
    p.add_argument("--bins", type=_int_list, default=_int_list("10,20,30,40,50"))

    p = sub.add_parser("encode", help="compute a metric and write node features")
    _add_dataset_args(p)
    _add_encoding_args(p, "10")
    _add_solver_args(p)
    p.add_argument("--out", required=True, type=Path, help="output path stem")
    p.add_argument("--format", choices=("csv", "npy", "both"), default="both")

    p = sub.add_parser("eval", help="k-fold probe accuracy per (metric, encoder, bins)")
    _add_dataset_args(p)
    _add_encoding_args(p, "10")
    _add_solver_args(p)
    p.add_argument("--pool", choices=[m.value for m in Pooling], default="mean")
    p.add_argument("--kfold", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    defaults = ProbeParams()
    p.add_argument("--epochs", type=int, default=defaults.epochs)
    p.add_argument("--lr", type=float, default=defaults.learning_rate)
    p.add_argument("--l2", type=float, default=defaults.l2)
    p.add_argument("--out", type=Path, help="write report records here instead of stdout")
    return parser


def _settings(args) -> SolverSettings:
    return SolverSettings(
        betweenness_normalized=not args.unnormalized_betweenness,
        eigenvector_tol=args.eig_tol,
        eigenvector_max_iter=args.eig_max_iter,
        pagerank_damping=args.pr_damping,
        pagerank_tol=args.pr_tol,
        pagerank_max_iter=args.pr_max_iter,
    )


def _config(args) -> dict:
    """Every option, defaults included, as a flat ordered dict."""
    out = {"tool": "propenc", "version": __version__}
    for key, value in vars(args).items():
        if key == "verbose":
            continue
        if isinstance(value, list):
            value = [getattr(v, "value", v) for v in value]
        out[key] = str(value) if isinstance(value, Path) else value
    return out


def _stem(path: Path) -> Path:
    return path.with_suffix("") if path.suffix in (".csv", ".npy", ".log") else path


def cmd_synth(args) -> int:
    ds = synth_dataset(args.n, args.m, args.per_class, args.seed, args.name)
    write_tu_dataset(ds, args.out, args.name)
    # the log lives in the output directory, so the directory itself is left out
    config = {k: v for k, v in _config(args).items() if k != "out"}
    (Path(args.out) / f"{args.name}_provenance.log").write_text(format_report(config))
    print(format_report({"dataset": args.name, "graphs": len(ds), "out": str(args.out)}), end="")
    return 0


def inspect_report(ds, bins) -> dict:
    degrees = [g.degrees() for g in ds.graphs]
    max_degree = max((int(d.max()) for d in degrees if d.size), default=0)
    onehot_width = max_degree + 1
    classes = Counter(ds.labels)
    report = {
        "dataset": ds.name,
        "graphs": len(ds),
        "nodes": sum(g.num_nodes for g in ds.graphs),
        "edges": sum(g.num_edges for g in ds.graphs),
        "classes": [f"{c}:{classes[c]}" for c in sorted(classes)],
        "max_nodes": max((g.num_nodes for g in ds.graphs), default=0),
        "max_degree": max_degree,
        "onehot_width": onehot_width,
    }
    for d in bins:
        report[f"propenc_width_d{d}"] = d
        report[f"width_reduction_d{d}"] = onehot_width / d
    return report


def cmd_inspect(args) -> int:
    ds = parse_tu_dataset(args.dataset, args.name)
    print(format_report(inspect_report(ds, args.bins)), end="")
    return 0


def _property_maps(ds, metrics, settings, workers) -> dict[Metric, list]:
    maps = {}
    for metric in metrics:
        log.info("computing %s on %d graphs", metric.value, len(ds))
        maps[metric] = compute_metric(ds, metric, settings, workers=workers)
    return maps


def _onehot(maps):
    vmax = int(max(float(m.values.max()) for m in maps if len(m)))
    return one_hot_integer(maps, 0, vmax)


def cmd_encode(args) -> int:
    if len(args.bins) != 1:
        raise PropEncError("encode takes a single --bins value; repeat the command to sweep")
    if args.fit != "all":
        raise PropEncError("encode has no training split; --fit train only applies to eval")
    if args.encoder in ("propenc", "onehot") and len(args.metrics) != 1:
        raise PropEncError(f"--encoder {args.encoder} takes one metric; use --encoder concat for several")
    ds = parse_tu_dataset(args.dataset, args.name)
    maps = _property_maps(ds, args.metrics, _settings(args), args.workers)
    d = args.bins[0]
    provenance = _config(args)
    if args.encoder == "propenc":
        spec, mats = propenc_encode_dataset(maps[args.metrics[0]], d)
        provenance.update({"lo": spec.lo, "hi": spec.hi, "counts": spec.counts.tolist()})
    elif args.encoder == "concat":
        parts = []
        for metric in args.metrics:
            spec, mats = propenc_encode_dataset(maps[metric], d)
            provenance.update({f"{metric.value}_lo": spec.lo, f"{metric.value}_hi": spec.hi,
                               f"{metric.value}_counts": spec.counts.tolist()})
            parts.append(mats)
        mats = concat_features(parts)
    elif args.encoder == "onehot":
        mats = _onehot(maps[args.metrics[0]])
    else:
        mats = raw_scalar_features([maps[m] for m in args.metrics])
    width = mats[0].width if mats else 0
    provenance.update({"width": width, "total_nodes": sum(m.num_rows for m in mats)})

    stem = _stem(args.out)
    stem.parent.mkdir(parents=True, exist_ok=True)
    written = []
    if args.format in ("csv", "both"):
        written.append(write_csv(mats, f"{stem}.csv"))
    if args.format in ("npy", "both"):
        written.append(write_npy(mats, f"{stem}.npy"))
    Path(f"{stem}.log").write_text(format_report(provenance))
    print(format_report({"encoder": args.encoder, "width": width, "files": [str(p) for p in written]}), end="")
    return 0


def _combinations(args):
    """``(metrics, d)`` for each report record, in declared order."""
    if args.encoder in ("propenc", "onehot"):
        for metric in args.metrics:
            if args.encoder == "onehot":
                yield [metric], None
            else:
                for d in args.bins:
                    yield [metric], d
    elif args.encoder == "concat":
        for d in args.bins:
            yield args.metrics, d
    else:
        yield args.metrics, None


def _train_fit_encoder(maps, d):
    def encode_fold(train_index):
        values = np.concatenate([maps[i].values for i in train_index])
        spec = fit_histogram(values, d)
        return [propenc_encode(spec, m) for m in maps]
    return encode_fold


def _concat_fold(encoders):
    def encode_fold(train_index):
        return concat_features([enc(train_index) for enc in encoders])
    return encode_fold


def cmd_eval(args) -> int:
    ds = parse_tu_dataset(args.dataset, args.name)
    maps = _property_maps(ds, args.metrics, _settings(args), args.workers)
    params = ProbeParams(args.epochs, args.lr, args.l2)
    records = []
    for metrics, d in _combinations(args):
        matrices, encode_fold = None, None
        if args.encoder == "propenc":
            if args.fit == "train":
                encode_fold = _train_fit_encoder(maps[metrics[0]], d)
            else:
                matrices = propenc_encode_dataset(maps[metrics[0]], d)[1]
        elif args.encoder == "concat":
            if args.fit == "train":
                encode_fold = _concat_fold([_train_fit_encoder(maps[m], d) for m in metrics])
            else:
                matrices = concat_features([propenc_encode_dataset(maps[m], d)[1] for m in metrics])
        elif args.encoder == "onehot":
            matrices = _onehot(maps[metrics[0]])
        else:
            matrices = raw_scalar_features([maps[m] for m in metrics])
        result = kfold_eval(matrices, ds.labels, args.kfold, args.pool, params, args.seed, encode_fold)
        width = (encode_fold(np.arange(len(ds)))[0] if encode_fold else matrices[0]).width
        records.append(format_report({
            "record": len(records),
            "dataset": ds.name,
            "encoder": args.encoder,
            "metrics": [m.value for m in metrics],
            "d": d if d is not None else "na",
            "width": width,
            "fit": args.fit,
            "pooling": args.pool,
            "k": args.kfold,
            "seed": args.seed,
            "epochs": params.epochs,
            "lr": params.learning_rate,
            "l2": params.l2,
            "mean": result.mean,
            "std": result.std,
            "fold_accuracies": result.fold_accuracies,
        }))
    text = "\n".join(records)
    if args.out:
        stem = _stem(args.out)
        stem.parent.mkdir(parents=True, exist_ok=True)
        Path(f"{stem}.txt").write_text(text)
        Path(f"{stem}.log").write_text(format_report(_config(args)))
    else:
        print(text, end="")
    return 0


COMMANDS = {"synth": cmd_synth, "inspect": cmd_inspect, "encode": cmd_encode, "eval": cmd_eval}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    log.info("config %s", " ".join(f"{k}={format_real(v) if isinstance(v, float) else v}"
                                   for k, v in _config(args).items()))
    try:
        return COMMANDS[args.command](args)
    except NotConverged as exc:
        print(f"propenc: NotConverged: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except (PropEncError, ValueError, OSError) as exc:
        print(f"propenc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

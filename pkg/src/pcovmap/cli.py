"""Batch command-line front end.

Subcommands: fit, transform, predict, sweep, pairs, correlate, plot,
generate.  All commands are deterministic given their inputs and seed and
write locale-independent CSV (17 significant digits).  Exit codes:
0 success, 1 runtime failure, 2 input/config error.
"""

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import analysis, datasets, pcov, serialize, svgplot
from .classifiers import LabelData
from .kernels import KernelSpec, compute_kernel, center_kernel

FLOAT_FMT = "%.17g"


class InputError(Exception):
    """Bad input data or configuration; maps to exit code 2."""


def _fmt(v):
    return FLOAT_FMT % float(v)


# ---------------------------------------------------------------------------
# dataset I/O

def read_table(path):
    """CSV with a required header row; '#' lines are comments."""
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh)
                    if r and not r[0].lstrip().startswith("#")]
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise InputError(f"{path}: empty file")
    header, data = rows[0], rows[1:]
    if not data:
        raise InputError(f"{path}: no data rows")
    return header, data


def load_dataset(path, feature_cols=None, label_cols=None):
    """Load a labeled dataset.

    ``label_cols`` defaults to the last column; ``feature_cols`` to every
    other column.  More than one label column means multilabel.
    """
    header, data = read_table(path)
    if label_cols is None:
        label_cols = [header[-1]]
    for c in label_cols:
        if c not in header:
            raise InputError(f"label column {c!r} not in header")
    if feature_cols is None:
        feature_cols = [c for c in header if c not in label_cols]
    for c in feature_cols:
        if c not in header:
            raise InputError(f"feature column {c!r} not in header")
    overlap = set(feature_cols) & set(label_cols)
    if overlap:
        raise InputError(f"columns {sorted(overlap)} are both features and labels")
    fidx = [header.index(c) for c in feature_cols]
    lidx = [header.index(c) for c in label_cols]
    try:
        X = np.array([[float(r[i]) for i in fidx] for r in data])
        Y = np.array([[int(float(r[i])) for i in lidx] for r in data])
    except (ValueError, IndexError) as exc:
        raise InputError(f"{path}: failed to parse data: {exc}") from exc
    return X, Y, list(feature_cols), list(label_cols)


def load_features(path, feature_cols=None):
    header, data = read_table(path)
    if feature_cols is None:
        feature_cols = header
    fidx = [header.index(c) for c in feature_cols]
    try:
        X = np.array([[float(r[i]) for i in fidx] for r in data])
    except (ValueError, IndexError) as exc:
        raise InputError(f"{path}: failed to parse data: {exc}") from exc
    return X, list(feature_cols)


def resolve_split(n, y_first, args):
    if args.split_file:
        try:
            spec = json.loads(Path(args.split_file).read_text())
            train = np.array(spec["train"], dtype=int)
            test = np.array(spec["test"], dtype=int)
        except (OSError, ValueError, KeyError) as exc:
            raise InputError(f"bad split file: {exc}") from exc
        both = np.concatenate([train, test])
        if len(set(both.tolist())) != n or both.min() < 0 or both.max() >= n:
            raise InputError("split indices must be disjoint and cover the data")
        return train, test
    if args.test_fraction <= 0:
        return np.arange(n), np.array([], dtype=int)
    return datasets.stratified_split(y_first, args.test_fraction,
                                    args.split_seed)


def write_embedding_csv(path, ids, split, Y, label_cols, T):
    k = T.shape[1]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "split"] + label_cols
                   + [f"t{i + 1}" for i in range(k)])
        for i in range(len(ids)):
            w.writerow([ids[i], split[i]]
                       + [int(v) for v in np.atleast_1d(Y[i])]
                       + [_fmt(v) for v in T[i]])


def read_embedding_csv(path):
    header, data = read_table(path)
    tcols = [c for c in header if c.startswith("t") and c[1:].isdigit()]
    lcols = [c for c in header if c not in ("id", "split") and c not in tcols]
    tidx = [header.index(c) for c in tcols]
    lidx = [header.index(c) for c in lcols]
    T = np.array([[float(r[i]) for i in tidx] for r in data])
    Y = np.array([[int(float(r[i])) for i in lidx] for r in data])
    split = ([r[header.index("split")] for r in data]
             if "split" in header else ["train"] * len(data))
    ids = ([r[header.index("id")] for r in data]
           if "id" in header else [str(i) for i in range(len(data))])
    return ids, split, Y, lcols, T


def _kernel_spec(args):
    if not getattr(args, "kernel", None) or args.kernel == "none":
        return None
    return KernelSpec(family=args.kernel,
                      gamma=getattr(args, "gamma", None),
                      degree=getattr(args, "degree", 3),
                      coef0=getattr(args, "coef0", 1.0))


def _classifier_kwargs(args):
    kw = {}
    family = args.classifier
    if family in ("ridge", "logistic"):
        if getattr(args, "regularization", None) is not None:
            kw["lam"] = args.regularization
    if family == "linear-svm" and getattr(args, "svm_c", None) is not None:
        kw["C"] = args.svm_c
    if family == "perceptron":
        kw["seed"] = args.seed
    return kw


# ---------------------------------------------------------------------------
# commands

def cmd_fit(args):
    X, Y, feature_cols, label_cols = load_dataset(
        args.data, args.features, args.labels)
    labels = LabelData.from_array(Y)
    n = X.shape[0]
    train, test = resolve_split(n, labels.labels[:, 0], args)
    cfg = pcov.PcovConfig(alpha=args.alpha, n_components=args.components,
                          route=args.route, mode="classification")
    spec = _kernel_spec(args)
    ytr = LabelData.from_array(labels.labels[train])
    if spec is None:
        model = pcov.fit_pcovx(X[train], ytr, cfg,
                               classifier=args.classifier,
                               classifier_kwargs=_classifier_kwargs(args),
                               standardize=args.standardize)
        T = np.vstack([model.train_embedding,
                       pcov.transform(model, X[test])]) if test.size else \
            model.train_embedding
        order = np.concatenate([train, test]) if test.size else train
        pred_train = pcov.predict(model, X[train]).labels
        pred_test = (pcov.predict(model, X[test]).labels
                     if test.size else np.empty((0, labels.n_labels), int))
    else:
        Ktr = center_kernel(compute_kernel(X[train], X[train], spec))
        model = pcov.fit_kpcovc(Ktr, ytr, cfg, classifier=args.classifier,
                                classifier_kwargs=_classifier_kwargs(args))
        model.metadata["kernel"] = {"family": spec.family,
                                    "gamma": spec.gamma,
                                    "degree": spec.degree,
                                    "coef0": spec.coef0}
        Kte = compute_kernel(X[test], X[train], spec) if test.size else None
        T = (np.vstack([model.train_embedding, pcov.transform(model, Kte)])
             if test.size else model.train_embedding)
        order = np.concatenate([train, test]) if test.size else train
        pred_train = pcov.predict_from_latent(
            model, model.train_embedding).labels
        pred_test = (pcov.predict_from_latent(
            model, pcov.transform(model, Kte)).labels
            if test.size else np.empty((0, labels.n_labels), int))

    # restore dataset row order for the embedding file
    inv = np.argsort(order, kind="stable")
    split_names = np.array(["train"] * train.size + ["test"] * test.size)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_embedding_csv(out / "embedding.csv",
                        [str(i) for i in order[inv]],
                        split_names[inv], Y[order[inv]], label_cols, T[inv])
    serialize.save_model(model, out / "model.json")

    def acc(pred, idx):
        if idx.size == 0:
            return None
        return float(np.mean(np.all(pred == labels.labels[idx], axis=1)))

    metrics = {
        "train_accuracy": acc(pred_train, train),
        "test_accuracy": acc(pred_test, test),
        "eigenvalues": [float(v) for v in model.eigenvalues],
        "alpha": args.alpha,
        "n_components": args.components,
        "classifier": args.classifier,
        "route_used": model.route_used,
        "n_train": int(train.size),
        "n_test": int(test.size),
        "model_metadata": {k: v for k, v in model.metadata.items()},
    }
    (out / "metrics.json").write_text(
        json.dumps(metrics, sort_keys=True, indent=1))
    if not args.quiet:
        print(f"wrote {out}/model.json, embedding.csv, metrics.json")
    return 0


def _load_model_for(args):
    try:
        return serialize.load_model(args.model)
    except OSError as exc:
        raise InputError(f"cannot read model: {exc}") from exc
    except (ValueError, KeyError) as exc:
        raise InputError(f"bad model file: {exc}") from exc


def cmd_transform(args):
    model = _load_model_for(args)
    if model.is_kernel:
        raise InputError("transform of kernel models needs the training data; "
                         "use 'fit' outputs instead")
    X, cols = load_features(args.data, args.features)
    T = pcov.transform(model, X)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "transformed.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id"] + [f"t{i + 1}" for i in range(T.shape[1])])
        for i in range(T.shape[0]):
            w.writerow([i] + [_fmt(v) for v in T[i]])
    if not args.quiet:
        print(f"wrote {path}")
    return 0


def cmd_predict(args):
    model = _load_model_for(args)
    if model.is_kernel:
        raise InputError("predict for kernel models needs the training data; "
                         "use 'fit' outputs instead")
    X, cols = load_features(args.data, args.features)
    pred = pcov.predict(model, X)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "predictions.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id"] + [f"label_{l}" for l in range(pred.n_labels)])
        for i in range(pred.n_samples):
            w.writerow([i] + [int(v) for v in pred.labels[i]])
    if not args.quiet:
        print(f"wrote {path}")
    return 0


def cmd_sweep(args):
    X, Y, feature_cols, label_cols = load_dataset(
        args.data, args.features, args.labels)
    labels = LabelData.from_array(Y)
    if labels.n_labels > 1:
        raise InputError("sweep supports single-label data")
    train, test = resolve_split(X.shape[0], labels.labels[:, 0], args)
    if test.size == 0:
        raise InputError("sweep needs a non-empty test split")
    try:
        alphas = [float(a) for a in args.alphas.split(",")]
    except ValueError as exc:
        raise InputError(f"bad alpha grid: {exc}") from exc
    report = analysis.alpha_sweep(
        X[train], Y[train, 0], X[test], Y[test, 0], alphas,
        n_components=args.components, classifier=args.classifier,
        classifier_kwargs=_classifier_kwargs(args),
        kernel_spec=_kernel_spec(args), standardize=args.standardize)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    doc = {
        "alphas": list(report.alphas),
        "best_alpha": report.best_alpha,
        "baseline_accuracy": report.baseline_accuracy,
        "baseline_confusion": report.baseline_confusion.tolist(),
        "entries": [
            {"alpha": e.alpha, "accuracy": e.accuracy,
             "confusion": e.confusion.tolist()}
            for e in report.entries
        ],
        "metadata": report.metadata,
    }
    (out / "sweep.json").write_text(json.dumps(doc, sort_keys=True, indent=1))
    for e in report.entries:
        P = np.vstack([e.train_embedding[:, :2], e.test_embedding[:, :2]])
        yall = np.concatenate([Y[train, 0], Y[test, 0]])
        op = np.concatenate([np.full(train.size, 0.35),
                             np.full(test.size, 1.0)])
        svg = svgplot.scatter_svg(P, yall, opacity=op,
                                  title=f"alpha={e.alpha:g} "
                                        f"acc={e.accuracy:.3f}")
        (out / f"sweep_alpha_{e.alpha:g}.svg").write_text(svg)
    if not args.quiet:
        print(f"wrote {out}/sweep.json and {len(report.entries)} SVG maps")
    return 0


def cmd_pairs(args):
    ids, split, Y, lcols, T = read_embedding_csv(args.embedding)
    pairs = analysis.boundary_pairs(
        T, Y[:, 0], args.class_a, args.class_b,
        d=args.components, m=args.count,
        unique_samples=args.unique) if args.count > 0 else []
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "pairs.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index_a", "index_b", "class_a", "class_b", "distance"])
        for p in pairs:
            w.writerow([p.index_a, p.index_b, p.class_a, p.class_b,
                        _fmt(p.distance)])
    if not args.quiet:
        print(f"wrote {path} ({len(pairs)} pairs)")
    return 0


def cmd_correlate(args):
    X, cols = load_features(args.data, args.features)
    ids, split, Y, lcols, T = read_embedding_csv(args.embedding)
    if X.shape[0] != T.shape[0]:
        raise InputError("feature and embedding row counts differ")
    table = analysis.latent_feature_correlations(X, T, feature_names=cols)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "correlations.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["feature"] + [f"abs_r_t{d + 1}" for d in table.dims]
                   + ["undefined"])
        for j, name in enumerate(table.feature_names):
            w.writerow([name] + [_fmt(v) for v in table.values[j]]
                       + [int(table.undefined[j].any())])
    if not args.quiet:
        print(f"wrote {path}")
    return 0


def cmd_plot(args):
    ids, split, Y, lcols, T = read_embedding_csv(args.embedding)
    if T.shape[1] < 2:
        raise InputError("plot needs at least 2 latent columns")
    P = T[:, :2]
    bounds = analysis.grid_bounds(P)
    raster = None
    if args.model:
        model = _load_model_for(args)
        if model.n_components == 2:
            raster = analysis.decision_grid(model, bounds,
                                            resolution=args.resolution)
    op = np.array([0.35 if s == "train" else 1.0 for s in split])
    svg = svgplot.scatter_svg(P, Y[:, 0], bounds=bounds, raster=raster,
                              opacity=op, title=args.title)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "map.svg"
    path.write_text(svg)
    if not args.quiet:
        print(f"wrote {path}")
    return 0


def cmd_generate(args):
    if args.kind == "blobs":
        X, y = datasets.make_blobs(n=args.n, sigma=args.sigma, seed=args.seed)
        params = f"blobs n={args.n} sigma={args.sigma} seed={args.seed}"
    elif args.kind == "moons":
        X, y = datasets.make_moons(n=args.n, noise=args.noise, seed=args.seed)
        params = f"moons n={args.n} noise={args.noise} seed={args.seed}"
    elif args.kind == "imbalanced-cliff":
        X, y = datasets.make_imbalanced_cliff(
            n=args.n, positive_rate=args.positive_rate, seed=args.seed)
        params = (f"imbalanced-cliff n={args.n} "
                  f"positive_rate={args.positive_rate} seed={args.seed}")
    else:
        raise InputError(f"unknown dataset kind {args.kind!r}")
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{args.kind}.csv"
    with open(path, "w", newline="") as fh:
        fh.write(f"# generated by pcovmap: {params}\n")
        w = csv.writer(fh)
        w.writerow([f"f{i}" for i in range(X.shape[1])] + ["label"])
        for i in range(X.shape[0]):
            w.writerow([_fmt(v) for v in X[i]] + [int(y[i])])
    if not args.quiet:
        print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------------------
# argument plumbing

def _load_config_defaults(path):
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InputError(f"cannot read config: {exc}") from exc
    if p.suffix == ".toml":
        import tomllib

        try:
            return tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise InputError(f"bad TOML config: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"bad JSON config: {exc}") from exc


def _csv_list(value):
    return [v.strip() for v in value.split(",")] if value else None


def build_parser(config_defaults=None):
    top = argparse.ArgumentParser(
        prog="pcovmap",
        description="Hybrid supervised-unsupervised maps for classification "
                    "data: fit, analyze and plot.")
    top.add_argument("--config", help="TOML or JSON file with option defaults")
    top.add_argument("--seed", type=int, default=0)
    top.add_argument("--out-dir", default=".")
    top.add_argument("--quiet", action="store_true")
    sub = top.add_subparsers(dest="command", required=True)

    def add_manifest(p):
        p.add_argument("--data", required=True)
        p.add_argument("--features", type=_csv_list, default=None,
                       help="comma-separated feature columns")
        p.add_argument("--labels", type=_csv_list, default=None,
                       help="comma-separated label columns (>1 = multilabel)")
        p.add_argument("--test-fraction", type=float, default=0.2)
        p.add_argument("--split-seed", type=int, default=0)
        p.add_argument("--split-file", default=None,
                       help="JSON {train:[...], test:[...]} index file")
        p.add_argument("--standardize", action="store_true")

    def add_pcov(p):
        p.add_argument("--alpha", type=float, default=0.5)
        p.add_argument("--components", type=int, default=2)
        p.add_argument("--route", default="auto",
                       choices=["auto", "sample-space", "feature-space"])
        p.add_argument("--classifier", default="logistic",
                       choices=["ridge", "logistic", "linear-svm",
                                "perceptron"])
        p.add_argument("--regularization", type=float, default=None)
        p.add_argument("--svm-c", type=float, default=None)
        p.add_argument("--kernel", default="none",
                       choices=["none", "linear", "rbf", "polynomial"])
        p.add_argument("--gamma", type=float, default=None)
        p.add_argument("--degree", type=int, default=3)
        p.add_argument("--coef0", type=float, default=1.0)

    p = sub.add_parser("fit", help="fit a map and write model/embedding/metrics")
    add_manifest(p)
    add_pcov(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("transform", help="project rows through a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--features", type=_csv_list, default=None)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("predict", help="predict labels with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--features", type=_csv_list, default=None)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("sweep", help="alpha sweep with test confusion matrices")
    add_manifest(p)
    add_pcov(p)
    p.add_argument("--alphas", default="0,0.25,0.5,0.75,1")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("pairs", help="mine nearest cross-class pairs")
    p.add_argument("--embedding", required=True)
    p.add_argument("--class-a", type=int, required=True)
    p.add_argument("--class-b", type=int, required=True)
    p.add_argument("--components", type=int, default=None)
    p.add_argument("--count", type=int, default=8)
    p.add_argument("--unique", action="store_true")
    p.set_defaults(func=cmd_pairs)

    p = sub.add_parser("correlate",
                       help="feature-to-latent correlation table")
    p.add_argument("--data", required=True)
    p.add_argument("--features", type=_csv_list, default=None)
    p.add_argument("--embedding", required=True)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("plot", help="SVG scatter with decision background")
    p.add_argument("--embedding", required=True)
    p.add_argument("--model", default=None)
    p.add_argument("--resolution", type=int, default=300)
    p.add_argument("--title", default=None)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("generate", help="write a synthetic dataset CSV")
    p.add_argument("--kind", required=True,
                   choices=["blobs", "moons", "imbalanced-cliff"])
    p.add_argument("--n", type=int, default=150)
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--positive-rate", type=float, default=0.05)
    p.set_defaults(func=cmd_generate)

    if config_defaults:
        mapped = {k.replace("-", "_"): v for k, v in config_defaults.items()}
        top.set_defaults(**mapped)
        for action in top._subparsers._group_actions:
            for sp in action.choices.values():
                known = {a.dest for a in sp._actions}
                sp.set_defaults(**{k: v for k, v in mapped.items()
                                   if k in known})
    return top


def _apply_threads_cap():
    cap = os.environ.get("PCOV_THREADS")
    if cap:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS"):
            os.environ.setdefault(var, cap)


def main(argv=None):
    _apply_threads_cap()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    try:
        defaults = (_load_config_defaults(known.config)
                    if known.config else None)
        parser = build_parser(defaults)
        args = parser.parse_args(argv)
        return args.func(args)
    except InputError as exc:
        print(json.dumps({"error": str(exc), "code": 2}), file=sys.stderr)
        return 2
    except ValueError as exc:
        print(json.dumps({"error": str(exc), "code": 2}), file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - unexpected
        print(json.dumps({"error": str(exc), "code": 1}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

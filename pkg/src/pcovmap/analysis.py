"""Interpretation workflows on fitted maps.

Alpha sweeps with test confusion matrices, nearest cross-class pair mining,
feature-to-latent correlation tables and 2-D decision-boundary rasters.
"""

from dataclasses import dataclass, field

import numpy as np

from . import pcov
from .classifiers import LabelData, activate, evidence, fit_classifier
from .kernels import compute_kernel, center_kernel
from .linalg import pearson_correlation

__all__ = [
    "AlphaSweepEntry",
    "AlphaSweepReport",
    "BoundaryPair",
    "CorrelationTable",
    "alpha_sweep",
    "boundary_pairs",
    "latent_feature_correlations",
    "decision_grid",
    "confusion_matrix",
]


def confusion_matrix(y_true, y_pred, n_classes):
    """Counts with rows = true class, columns = predicted class."""
    y_true = np.asarray(y_true).ravel()
    y_pred = np.asarray(y_pred).ravel()
    M = np.zeros((n_classes, n_classes), dtype=int)
    for t, p in zip(y_true, y_pred):
        M[int(t), int(p)] += 1
    return M


def _accuracy(M):
    return float(np.trace(M)) / float(M.sum())


@dataclass
class AlphaSweepEntry:
    alpha: float
    confusion: np.ndarray
    accuracy: float
    train_embedding: np.ndarray
    test_embedding: np.ndarray


@dataclass
class AlphaSweepReport:
    alphas: tuple
    entries: list
    baseline_confusion: np.ndarray
    baseline_accuracy: float
    best_alpha: float
    metadata: dict = field(default_factory=dict)


def _fit_probe(T_train, y_train, probe_family, probe_kwargs):
    return fit_classifier(T_train - T_train.mean(axis=0), y_train,
                          family=probe_family, **(probe_kwargs or {}))


def _probe_predict(probe, T_train_mean, T):
    return activate(evidence(probe, T - T_train_mean)).single()


def alpha_sweep(X_train, y_train, X_test, y_test, alphas,
                n_components=2, classifier="logistic", classifier_kwargs=None,
                probe_family="logistic", probe_kwargs=None,
                kernel_spec=None, standardize=False, rcond=1e-12):
    """Fit one map per alpha on the training split and score a probe
    classifier (default logistic) on the test embedding.

    Also reports the probe's full-dimensional baseline on the raw
    features.  Ties for the best alpha go to the larger value (more
    variance retained).
    """
    alphas = tuple(float(a) for a in alphas)
    if not alphas:
        raise ValueError("need at least one alpha")
    ytr = (y_train if isinstance(y_train, LabelData)
           else LabelData.from_array(y_train))
    yte_arr = np.asarray(
        y_test.single() if isinstance(y_test, LabelData) else y_test
    ).ravel()
    n_classes = ytr.classes_per_label[0]
    if np.any(~np.isin(np.unique(yte_arr), np.arange(n_classes))):
        import warnings

        warnings.warn("test set contains classes absent from training",
                      RuntimeWarning)

    # full-dimensional probe baseline
    Xtr = np.asarray(X_train, dtype=float)
    Xte = np.asarray(X_test, dtype=float)
    mu = Xtr.mean(axis=0)
    base_probe = fit_classifier(Xtr - mu, ytr, family=probe_family,
                                **(probe_kwargs or {}))
    base_pred = activate(evidence(base_probe, Xte - mu)).single()
    base_conf = confusion_matrix(yte_arr, base_pred, n_classes)

    if kernel_spec is not None:
        Ktr = center_kernel(compute_kernel(Xtr, Xtr, kernel_spec))
        Kte_raw = compute_kernel(Xte, Xtr, kernel_spec)

    entries = []
    for a in alphas:
        cfg = pcov.PcovConfig(alpha=a, n_components=n_components,
                              mode="classification", rcond=rcond)
        if kernel_spec is None:
            model = pcov.fit_pcovx(Xtr, ytr, cfg, classifier=classifier,
                                   classifier_kwargs=classifier_kwargs,
                                   standardize=standardize)
            Ttr = model.train_embedding
            Tte = pcov.transform(model, Xte)
        else:
            model = pcov.fit_kpcovc(Ktr, ytr, cfg, classifier=classifier,
                                    classifier_kwargs=classifier_kwargs)
            Ttr = model.train_embedding
            Tte = pcov.transform(model, Kte_raw)
        probe = _fit_probe(Ttr, ytr, probe_family, probe_kwargs)
        pred = _probe_predict(probe, Ttr.mean(axis=0), Tte)
        conf = confusion_matrix(yte_arr, pred, n_classes)
        entries.append(AlphaSweepEntry(
            alpha=a, confusion=conf, accuracy=_accuracy(conf),
            train_embedding=Ttr, test_embedding=Tte,
        ))

    best = max(entries, key=lambda e: (e.accuracy, e.alpha)).alpha
    return AlphaSweepReport(
        alphas=alphas,
        entries=entries,
        baseline_confusion=base_conf,
        baseline_accuracy=_accuracy(base_conf),
        best_alpha=best,
        metadata={"classifier": classifier if isinstance(classifier, str)
                  else "prefit",
                  "probe": probe_family,
                  "kernel": None if kernel_spec is None else kernel_spec.family},
    )


@dataclass(frozen=True)
class BoundaryPair:
    """Nearest cross-class sample pair in the leading latent components."""

    index_a: int
    index_b: int
    class_a: int
    class_b: int
    distance: float


def boundary_pairs(T, labels, class_a, class_b, d=None, m=8,
                   unique_samples=False):
    """The m closest (class_a, class_b) pairs in the first d latent
    components, ascending by distance; ties break on (index_a, index_b).

    ``unique_samples`` greedily drops pairs reusing an already-listed
    sample.
    """
    T = np.atleast_2d(np.asarray(T, dtype=float))
    y = np.asarray(labels.single() if isinstance(labels, LabelData)
                   else labels).ravel()
    if class_a == class_b:
        raise ValueError("classes must differ")
    if d is None:
        d = T.shape[1]
    if d > T.shape[1]:
        raise ValueError(f"d={d} exceeds available components {T.shape[1]}")
    ia = np.where(y == class_a)[0]
    ib = np.where(y == class_b)[0]
    if ia.size == 0 or ib.size == 0:
        raise ValueError("a selected class has no samples")
    A = T[ia, :d]
    B = T[ib, :d]
    D = np.sqrt(np.maximum(
        np.sum(A ** 2, axis=1)[:, None] + np.sum(B ** 2, axis=1)[None, :]
        - 2.0 * A @ B.T, 0.0))
    flat = [
        (float(D[i, j]), int(ia[i]), int(ib[j]))
        for i in range(ia.size) for j in range(ib.size)
    ]
    flat.sort(key=lambda t: (t[0], t[1], t[2]))
    out = []
    used = set()
    for dist, a, b in flat:
        if unique_samples and (a in used or b in used):
            continue
        out.append(BoundaryPair(index_a=a, index_b=b,
                                class_a=int(class_a), class_b=int(class_b),
                                distance=dist))
        used.add(a)
        used.add(b)
        if len(out) == m:
            break
    return out


@dataclass
class CorrelationTable:
    """|Pearson r| between features and latent dimensions."""

    feature_names: list
    dims: tuple
    values: np.ndarray            # (n_features, n_dims), abs correlations
    undefined: np.ndarray         # bool mask of undefined correlations

    def sorted_by_dim(self, dim_index):
        order = np.argsort(self.values[:, dim_index])[::-1]
        return [(self.feature_names[i], self.values[i, dim_index])
                for i in order]


def latent_feature_correlations(X, T, dims=None, feature_names=None):
    """Correlation table between feature columns and latent dimensions.

    Undefined correlations (constant columns) are rendered as 0 with the
    ``undefined`` flag set.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    T = np.atleast_2d(np.asarray(T, dtype=float))
    if X.shape[0] != T.shape[0]:
        raise ValueError("row counts of features and latent differ")
    if dims is None:
        dims = tuple(range(T.shape[1]))
    if feature_names is None:
        feature_names = [f"feature_{j}" for j in range(X.shape[1])]
    vals = np.zeros((X.shape[1], len(dims)))
    undef = np.zeros((X.shape[1], len(dims)), dtype=bool)
    for j in range(X.shape[1]):
        for c, dim in enumerate(dims):
            r = pearson_correlation(X[:, j], T[:, dim])
            if np.isnan(r):
                undef[j, c] = True
            else:
                vals[j, c] = abs(r)
    return CorrelationTable(feature_names=list(feature_names),
                            dims=tuple(dims), values=vals, undefined=undef)


def grid_bounds(T, margin=0.10):
    """Bounding box of a 2-D embedding expanded by ``margin`` per side."""
    T = np.atleast_2d(np.asarray(T, dtype=float))
    lo = T.min(axis=0)
    hi = T.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    return (lo[0] - margin * span[0], hi[0] + margin * span[0],
            lo[1] - margin * span[1], hi[1] + margin * span[1])


def decision_grid(model, bounds, resolution=300):
    """Class-label raster over the 2-D latent plane.

    ``model`` is either a fitted PcovModel (labels via its latent-space
    classifier head) or a probe with ``weights``/``intercept`` acting on
    latent coordinates.  The raster is row-major with the origin at the
    minimum corner.
    """
    x0, x1, y0, y1 = bounds
    if not all(np.isfinite([x0, x1, y0, y1])):
        raise ValueError("bounds must be finite")
    if np.isscalar(resolution):
        rx = ry = int(resolution)
    else:
        rx, ry = (int(r) for r in resolution)
    if rx < 2 or ry < 2:
        raise ValueError("resolution must be >= 2 per axis")
    xs = np.linspace(x0, x1, rx)
    ys = np.linspace(y0, y1, ry)
    XX, YY = np.meshgrid(xs, ys)
    pts = np.column_stack([XX.ravel(), YY.ravel()])
    if isinstance(model, pcov.PcovModel):
        if model.n_components != 2:
            raise ValueError("decision grid requires a 2-D latent space")
        labels = pcov.predict_from_latent(model, pts)
        lab = labels.labels[:, 0]
    else:
        lab = activate(evidence(model, pts)).single()
    return lab.reshape(ry, rx)

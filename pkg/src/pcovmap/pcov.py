"""Principal covariates regression and classification.

The latent map comes from an eigendecomposition of a modified Gram matrix
(sample route)

    K_mod = alpha X X^T + (1 - alpha) Z Z^T

or, equivalently, of a modified covariance matrix (feature route)

    C_mod = alpha X^T X
            + (1 - alpha) (X^T X)^{-1/2} X^T Z Z^T X (X^T X)^{-1/2}

where Z is the (centered, trace-matched) target approximation: classifier
evidence in classification mode, the ridge approximation of Y in regression
mode.  Both routes give the same embedding up to column sign; the feature
route is cheaper when n_features < n_samples.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import classifiers as clf
from .kernels import KernelMatrix, center_kernel
from .linalg import (
    ScalingRecipe,
    apply_recipe,
    center_and_scale,
    eigh_descending,
    invert_recipe,
    psd_power,
)

__all__ = [
    "PcovConfig",
    "PcovModel",
    "ModifiedMatrix",
    "regression_approximation",
    "modified_gram",
    "modified_covariance",
    "multilabel_gram_contribution",
    "fit_pcovx",
    "fit_kpcovc",
    "transform",
    "inverse_transform",
    "predict",
    "predict_scores",
    "predict_from_latent",
]

# Relative singular-value cutoff guarding the latent-to-target fit.
PTZ_GUARD = 1e-8


@dataclass(frozen=True)
class PcovConfig:
    """Fit configuration.

    alpha = 1 reduces to PCA; alpha = 0 uses only the target approximation.
    """

    alpha: float = 0.5
    n_components: int = 2
    route: str = "auto"
    mode: str = "classification"
    rcond: float = 1e-12

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.n_components < 1:
            raise ValueError("n_components must be >= 1")
        if self.route not in ("auto", "sample-space", "feature-space"):
            raise ValueError(f"unknown route {self.route!r}")
        if self.mode not in ("classification", "regression"):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass(frozen=True)
class ModifiedMatrix:
    """The mixed Gram/covariance matrix whose spectrum defines the map."""

    values: np.ndarray
    kind: str  # "gram" | "covariance"
    alpha: float


@dataclass
class PcovModel:
    """Fitted state: projectors, spectrum, scaling and target-fit data."""

    config: PcovConfig
    p_xt: np.ndarray                 # (n_features | n_train, k)
    p_tx: np.ndarray                 # (k, n_features); None for kernel models
    p_tz: np.ndarray                 # (k, evidence width) / (k, n_targets)
    target_intercept: np.ndarray     # evidence (or target) training mean
    eigenvalues: np.ndarray          # retained spectrum, descending
    recipe: ScalingRecipe            # None for kernel models
    route_used: str
    widths_per_label: tuple = None   # classification only
    train_embedding: np.ndarray = None
    classifier: object = None
    is_kernel: bool = False
    kernel_stats: tuple = None       # (training_row_means, training_mean)
    metadata: dict = field(default_factory=dict)

    @property
    def n_components(self):
        return self.p_xt.shape[1]


def regression_approximation(X, Y, lam=0.0, rcond=1e-12):
    """Ridge approximation X (X^T X + lam I)^{-1} X^T Y of centered targets.

    At lam = 0 a rank-deficient Gram matrix falls back to the pseudoinverse.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    if X.shape[0] != Y.shape[0]:
        raise ValueError("row counts of X and Y differ")
    W = _ridge_weights(X, Y, lam, rcond)
    return X @ W


def _ridge_weights(X, Y, lam, rcond=1e-12):
    G = X.T @ X + lam * np.eye(X.shape[1])
    if lam > 0:
        try:
            return np.linalg.solve(G, X.T @ Y)
        except np.linalg.LinAlgError:
            pass
    return psd_power(G, -1.0, rcond=rcond) @ (X.T @ Y)


def modified_gram(X, S, alpha):
    """alpha X X^T + (1 - alpha) S S^T, with the tensor rule for 3-D S."""
    X = np.asarray(X, dtype=float)
    if isinstance(S, clf.EvidenceTensor):
        SS = multilabel_gram_contribution(S)
    else:
        S = np.asarray(S, dtype=float)
        if S.ndim == 3:
            SS = multilabel_gram_contribution(S)
        else:
            SS = S @ S.T
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(SS))):
        raise ValueError("non-finite inputs")
    K = alpha * (X @ X.T) + (1.0 - alpha) * SS
    return ModifiedMatrix(values=0.5 * (K + K.T), kind="gram", alpha=alpha)


def modified_covariance(X, S, alpha, rcond=1e-12):
    """The feature-space twin of :func:`modified_gram` (same nonzero
    spectrum)."""
    X = np.asarray(X, dtype=float)
    if isinstance(S, clf.EvidenceTensor):
        S = S.stacked()
    S = np.asarray(S, dtype=float)
    if S.ndim == 3:
        raise ValueError("stack 3-D evidence before the covariance route")
    C = X.T @ X
    if np.max(np.abs(C)) == 0:
        raise ValueError("X^T X is numerically zero")
    Cih = psd_power(C, -0.5, rcond=rcond)
    XtS = X.T @ S
    M = Cih @ XtS
    Cmod = alpha * C + (1.0 - alpha) * (M @ M.T)
    return ModifiedMatrix(values=0.5 * (Cmod + Cmod.T), kind="covariance", alpha=alpha)


def multilabel_gram_contribution(Z):
    """(Z Z^T)_ij = sum_c sum_l Z[i,c,l] Z[j,c,l] for a 3-D evidence tensor.

    Accumulates one rank-one term per (class, label) pair in a fixed order,
    so the result is bitwise identical to an explicit triple loop.  Ragged
    class counts are handled by summing each label's own class range.
    """
    if isinstance(Z, clf.EvidenceTensor):
        widths = Z.widths_per_label
        S = Z.scores
        if S.ndim == 2:
            S = S[:, :, None]
    else:
        S = np.asarray(Z, dtype=float)
        if S.ndim == 2:
            S = S[:, :, None]
        if S.ndim != 3:
            raise ValueError("expected a 3-D evidence tensor")
        widths = (S.shape[1],) * S.shape[2]
    n = S.shape[0]
    G = np.zeros((n, n))
    for c in range(S.shape[1]):
        for l in range(S.shape[2]):
            if c < widths[l]:
                col = S[:, c, l]
                G += col[:, None] * col[None, :]
    return G


def _trace_match(X_gram_trace, Zc):
    """Scale factor making trace(Z Z^T) equal the reference Gram trace."""
    tz = float(np.sum(Zc * Zc))
    if tz <= 0:
        return 1.0
    return float(np.sqrt(X_gram_trace / tz))


def _positive_rank(evals, rcond):
    lmax = max(evals[0], 0.0)
    if lmax == 0.0:
        return 0
    return int(np.sum(evals > rcond * lmax))


def _clamp_components(k, npos):
    if npos == 0:
        raise ValueError("modified matrix has no positive eigenvalues")
    if k > npos:
        warnings.warn(
            f"n_components={k} exceeds available rank {npos}; clamped",
            RuntimeWarning,
        )
        return npos
    return k


def _fit_ptz(T, evals, target_c, guard=PTZ_GUARD):
    """Least-squares fit of the centered target on the latent coordinates.

    The latent columns are already orthogonal, so the relative cutoff is a
    numerical guard only.
    """
    return np.linalg.lstsq(T, target_c, rcond=guard)[0]


def fit_pcovx(X, targets, config=PcovConfig(), classifier="logistic",
              classifier_kwargs=None, ridge_lambda=0.0, standardize=False):
    """Fit a PCovC (classification) or PCovR (regression) model.

    Parameters
    ----------
    X : (n, f) array_like
        Raw feature matrix; centered (optionally standardized) internally
        and the recipe stored for out-of-sample use.
    targets : labels or real targets
        LabelData / integer array in classification mode (2-D for
        multilabel), real array in regression mode.
    classifier : str or fitted model
        Family name for a fit-on-demand classifier, or an already fitted
        ``LinearClassifierModel`` / ``MultilabelClassifierModel``.
    ridge_lambda : float
        Regularization of the target approximation in regression mode.
    """
    Xc, recipe = center_and_scale(X, standardize=standardize)
    n, f = Xc.shape
    meta = {}

    if config.mode == "classification":
        if isinstance(classifier, (clf.LinearClassifierModel,
                                   clf.MultilabelClassifierModel)):
            model_clf = classifier
        else:
            kwargs = dict(classifier_kwargs or {})
            labels = (targets if isinstance(targets, clf.LabelData)
                      else clf.LabelData.from_array(targets))
            if labels.n_labels > 1:
                model_clf = clf.fit_multilabel(Xc, labels, family=classifier,
                                               **kwargs)
            else:
                model_clf = clf.fit_classifier(Xc, labels, family=classifier,
                                               **kwargs)
        ev = clf.evidence(model_clf, Xc)
        Z = ev.stacked()
        widths = ev.widths_per_label
        if isinstance(model_clf, clf.MultilabelClassifierModel):
            W = np.hstack([m.weights for m in model_clf.models])
            meta["classifier_family"] = model_clf.models[0].family
        else:
            W = model_clf.weights
            meta["classifier_family"] = model_clf.family
            meta["classifier_converged"] = model_clf.converged
    else:
        Y = np.asarray(targets, dtype=float)
        if Y.ndim == 1:
            Y = Y[:, None]
        y_mean = Y.mean(axis=0)
        Yc = Y - y_mean
        W = _ridge_weights(Xc, Yc, ridge_lambda, config.rcond)
        Z = Xc @ W
        widths = None
        model_clf = None
        meta["ridge_lambda"] = ridge_lambda

    z_mean = Z.mean(axis=0)
    Zc = Z - z_mean
    # The centered evidence is exactly Xc @ W, so scaling Z and W together
    # keeps the projector identities intact.
    gram_trace = float(np.sum(Xc * Xc))
    s = _trace_match(gram_trace, Zc)
    Zs = s * Zc
    Ws = s * W
    meta["evidence_scale"] = s

    route = config.route
    if route == "auto":
        route = "sample-space" if f > n else "feature-space"

    if route == "sample-space":
        Kmod = config.alpha * (Xc @ Xc.T) + (1 - config.alpha) * (Zs @ Zs.T)
        eig = eigh_descending(Kmod)
        npos = _positive_rank(eig.eigenvalues, config.rcond)
        k = _clamp_components(config.n_components, npos)
        U = eig.eigenvectors[:, :k]
        lam = eig.eigenvalues[:k]
        isq = 1.0 / np.sqrt(lam)
        p_xt = (config.alpha * Xc.T + (1 - config.alpha) * (Ws @ Zs.T)) @ (U * isq)
        p_tx = (U * isq).T @ Xc
    else:
        C = Xc.T @ Xc
        Cih = psd_power(C, -0.5, rcond=config.rcond)
        Ch = psd_power(C, 0.5, rcond=config.rcond)
        M = Cih @ (Xc.T @ Zs)
        Cmod = config.alpha * C + (1 - config.alpha) * (M @ M.T)
        eig = eigh_descending(0.5 * (Cmod + Cmod.T))
        npos = _positive_rank(eig.eigenvalues, config.rcond)
        k = _clamp_components(config.n_components, npos)
        U = eig.eigenvectors[:, :k]
        lam = eig.eigenvalues[:k]
        p_xt = Cih @ (U * np.sqrt(lam))
        p_tx = (U * (1.0 / np.sqrt(lam))).T @ Ch

    T = Xc @ p_xt
    if config.mode == "classification":
        p_tz = _fit_ptz(T, lam, Zc)
        intercept = z_mean
    else:
        p_tz = _fit_ptz(T, lam, Zc)  # target approximation, centered
        intercept = y_mean

    return PcovModel(
        config=config,
        p_xt=p_xt,
        p_tx=p_tx,
        p_tz=p_tz,
        target_intercept=intercept,
        eigenvalues=lam,
        recipe=recipe,
        route_used=route,
        widths_per_label=widths,
        train_embedding=T,
        classifier=model_clf,
        metadata=meta,
    )


def fit_kpcovc(K, targets, config=PcovConfig(), classifier="logistic",
               classifier_kwargs=None):
    """Kernelized PCovC on a centered training kernel.

    The classifier is fit on the kernel rows as features, giving evidence
    Z = K W + b; the mixed matrix is alpha K + (1 - alpha) Z Z^T and
    out-of-sample points are projected through the centered cross kernel.
    """
    if not isinstance(K, KernelMatrix):
        K = KernelMatrix(values=np.asarray(K, dtype=float))
    if not K.is_square:
        raise ValueError("training kernel must be square")
    if not K.is_centered:
        K = center_kernel(K)
    Kv = K.values
    eig_check = eigh_descending(Kv)
    if eig_check.eigenvalues[-1] < -1e-8 * max(eig_check.eigenvalues[0], 1.0):
        raise ValueError("kernel is not PSD within tolerance")

    labels = (targets if isinstance(targets, clf.LabelData)
              else clf.LabelData.from_array(targets))
    kwargs = dict(classifier_kwargs or {})
    if labels.n_labels > 1:
        model_clf = clf.fit_multilabel(Kv, labels, family=classifier, **kwargs)
        W = np.hstack([m.weights for m in model_clf.models])
    else:
        model_clf = clf.fit_classifier(Kv, labels, family=classifier, **kwargs)
        W = model_clf.weights
    ev = clf.evidence(model_clf, Kv)
    Z = ev.stacked()
    widths = ev.widths_per_label

    z_mean = Z.mean(axis=0)
    Zc = Z - z_mean
    s = _trace_match(float(np.trace(Kv)), Zc)
    Zs = s * Zc
    Ws = s * W

    Kmod = config.alpha * Kv + (1 - config.alpha) * (Zs @ Zs.T)
    eig = eigh_descending(Kmod)
    npos = _positive_rank(eig.eigenvalues, config.rcond)
    k = _clamp_components(config.n_components, npos)
    U = eig.eigenvectors[:, :k]
    lam = eig.eigenvalues[:k]
    isq = 1.0 / np.sqrt(lam)
    n = Kv.shape[0]
    p_kt = (config.alpha * np.eye(n) + (1 - config.alpha) * (Ws @ Zs.T)) @ (U * isq)

    T = Kv @ p_kt
    p_tz = _fit_ptz(T, lam, Zc)

    return PcovModel(
        config=config,
        p_xt=p_kt,
        p_tx=None,
        p_tz=p_tz,
        target_intercept=z_mean,
        eigenvalues=lam,
        recipe=None,
        route_used="kernel",
        widths_per_label=widths,
        train_embedding=T,
        classifier=model_clf,
        is_kernel=True,
        kernel_stats=(K.training_row_means, K.training_mean),
        metadata={"evidence_scale": s,
                  "classifier_family": classifier
                  if isinstance(classifier, str) else "prefit"},
    )


def _kernel_rows(model, K_new):
    if isinstance(K_new, KernelMatrix):
        if K_new.is_centered:
            return K_new.values
        row_means, mean_all = model.kernel_stats
        stats = KernelMatrix(values=np.empty((0, 0)), is_centered=True,
                             training_row_means=row_means,
                             training_mean=mean_all)
        return center_kernel(K_new, training_stats=stats).values
    V = np.atleast_2d(np.asarray(K_new, dtype=float))
    row_means, mean_all = model.kernel_stats
    stats = KernelMatrix(values=np.empty((0, 0)), is_centered=True,
                         training_row_means=row_means, training_mean=mean_all)
    return center_kernel(KernelMatrix(values=V), training_stats=stats).values


def transform(model, X_new):
    """Latent coordinates of new rows (kernel models take kernel rows)."""
    if model.is_kernel:
        return _kernel_rows(model, X_new) @ model.p_xt
    Xc = apply_recipe(X_new, model.recipe)
    if Xc.shape[1] != model.p_xt.shape[0]:
        raise ValueError("feature count does not match the fitted model")
    return Xc @ model.p_xt


def inverse_transform(model, T):
    """Reconstruct feature rows from latent coordinates."""
    if model.is_kernel:
        raise ValueError("kernel models have no feature-space reconstruction")
    T = np.atleast_2d(np.asarray(T, dtype=float))
    if T.shape[1] != model.p_tx.shape[0]:
        raise ValueError("latent dimension does not match the fitted model")
    return invert_recipe(T @ model.p_tx, model.recipe)


def predict_scores(model, X_new):
    """Latent-space target scores T P_TZ + intercept."""
    T = transform(model, X_new)
    return T @ model.p_tz + model.target_intercept


def predict_from_latent(model, T):
    """Predicted labels/targets for points given directly in latent space."""
    T = np.atleast_2d(np.asarray(T, dtype=float))
    scores = T @ model.p_tz + model.target_intercept
    if model.config.mode == "regression":
        return scores
    return _activate_scores(model, scores)


def predict(model, X_new):
    """Predicted labels (classification) or real targets (regression)."""
    scores = predict_scores(model, X_new)
    if model.config.mode == "regression":
        return scores
    return _activate_scores(model, scores)


def _activate_scores(model, scores):
    widths = model.widths_per_label
    if widths is None:
        raise ValueError("model was not fit in classification mode")
    if len(widths) == 1:
        ev = clf.EvidenceTensor(scores=scores, widths_per_label=widths)
    else:
        maxw = max(widths)
        tens = np.zeros((scores.shape[0], maxw, len(widths)))
        ofs = 0
        for l, w in enumerate(widths):
            tens[:, :w, l] = scores[:, ofs:ofs + w]
            ofs += w
        ev = clf.EvidenceTensor(scores=tens, widths_per_label=widths)
    return clf.activate(ev)

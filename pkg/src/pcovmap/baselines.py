"""Reference methods for comparison maps: PCA/KPCA, LDA/KDA, exact SHAP.

These are implemented independently of the hybrid fitting path so
limit-identity tests compare two genuinely different computations.
"""

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .classifiers import LabelData
from .kernels import KernelMatrix
from .linalg import eigh_descending

__all__ = [
    "PcaModel",
    "LdaModel",
    "ShapResult",
    "fit_pca",
    "fit_kpca",
    "fit_lda",
    "fit_kda",
    "lda_discriminant_scores",
    "exact_shap",
]


@dataclass
class PcaModel:
    """Top-k principal directions of a centered feature matrix."""

    components: np.ndarray        # (n_features, k), orthonormal columns
    eigenvalues: np.ndarray       # of X^T X, descending, length k
    all_eigenvalues: np.ndarray   # full spectrum of X^T X
    scores: np.ndarray            # (n_samples, k) training projection

    def transform(self, X):
        return np.atleast_2d(np.asarray(X, dtype=float)) @ self.components

    def inverse_transform(self, T):
        # orthonormal loading matrix: P_TX = P_XT^T
        return np.atleast_2d(np.asarray(T, dtype=float)) @ self.components.T


def fit_pca(X, k):
    """PCA of a centered feature matrix via the covariance eigenproblem."""
    X = np.asarray(X, dtype=float)
    eig = eigh_descending(X.T @ X)
    rank = int(np.sum(eig.eigenvalues > 1e-12 * max(eig.eigenvalues[0], 0.0)))
    if k > rank:
        warnings.warn(f"k={k} exceeds numerical rank {rank}; clamped",
                      RuntimeWarning)
        k = rank
    P = eig.eigenvectors[:, :k]
    return PcaModel(
        components=P,
        eigenvalues=eig.eigenvalues[:k],
        all_eigenvalues=eig.eigenvalues,
        scores=X @ P,
    )


@dataclass
class KpcaModel:
    """Kernel PCA scores and out-of-sample projection vectors."""

    alphas: np.ndarray            # (n_train, k): U_k Lambda_k^{-1/2}
    eigenvalues: np.ndarray
    scores: np.ndarray            # (n_train, k)

    def transform(self, K_rows_centered):
        V = (K_rows_centered.values
             if isinstance(K_rows_centered, KernelMatrix) else
             np.atleast_2d(np.asarray(K_rows_centered, dtype=float)))
        return V @ self.alphas


def fit_kpca(K_centered, k):
    """Kernel PCA of a centered training kernel."""
    V = (K_centered.values if isinstance(K_centered, KernelMatrix)
         else np.asarray(K_centered, dtype=float))
    eig = eigh_descending(V)
    rank = int(np.sum(eig.eigenvalues > 1e-12 * max(eig.eigenvalues[0], 0.0)))
    if k > rank:
        warnings.warn(f"k={k} exceeds numerical rank {rank}; clamped",
                      RuntimeWarning)
        k = rank
    U = eig.eigenvectors[:, :k]
    lam = eig.eigenvalues[:k]
    alphas = U * (1.0 / np.sqrt(lam))
    return KpcaModel(alphas=alphas, eigenvalues=lam, scores=U * np.sqrt(lam))


@dataclass
class LdaModel:
    """Fisher discriminant subspace plus the Gaussian discriminant pieces."""

    class_means: np.ndarray       # (n_classes, n_features)
    within_scatter: np.ndarray
    between_scatter: np.ndarray
    projector: np.ndarray         # (n_features, <= n_classes - 1)
    priors: np.ndarray
    pooled_cov_inv: np.ndarray

    def transform(self, X):
        return np.atleast_2d(np.asarray(X, dtype=float)) @ self.projector


def _scatter_matrices(X, y, n_classes):
    mean_all = X.mean(axis=0)
    f = X.shape[1]
    SB = np.zeros((f, f))
    SW = np.zeros((f, f))
    means = np.zeros((n_classes, f))
    counts = np.zeros(n_classes)
    for c in range(n_classes):
        Xc = X[y == c]
        counts[c] = Xc.shape[0]
        mc = Xc.mean(axis=0)
        means[c] = mc
        d = mc - mean_all
        SB += Xc.shape[0] * np.outer(d, d)
        R = Xc - mc
        SW += R.T @ R
    return means, counts, SB, SW


def fit_lda(X, y, k=None, shrinkage=None):
    """LDA: leading generalized eigenvectors of the scatter pair.

    The within-class scatter is shrunk by eps*I with
    eps = 1e-8 * trace(S_W)/n_features to keep the generalized problem
    well posed; the projector has at most n_classes - 1 columns.
    """
    X = np.asarray(X, dtype=float)
    labels = y if isinstance(y, LabelData) else LabelData.from_array(y)
    yv = labels.single()
    n_classes = labels.classes_per_label[0]
    counts = np.bincount(yv, minlength=n_classes)
    if np.any(counts < 2):
        raise ValueError("every class needs at least 2 samples")
    means, counts, SB, SW = _scatter_matrices(X, yv, n_classes)
    f = X.shape[1]
    if shrinkage is None:
        shrinkage = 1e-8 * np.trace(SW) / f
        if shrinkage == 0:
            shrinkage = 1e-8
    SWr = SW + shrinkage * np.eye(f)
    kmax = n_classes - 1
    if k is None:
        k = kmax
    if k > kmax:
        warnings.warn(f"k={k} exceeds n_classes-1={kmax}; clamped",
                      RuntimeWarning)
        k = kmax
    evals, evecs = scipy.linalg.eigh(0.5 * (SB + SB.T), 0.5 * (SWr + SWr.T))
    order = np.argsort(evals)[::-1]
    P = evecs[:, order[:k]]
    # deterministic column signs, consistent with eigh_descending
    idx = np.argmax(np.abs(P), axis=0)
    signs = np.sign(P[idx, np.arange(P.shape[1])])
    signs[signs == 0] = 1.0
    P = P * signs
    n = X.shape[0]
    pooled = SWr / max(n - n_classes, 1)
    return LdaModel(
        class_means=means,
        within_scatter=SW,
        between_scatter=SB,
        projector=P,
        priors=counts / n,
        pooled_cov_inv=np.linalg.inv(pooled),
    )


def lda_discriminant_scores(model, X):
    """Per-class linear discriminant log-scores (shared covariance)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Si = model.pooled_cov_inv
    scores = np.zeros((X.shape[0], model.class_means.shape[0]))
    for c, mu in enumerate(model.class_means):
        scores[:, c] = (X @ Si @ mu - 0.5 * mu @ Si @ mu
                        + np.log(model.priors[c]))
    return scores


def fit_kda(K_centered, y, k=None, shrinkage=None):
    """Kernel discriminant analysis: LDA on the centered kernel rows.

    The returned projector lives in sample space; new points are mapped
    through their centered cross kernel.
    """
    V = (K_centered.values if isinstance(K_centered, KernelMatrix)
         else np.asarray(K_centered, dtype=float))
    return fit_lda(V, y, k=k, shrinkage=shrinkage)


@dataclass(frozen=True)
class ShapResult:
    """Exact Shapley attribution of one prediction."""

    values: np.ndarray
    base_value: float
    model_output: float


def exact_shap(model_evaluator, x, background, max_features=16):
    """Exact Shapley values by exhaustive subset enumeration.

    The value function mean-imputes absent features from the background
    set, so for a linear model the result is w_i (x_i - mean_i) in closed
    form.  Feature counts above ``max_features`` are rejected.
    """
    x = np.asarray(x, dtype=float).ravel()
    background = np.atleast_2d(np.asarray(background, dtype=float))
    nf = x.size
    if background.shape[1] != nf:
        raise ValueError("background feature count does not match x")
    if nf > max_features:
        raise ValueError(f"{nf} features exceeds exhaustive budget "
                         f"{max_features}")
    mu = background.mean(axis=0)

    # value of every coalition, indexed by bitmask
    values = np.empty(1 << nf)
    row = np.empty(nf)
    for mask in range(1 << nf):
        for j in range(nf):
            row[j] = x[j] if (mask >> j) & 1 else mu[j]
        values[mask] = float(model_evaluator(row.copy()))

    fact = [math.factorial(i) for i in range(nf + 1)]
    shap = np.zeros(nf)
    others = list(range(nf))
    for i in range(nf):
        rest = [j for j in others if j != i]
        for r in range(nf):
            w = fact[r] * fact[nf - r - 1] / fact[nf]
            for S in itertools.combinations(rest, r):
                mask = 0
                for j in S:
                    mask |= 1 << j
                shap[i] += w * (values[mask | (1 << i)] - values[mask])
    base = values[0]
    return ShapResult(values=shap, base_value=base,
                      model_output=float(values[(1 << nf) - 1]))

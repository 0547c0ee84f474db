"""Kernel construction and centering for KPCA, KDA and kernel PCovC.

Rectangular kernels (out-of-sample rows against the training set) are
centered with training statistics only, so test points never influence the
fitted map.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = ["KernelSpec", "KernelMatrix", "compute_kernel", "center_kernel"]


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family and hyperparameters.

    ``gamma=None`` means 1/n_features, resolved when the kernel is computed.
    """

    family: str = "linear"
    gamma: float = None
    degree: int = 3
    coef0: float = 1.0

    def __post_init__(self):
        if self.family not in ("linear", "rbf", "polynomial"):
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.gamma is not None and self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.degree < 1:
            raise ValueError("degree must be >= 1")


@dataclass
class KernelMatrix:
    """Kernel values for a set of rows against the training set."""

    values: np.ndarray
    is_centered: bool = False
    training_row_means: np.ndarray = None
    training_mean: float = None

    @property
    def is_square(self):
        return self.values.shape[0] == self.values.shape[1]


def compute_kernel(X_rows, X_train, spec=KernelSpec()):
    """Kernel matrix between ``X_rows`` and the training rows.

    linear: x.y; rbf: exp(-gamma ||x-y||^2); polynomial:
    (gamma x.y + coef0)^degree.
    """
    A = np.atleast_2d(np.asarray(X_rows, dtype=float))
    B = np.atleast_2d(np.asarray(X_train, dtype=float))
    if A.shape[1] != B.shape[1]:
        raise ValueError("feature counts differ")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
        raise ValueError("non-finite entries in kernel inputs")
    gamma = spec.gamma if spec.gamma is not None else 1.0 / A.shape[1]
    if spec.family == "linear":
        K = A @ B.T
    elif spec.family == "rbf":
        sq = (
            np.sum(A ** 2, axis=1)[:, None]
            + np.sum(B ** 2, axis=1)[None, :]
            - 2.0 * A @ B.T
        )
        np.maximum(sq, 0.0, out=sq)
        if A.shape == B.shape and (A is B or np.array_equal(A, B)):
            np.fill_diagonal(sq, 0.0)  # exact unit self-similarity
        K = np.exp(-gamma * sq)
    else:
        K = (gamma * (A @ B.T) + spec.coef0) ** spec.degree
    return KernelMatrix(values=K)


def center_kernel(K, training_stats=None):
    """Double-center a training kernel, or center out-of-sample rows with
    stored training statistics.

    For a square training kernel: K - 1K/n - K1/n + 1K1/n^2, storing the
    training column means for later out-of-sample centering.  For a
    rectangular kernel, pass the centered training KernelMatrix (or the
    matrix whose statistics to reuse) as ``training_stats``.
    """
    V = K.values
    if training_stats is not None:
        if training_stats.training_row_means is None:
            raise ValueError("training kernel statistics not available")
        col_means = training_stats.training_row_means
        mean_all = training_stats.training_mean
        row_means = V.mean(axis=1, keepdims=True)
        Vc = V - row_means - col_means[None, :] + mean_all
        return KernelMatrix(
            values=Vc,
            is_centered=True,
            training_row_means=col_means,
            training_mean=mean_all,
        )
    if not K.is_square:
        raise ValueError(
            "rectangular kernel needs training statistics for centering"
        )
    n = V.shape[0]
    col_means = V.mean(axis=0)
    mean_all = V.mean()
    Vc = V - col_means[None, :] - V.mean(axis=1, keepdims=True) + mean_all
    Vc = 0.5 * (Vc + Vc.T)
    return KernelMatrix(
        values=Vc,
        is_centered=True,
        training_row_means=col_means,
        training_mean=mean_all,
    )

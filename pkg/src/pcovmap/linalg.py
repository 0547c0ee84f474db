"""Dense symmetric linear algebra primitives shared by every other module.

All routines work on plain float64 numpy arrays and are pure functions:
nothing here keeps state, so everything is safe to call from multiple
threads.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "SymmetricEigen",
    "ScalingRecipe",
    "eigh_descending",
    "psd_power",
    "center_and_scale",
    "apply_recipe",
    "invert_recipe",
    "pearson_correlation",
]

# Relative eigenvalue cutoff used when a routine needs to decide numerical rank.
DEFAULT_RCOND = 1e-12

# Relative asymmetry we silently repair with (A + A.T) / 2.
SYMMETRY_RTOL = 1e-8


@dataclass(frozen=True)
class SymmetricEigen:
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    ``eigenvectors[:, i]`` belongs to ``eigenvalues[i]``; each column is unit
    norm and its largest-magnitude entry is positive.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class ScalingRecipe:
    """Column centering/scaling statistics of a training feature matrix.

    Out-of-sample rows must be transformed with these training statistics,
    never with their own.
    """

    column_means: np.ndarray
    column_scales: np.ndarray
    global_scale: float = 1.0


def _check_finite(A, name="input"):
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains non-finite entries")


def _canonicalize_signs(vectors):
    """Flip eigenvector columns so the largest-|entry| of each is positive."""
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def symmetrize(A):
    """Return (A + A.T) / 2, rejecting matrices that are badly asymmetric."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    _check_finite(A)
    scale = np.max(np.abs(A))
    if scale > 0:
        asym = np.max(np.abs(A - A.T)) / scale
        if asym > SYMMETRY_RTOL:
            raise ValueError(f"matrix asymmetry {asym:.3e} exceeds tolerance")
    return 0.5 * (A + A.T)


def eigh_descending(A):
    """Full eigendecomposition of a symmetric matrix, eigenvalues descending.

    Parameters
    ----------
    A : (n, n) array_like
        Symmetric up to a relative asymmetry of 1e-8 (symmetrized internally).

    Returns
    -------
    SymmetricEigen
    """
    A = symmetrize(A)
    try:
        evals, evecs = scipy.linalg.eigh(A)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise ValueError(f"eigendecomposition failed to converge: {exc}") from exc
    order = np.argsort(evals)[::-1]
    evals = evals[order]
    evecs = _canonicalize_signs(evecs[:, order])
    return SymmetricEigen(eigenvalues=evals, eigenvectors=evecs)


def psd_power(A, p, rcond=DEFAULT_RCOND):
    """Matrix power of a symmetric PSD matrix via its eigendecomposition.

    Eigenvalues below ``rcond * lambda_max`` are treated as exactly zero:
    excluded for negative powers, mapped to zero for positive ones.

    Parameters
    ----------
    A : (n, n) array_like
        PSD up to a -1e-8 * lambda_max tolerance.
    p : float
        Exponent; 1/2 and -1/2 are the common cases.
    rcond : float
        Relative eigenvalue cutoff.
    """
    eig = eigh_descending(A)
    lam = eig.eigenvalues
    lmax = max(lam[0], 0.0)
    if lam[-1] < -1e-8 * max(lmax, 1.0):
        raise ValueError(f"matrix is not PSD: min eigenvalue {lam[-1]:.3e}")
    keep = lam > rcond * lmax
    if p < 0 and not np.any(keep):
        raise ValueError("matrix is numerically zero; negative power undefined")
    powered = np.zeros_like(lam)
    powered[keep] = lam[keep] ** p
    U = eig.eigenvectors
    out = (U * powered) @ U.T
    return 0.5 * (out + out.T)


def center_and_scale(X, standardize=False):
    """Column-center (and optionally standardize) a feature matrix.

    Zero-variance columns are left at mean zero with scale 1 so feature
    indices stay stable for downstream correlation analysis.

    Returns
    -------
    (X_transformed, ScalingRecipe)
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] < 2:
        raise ValueError("need at least 2 rows to center")
    _check_finite(X, "feature matrix")
    means = X.mean(axis=0)
    if standardize:
        scales = X.std(axis=0, ddof=0)
        scales = np.where(scales > 0, scales, 1.0)
    else:
        scales = np.ones(X.shape[1])
    recipe = ScalingRecipe(column_means=means, column_scales=scales)
    return (X - means) / scales, recipe


def apply_recipe(X, recipe):
    """Transform rows with stored training statistics."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != recipe.column_means.shape[0]:
        raise ValueError(
            f"feature count {X.shape[1]} does not match recipe "
            f"({recipe.column_means.shape[0]})"
        )
    return (X - recipe.column_means) / recipe.column_scales * recipe.global_scale


def invert_recipe(X, recipe):
    """Undo :func:`apply_recipe`."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return X / recipe.global_scale * recipe.column_scales + recipe.column_means


def pearson_correlation(a, b):
    """Pearson correlation coefficient of two equal-length vectors.

    Returns NaN when either vector is constant (correlation undefined);
    callers that need a number should treat NaN as 0 and keep a flag.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise ValueError("vectors must have equal length")
    if a.size < 2:
        raise ValueError("need at least 2 observations")
    _check_finite(a, "a")
    _check_finite(b, "b")
    da = a - a.mean()
    db = b - b.mean()
    na = np.linalg.norm(da)
    nb = np.linalg.norm(db)
    if na == 0 or nb == 0:
        return float("nan")
    r = float(da @ db / (na * nb))
    return min(1.0, max(-1.0, r))

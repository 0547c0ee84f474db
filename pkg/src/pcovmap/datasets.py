"""Bundled data and deterministic synthetic generators.

The Iris table (public domain) ships with the package; the generators
produce desk-scale stand-ins for the kinds of datasets the analysis
workflows are aimed at.
"""

from importlib import resources

import numpy as np

__all__ = [
    "load_iris",
    "make_blobs",
    "make_moons",
    "make_imbalanced_cliff",
    "stratified_split",
]


def load_iris():
    """The bundled 150 x 4 Iris table.

    Returns
    -------
    (X, y, feature_names)
    """
    text = (resources.files("pcovmap") / "data" / "iris.csv").read_text()
    lines = text.strip().split("\n")
    names = lines[0].split(",")[:-1]
    rows = [line.split(",") for line in lines[1:]]
    X = np.array([[float(v) for v in r[:-1]] for r in rows])
    y = np.array([int(r[-1]) for r in rows])
    return X, y, names


def make_blobs(n=150, centers=((0.0, 0.0), (3.0, 0.0), (0.0, 3.0)),
               sigma=0.5, seed=0):
    """Balanced isotropic Gaussian blobs."""
    rng = np.random.default_rng(seed)
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    k = centers.shape[0]
    counts = [n // k + (1 if i < n % k else 0) for i in range(k)]
    X = []
    y = []
    for c, cnt in enumerate(counts):
        X.append(centers[c] + sigma * rng.standard_normal((cnt, centers.shape[1])))
        y.extend([c] * cnt)
    return np.vstack(X), np.array(y)


def make_moons(n=400, noise=0.05, seed=0):
    """Two interleaved half-circles, not linearly separable."""
    rng = np.random.default_rng(seed)
    n0 = n // 2
    n1 = n - n0
    t0 = np.pi * rng.random(n0)
    t1 = np.pi * rng.random(n1)
    X0 = np.column_stack([np.cos(t0), np.sin(t0)])
    X1 = np.column_stack([1.0 - np.cos(t1), 0.5 - np.sin(t1)])
    X = np.vstack([X0, X1])
    if noise > 0:
        X = X + noise * rng.standard_normal(X.shape)
    y = np.concatenate([np.zeros(n0, dtype=int), np.ones(n1, dtype=int)])
    return X, y


def make_imbalanced_cliff(n=400, n_noise=10, noise_scale=5.0, shift=2.0,
                          informative_scale=0.5, positive_rate=0.05, seed=0):
    """Rare positive class separated along a low-variance direction.

    High-variance noise columns dominate the spectrum, so a pure-variance
    map buries the informative axis; the positive class sits ``shift``
    away along a quiet feature.  Positive count is round(rate * n).
    ``noise_scale`` may be a sequence giving one scale per noise column
    (overriding ``n_noise``), e.g. one dominant direction plus weak ones.
    """
    rng = np.random.default_rng(seed)
    n_pos = int(round(positive_rate * n))
    y = np.zeros(n, dtype=int)
    y[:n_pos] = 1
    scales = np.atleast_1d(np.asarray(noise_scale, dtype=float))
    if scales.size > 1:
        n_noise = scales.size
    noise = rng.standard_normal((n, n_noise)) * (
        scales if scales.size > 1 else scales[0])
    info = informative_scale * rng.standard_normal((n, 2))
    info[:n_pos, 0] += shift
    X = np.hstack([noise, info])
    perm = rng.permutation(n)
    return X[perm], y[perm]


def stratified_split(y, test_fraction=0.2, seed=0):
    """Deterministic stratified train/test index split."""
    y = np.asarray(y).ravel()
    rng = np.random.default_rng(seed)
    train_idx = []
    test_idx = []
    for c in np.unique(y):
        idx = np.where(y == c)[0]
        idx = idx[rng.permutation(idx.size)]
        n_test = int(round(test_fraction * idx.size))
        test_idx.extend(idx[:n_test].tolist())
        train_idx.extend(idx[n_test:].tolist())
    return np.array(sorted(train_idx)), np.array(sorted(test_idx))

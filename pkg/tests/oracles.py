"""Independent slow oracles used to cross-check the library.

Everything here is deliberately naive (power iteration, subgradient
descent, permutation averaging, explicit loops) and shares no code with
the implementation paths it checks.
"""

import itertools
import math

import numpy as np


def power_iteration_eigh(A, tol=1e-12, max_iter=200000, seed=123):
    """All eigenpairs of a symmetric matrix by shifted power iteration
    with deflation, eigenvalues descending."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    shift = np.linalg.norm(A, ord="fro") + 1.0
    B = A + shift * np.eye(n)  # PSD with the same eigenvectors
    rng = np.random.default_rng(seed)
    evals = []
    evecs = []
    for _ in range(n):
        v = rng.standard_normal(n)
        v /= np.linalg.norm(v)
        mu = 0.0
        for _ in range(max_iter):
            w = B @ v
            nw = np.linalg.norm(w)
            if nw == 0:
                mu = 0.0
                break
            v_new = w / nw
            mu = float(v_new @ B @ v_new)
            if np.linalg.norm(B @ v_new - mu * v_new) <= tol * shift:
                v = v_new
                break
            v = v_new
        evals.append(mu - shift)
        evecs.append(v.copy())
        B = B - mu * np.outer(v, v)
    order = np.argsort(evals)[::-1]
    return (np.array(evals)[order],
            np.column_stack([evecs[i] for i in order]))


def svm_squared_hinge_objective(X, y_pm, w, b, C):
    """0.5 ||w||^2 + C * mean(max(0, 1 - y f)^2)."""
    m = np.maximum(0.0, 1.0 - y_pm * (X @ w + b))
    return 0.5 * w @ w + C * np.mean(m ** 2)


def svm_subgradient_descent(X, y_pm, C, steps=200000, lr0=0.5):
    """Slow (sub)gradient descent on the squared-hinge primal."""
    n, f = X.shape
    w = np.zeros(f)
    b = 0.0
    for t in range(steps):
        m = 1.0 - y_pm * (X @ w + b)
        viol = np.maximum(m, 0.0)
        gm = -2.0 * C / n * (y_pm * viol)
        gw = w + X.T @ gm
        gb = np.sum(gm)
        lr = lr0 / (1.0 + t * 1e-3)
        w -= lr * gw
        b -= lr * gb
    return w, b


def permutation_shap(model_evaluator, x, background):
    """Shapley values as the average marginal contribution over all
    feature orderings, with the same mean-imputation value function."""
    x = np.asarray(x, dtype=float).ravel()
    mu = np.atleast_2d(np.asarray(background, dtype=float)).mean(axis=0)
    nf = x.size

    def value(present):
        row = mu.copy()
        for j in present:
            row[j] = x[j]
        return float(model_evaluator(row))

    shap = np.zeros(nf)
    count = 0
    for order in itertools.permutations(range(nf)):
        present = []
        prev = value(present)
        for j in order:
            present.append(j)
            cur = value(present)
            shap[j] += cur - prev
            prev = cur
        count += 1
    return shap / count


def triple_loop_gram(Z, widths):
    """(Z Z^T)_ij by explicit summation, c outer, l inner."""
    n = Z.shape[0]
    G = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            s = 0.0
            for c in range(Z.shape[1]):
                for l in range(Z.shape[2]):
                    if c < widths[l]:
                        s += Z[i, c, l] * Z[j, c, l]
            G[i, j] = s
    return G


def best_linear_accuracy_2d(X, y, n_angles=720):
    """Best accuracy of any linear separator on 2-D data, by scanning
    directions and all distinct thresholds."""
    best = 0.0
    for a in range(n_angles):
        theta = math.pi * a / n_angles
        proj = X @ np.array([math.cos(theta), math.sin(theta)])
        order = np.argsort(proj)
        ys = y[order]
        # thresholds between consecutive points, both polarities
        n = len(ys)
        pos_left = np.concatenate([[0], np.cumsum(ys == 1)])
        neg_left = np.concatenate([[0], np.cumsum(ys == 0)])
        for cut in range(n + 1):
            acc1 = (neg_left[cut] + (pos_left[n] - pos_left[cut])) / n
            acc2 = (pos_left[cut] + (neg_left[n] - neg_left[cut])) / n
            best = max(best, acc1, acc2)
    return best


def brute_force_pairs(T, y, class_a, class_b, d, m):
    """All cross-class distances by double loop, sorted."""
    out = []
    for i in range(T.shape[0]):
        if y[i] != class_a:
            continue
        for j in range(T.shape[0]):
            if y[j] != class_b:
                continue
            dist = float(np.linalg.norm(T[i, :d] - T[j, :d]))
            out.append((dist, i, j))
    out.sort()
    return out[:m]

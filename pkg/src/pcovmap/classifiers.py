"""Linear classifiers that expose the evidence scores consumed by PCovC.

Every family fits on a centered feature matrix and produces a weight matrix
W plus intercept; the evidence is the pre-activation score Z = X W + b
(logits for logistic, signed margins for ridge/SVM/perceptron).  Binary
problems use a single signed score column, multiclass problems one column
per class.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.optimize

from .linalg import psd_power

__all__ = [
    "LabelData",
    "LinearClassifierModel",
    "MultilabelClassifierModel",
    "EvidenceTensor",
    "fit_ridge_classifier",
    "fit_logistic",
    "fit_linear_svm",
    "fit_perceptron",
    "fit_classifier",
    "fit_multilabel",
    "evidence",
    "activate",
]

FAMILIES = ("ridge", "logistic", "linear-svm", "perceptron")


@dataclass(frozen=True)
class LabelData:
    """Integer class labels; (n_samples, n_labels) with n_labels = 1 for
    the single-label case."""

    labels: np.ndarray
    classes_per_label: tuple

    @staticmethod
    def from_array(y):
        """Build from a 1-D vector or a 2-D multilabel array, validating that
        every class 0..n_classes-1 appears at least once per label."""
        y = np.asarray(y)
        if y.ndim == 1:
            y = y[:, None]
        if y.ndim != 2:
            raise ValueError("labels must be 1-D or 2-D")
        if not np.issubdtype(y.dtype, np.integer):
            yf = np.asarray(y, dtype=float)
            if not np.all(yf == np.round(yf)):
                raise ValueError("labels must be integers")
            y = yf.astype(int)
        if y.min() < 0:
            raise ValueError("labels must be nonnegative")
        counts = []
        for l in range(y.shape[1]):
            col = y[:, l]
            n_classes = int(col.max()) + 1
            present = np.bincount(col, minlength=n_classes)
            if n_classes < 2:
                raise ValueError(f"label column {l} has a single class")
            if np.any(present == 0):
                missing = np.where(present == 0)[0]
                raise ValueError(
                    f"label column {l} is missing classes {missing.tolist()}"
                )
            counts.append(n_classes)
        return LabelData(labels=y, classes_per_label=tuple(counts))

    @property
    def n_samples(self):
        return self.labels.shape[0]

    @property
    def n_labels(self):
        return self.labels.shape[1]

    def single(self):
        """The 1-D label vector; only valid for single-label data."""
        if self.n_labels != 1:
            raise ValueError("multilabel data has no single label vector")
        return self.labels[:, 0]


@dataclass
class LinearClassifierModel:
    """Fitted single-label linear classifier."""

    weights: np.ndarray          # (n_features, evidence_width)
    intercept: np.ndarray        # (evidence_width,)
    family: str
    n_classes: int
    regularization: float = 0.0
    iterations: int = 0
    converged: bool = True
    metadata: dict = field(default_factory=dict)

    @property
    def evidence_width(self):
        return self.weights.shape[1]


@dataclass
class MultilabelClassifierModel:
    """Per-label single-label models stacked for multilabel problems."""

    models: list

    @property
    def classes_per_label(self):
        return tuple(m.n_classes for m in self.models)


@dataclass(frozen=True)
class EvidenceTensor:
    """Classifier confidence scores.

    ``scores`` is (n_samples, width) for single-label data or a
    zero-padded (n_samples, max_width, n_labels) tensor for multilabel
    data, with ``widths_per_label`` recording each label's true width.
    """

    scores: np.ndarray
    widths_per_label: tuple

    @property
    def n_labels(self):
        return 1 if self.scores.ndim == 2 else self.scores.shape[2]

    def stacked(self):
        """2-D view (n_samples, sum of widths); the padded entries are
        dropped so stacked @ stacked.T matches the tensor inner product."""
        if self.scores.ndim == 2:
            return self.scores
        cols = [
            self.scores[:, : w, l]
            for l, w in enumerate(self.widths_per_label)
        ]
        return np.hstack(cols)


def _encode_pm1(y, n_classes):
    """{-1,+1} target encoding: one signed column for binary, one column
    per class for multiclass."""
    if n_classes == 2:
        return np.where(y == 1, 1.0, -1.0)[:, None]
    Y = -np.ones((y.size, n_classes))
    Y[np.arange(y.size), y] = 1.0
    return Y


def _evidence_width(n_classes):
    return 1 if n_classes == 2 else n_classes


def fit_ridge_classifier(X, y, lam=1e-4):
    """Closed-form ridge classification on {-1,+1}-encoded targets.

    W = (X^T X + lam I)^{-1} X^T Y_pm; falls back to a pseudoinverse when
    lam = 0 meets a rank-deficient Gram matrix.
    """
    X = np.asarray(X, dtype=float)
    labels = y if isinstance(y, LabelData) else LabelData.from_array(y)
    yv = labels.single()
    if lam < 0:
        raise ValueError("regularization must be nonnegative")
    n_classes = labels.classes_per_label[0]
    Ypm = _encode_pm1(yv, n_classes)
    G = X.T @ X + lam * np.eye(X.shape[1])
    solver = "cholesky"
    try:
        c, low = scipy.linalg.cho_factor(G)
        W = scipy.linalg.cho_solve((c, low), X.T @ Ypm)
    except (scipy.linalg.LinAlgError, np.linalg.LinAlgError):
        W = psd_power(G, -1.0) @ (X.T @ Ypm)
        solver = "pinv"
    # X is centered, so the intercept is just the target mean.
    intercept = Ypm.mean(axis=0)
    return LinearClassifierModel(
        weights=W,
        intercept=intercept,
        family="ridge",
        n_classes=n_classes,
        regularization=lam,
        metadata={"solver": solver},
    )


def _softmax(S):
    S = S - S.max(axis=1, keepdims=True)
    E = np.exp(S)
    return E / E.sum(axis=1, keepdims=True)


def fit_logistic(X, y, lam=1e-4, tol=1e-8, max_iter=500):
    """L2-regularized (multinomial) logistic regression by damped Newton.

    Binary problems use a single sigmoid score column; multiclass uses
    full softmax with one logit column per class.  Converged when the
    gradient infinity-norm drops below ``tol``.  The intercept is not
    regularized.
    """
    X = np.asarray(X, dtype=float)
    labels = y if isinstance(y, LabelData) else LabelData.from_array(y)
    yv = labels.single()
    if lam < 0:
        raise ValueError("regularization must be nonnegative")
    n, f = X.shape
    n_classes = labels.classes_per_label[0]
    Xb = np.hstack([X, np.ones((n, 1))])  # intercept column, unregularized

    if n_classes == 2:
        t = (yv == 1).astype(float)
        beta = np.zeros(f + 1)

        def nll(b):
            s = Xb @ b
            # log(1 + e^s) - t*s, stable
            return float(
                np.sum(np.logaddexp(0.0, s) - t * s) + 0.5 * lam * b[:f] @ b[:f]
            )

        def grad(b):
            p = 1.0 / (1.0 + np.exp(-(Xb @ b)))
            g = Xb.T @ (p - t)
            g[:f] += lam * b[:f]
            return g

        def hess(b):
            p = 1.0 / (1.0 + np.exp(-(Xb @ b)))
            w = p * (1 - p)
            H = Xb.T @ (Xb * w[:, None])
            H[np.diag_indices(f)] += lam
            return H

        beta, iters, ok = _newton(nll, grad, hess, beta, tol, max_iter)
        W = beta[:f, None]
        intercept = beta[f:][:1]
    else:
        T = np.zeros((n, n_classes))
        T[np.arange(n), yv] = 1.0
        B = np.zeros((f + 1, n_classes))

        def nll(bflat):
            Bm = bflat.reshape(f + 1, n_classes)
            S = Xb @ Bm
            m = S.max(axis=1, keepdims=True)
            logZ = (m[:, 0] + np.log(np.exp(S - m).sum(axis=1)))
            ll = np.sum(logZ) - np.sum(S[np.arange(n), yv])
            return float(ll + 0.5 * lam * np.sum(Bm[:f] ** 2))

        def grad(bflat):
            Bm = bflat.reshape(f + 1, n_classes)
            P = _softmax(Xb @ Bm)
            G = Xb.T @ (P - T)
            G[:f] += lam * Bm[:f]
            return G.ravel()

        def hess(bflat):
            Bm = bflat.reshape(f + 1, n_classes)
            P = _softmax(Xb @ Bm)
            d = f + 1
            H = np.zeros((d * n_classes, d * n_classes))
            for a in range(n_classes):
                for b_ in range(a, n_classes):
                    w = P[:, a] * ((a == b_) - P[:, b_])
                    blk = Xb.T @ (Xb * w[:, None])
                    H[a * d:(a + 1) * d, b_ * d:(b_ + 1) * d] = blk
                    if b_ != a:
                        H[b_ * d:(b_ + 1) * d, a * d:(a + 1) * d] = blk
            # reorder: parameters are stored row-major (f+1, C); build the
            # permutation mapping (a*d + j) -> (j*C + a)
            perm = np.argsort(
                np.array([j * n_classes + a for a in range(n_classes) for j in range(d)])
            )
            H = H[np.ix_(perm, perm)]
            reg = np.zeros(d * n_classes)
            reg.reshape(d, n_classes)[:f, :] = lam
            H[np.diag_indices_from(H)] += reg
            return H

        beta, iters, ok = _newton(nll, grad, hess, B.ravel(), tol, max_iter)
        Bm = beta.reshape(f + 1, n_classes)
        W = Bm[:f]
        intercept = Bm[f]

    if not ok:
        import warnings

        warnings.warn(
            f"logistic fit did not reach tol={tol} in {max_iter} iterations",
            RuntimeWarning,
        )
    return LinearClassifierModel(
        weights=W,
        intercept=np.atleast_1d(intercept),
        family="logistic",
        n_classes=n_classes,
        regularization=lam,
        iterations=iters,
        converged=ok,
    )


def _newton(fun, grad, hess, x0, tol, max_iter):
    """Damped Newton with backtracking; stops on gradient infinity-norm."""
    x = x0.copy()
    for it in range(1, max_iter + 1):
        g = grad(x)
        if np.max(np.abs(g)) < tol:
            return x, it - 1, True
        H = hess(x)
        # tiny diagonal lift guards the unregularized intercept block
        H[np.diag_indices_from(H)] += 1e-10
        try:
            step = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(H, g, rcond=None)[0]
        f0 = fun(x)
        t = 1.0
        gts = g @ step
        for _ in range(60):
            xn = x - t * step
            if fun(xn) <= f0 - 1e-4 * t * gts:
                break
            t *= 0.5
        x = xn
    g = grad(x)
    return x, max_iter, bool(np.max(np.abs(g)) < tol)


def fit_linear_svm(X, y, C=1.0, tol=1e-10, max_iter=2000):
    """Primal squared-hinge SVM, one column per class (one-vs-rest).

    Objective per column: 0.5 ||w||^2 + C * mean(max(0, 1 - y f(x))^2);
    the mean makes the solution invariant to sample duplication.  Solved
    with L-BFGS on the smooth objective; intercept unregularized.
    """
    X = np.asarray(X, dtype=float)
    labels = y if isinstance(y, LabelData) else LabelData.from_array(y)
    yv = labels.single()
    if C <= 0:
        raise ValueError("C must be positive")
    n, f = X.shape
    n_classes = labels.classes_per_label[0]
    Ypm = _encode_pm1(yv, n_classes)
    width = Ypm.shape[1]
    W = np.zeros((f, width))
    intercept = np.zeros(width)
    iters = 0
    ok = True
    for c in range(width):
        t = Ypm[:, c]

        def obj(wb):
            w, b = wb[:f], wb[f]
            m = 1.0 - t * (X @ w + b)
            viol = np.maximum(m, 0.0)
            val = 0.5 * w @ w + C * np.mean(viol ** 2)
            gm = -2.0 * C / n * (t * viol)
            gw = w + X.T @ gm
            gb = np.sum(gm)
            return float(val), np.concatenate([gw, [gb]])

        res = scipy.optimize.minimize(
            obj,
            np.zeros(f + 1),
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": max_iter, "gtol": tol, "ftol": 1e-16},
        )
        W[:, c] = res.x[:f]
        intercept[c] = res.x[f]
        iters = max(iters, res.nit)
        ok = ok and bool(np.max(np.abs(res.jac)) < 1e-6)
    return LinearClassifierModel(
        weights=W,
        intercept=intercept,
        family="linear-svm",
        n_classes=n_classes,
        regularization=1.0 / C,
        iterations=iters,
        converged=ok,
    )


def fit_perceptron(X, y, epochs=100, seed=0):
    """Classic perceptron with seeded per-epoch shuffling.

    Binary: single weight vector updated on sign mistakes; multiclass:
    one vector per class with the argmax update rule.  Stops early once
    an epoch is mistake-free; otherwise returns the final iterate.
    """
    X = np.asarray(X, dtype=float)
    labels = y if isinstance(y, LabelData) else LabelData.from_array(y)
    yv = labels.single()
    n, f = X.shape
    n_classes = labels.classes_per_label[0]
    rng = np.random.default_rng(seed)
    if n_classes == 2:
        t = np.where(yv == 1, 1.0, -1.0)
        w = np.zeros(f)
        b = 0.0
        done = 0
        for ep in range(epochs):
            order = rng.permutation(n)
            mistakes = 0
            for i in order:
                if t[i] * (X[i] @ w + b) <= 0:
                    w = w + t[i] * X[i]
                    b = b + t[i]
                    mistakes += 1
            done = ep + 1
            if mistakes == 0:
                break
        W = w[:, None]
        intercept = np.array([b])
        converged = mistakes == 0
    else:
        W = np.zeros((f, n_classes))
        intercept = np.zeros(n_classes)
        done = 0
        for ep in range(epochs):
            order = rng.permutation(n)
            mistakes = 0
            for i in order:
                scores = X[i] @ W + intercept
                pred = int(np.argmax(scores))
                yi = yv[i]
                if pred != yi:
                    W[:, yi] += X[i]
                    intercept[yi] += 1.0
                    W[:, pred] -= X[i]
                    intercept[pred] -= 1.0
                    mistakes += 1
            done = ep + 1
            if mistakes == 0:
                break
        converged = mistakes == 0
    return LinearClassifierModel(
        weights=W,
        intercept=intercept,
        family="perceptron",
        n_classes=n_classes,
        iterations=done,
        converged=converged,
        metadata={"seed": seed, "epochs": epochs},
    )


def fit_classifier(X, y, family="logistic", **kwargs):
    """Dispatch to one classifier family by name."""
    if family == "ridge":
        return fit_ridge_classifier(X, y, **kwargs)
    if family == "logistic":
        return fit_logistic(X, y, **kwargs)
    if family == "linear-svm":
        return fit_linear_svm(X, y, **kwargs)
    if family == "perceptron":
        return fit_perceptron(X, y, **kwargs)
    raise ValueError(f"unknown classifier family {family!r}; choose from {FAMILIES}")


def fit_multilabel(X, labels, family="logistic", **kwargs):
    """Fit one model per label column; results are order-independent."""
    if not isinstance(labels, LabelData):
        labels = LabelData.from_array(labels)
    models = []
    for l in range(labels.n_labels):
        sub = LabelData.from_array(labels.labels[:, l])
        models.append(fit_classifier(X, sub, family=family, **kwargs))
    return MultilabelClassifierModel(models=models)


def evidence(model, X):
    """Evidence scores Z = X W + b for a fitted model.

    Multilabel models produce a zero-padded 3-D tensor with one slice per
    label.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if isinstance(model, MultilabelClassifierModel):
        widths = tuple(m.evidence_width for m in model.models)
        maxw = max(widths)
        out = np.zeros((X.shape[0], maxw, len(model.models)))
        for l, m in enumerate(model.models):
            out[:, : widths[l], l] = evidence(m, X).scores
        return EvidenceTensor(scores=out, widths_per_label=widths)
    if X.shape[1] != model.weights.shape[0]:
        raise ValueError(
            f"feature count {X.shape[1]} does not match model "
            f"({model.weights.shape[0]})"
        )
    Z = X @ model.weights + model.intercept
    return EvidenceTensor(scores=Z, widths_per_label=(model.evidence_width,))


def activate(Z):
    """Map evidence to class labels.

    Width-1 columns threshold at zero (z > 0 -> class 1); wider blocks take
    the argmax, ties resolved toward the lowest class index.
    """
    if not isinstance(Z, EvidenceTensor):
        Z = np.asarray(Z, dtype=float)
        Z = EvidenceTensor(
            scores=Z if Z.ndim >= 2 else Z[:, None],
            widths_per_label=(Z.shape[1] if Z.ndim >= 2 else 1,),
        )
    S = Z.scores
    if S.ndim == 2:
        if S.shape[1] == 1:
            y = (S[:, 0] > 0).astype(int)
            n_classes = 2
        else:
            y = np.argmax(S, axis=1).astype(int)
            n_classes = S.shape[1]
        return LabelData(labels=y[:, None], classes_per_label=(n_classes,))
    cols = []
    counts = []
    for l, w in enumerate(Z.widths_per_label):
        block = S[:, :w, l]
        if w == 1:
            cols.append((block[:, 0] > 0).astype(int))
            counts.append(2)
        else:
            cols.append(np.argmax(block, axis=1).astype(int))
            counts.append(w)
    return LabelData(labels=np.stack(cols, axis=1), classes_per_label=tuple(counts))

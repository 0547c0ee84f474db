"""Acceptance gate: one test per release criterion.

Each test prints a single PASS/FAIL line (written straight to the real
stdout so it is visible under pytest's capture) and asserts the same
condition, so the suite both reports and enforces the contract.
"""

import csv
import json
import sys
import time
import warnings

import numpy as np
import pytest

from pcovmap import baselines, pcov, serialize
from pcovmap.analysis import alpha_sweep
from pcovmap.baselines import exact_shap, fit_kpca, fit_lda, fit_pca
from pcovmap.classifiers import EvidenceTensor, activate, evidence, fit_logistic
from pcovmap.cli import main as cli_main
from pcovmap.datasets import (
    load_iris,
    make_imbalanced_cliff,
    make_moons,
    stratified_split,
)
from pcovmap.kernels import KernelSpec, center_kernel, compute_kernel
from pcovmap.linalg import center_and_scale, eigh_descending

from oracles import permutation_shap, power_iteration_eigh, triple_loop_gram


_CAP = None


@pytest.fixture(autouse=True)
def _live_reporting(capfd):
    global _CAP
    _CAP = capfd
    yield
    _CAP = None


def report(number, name, ok, detail=""):
    tag = "PASS" if ok else "FAIL"
    line = f"ACCEPTANCE {number:2d} [{tag}] {name}"
    if detail:
        line += f" ({detail})"
    if _CAP is not None:
        with _CAP.disabled():
            print(line, flush=True)
    else:
        print(line, file=sys.__stdout__, flush=True)
    assert ok, line


def sign_aligned_dev(A, B):
    devs = []
    for j in range(A.shape[1]):
        devs.append(min(np.max(np.abs(A[:, j] - B[:, j])),
                        np.max(np.abs(A[:, j] + B[:, j]))))
    return max(devs)


def probe_accuracy(T_train, y_train, T_test, y_test):
    mu = T_train.mean(axis=0)
    probe = fit_logistic(T_train - mu, y_train)
    pred = activate(evidence(probe, T_test - mu)).single()
    return float(np.mean(pred == y_test))


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_01_pca_limit():
    """At alpha=1 the map equals an independent PCA, both modes."""
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for trial in range(20):
        n = int(rng.integers(10, 201))
        f = int(rng.integers(2, 41))
        X = rng.standard_normal((n, f))
        y = (X[:, 0] > 0).astype(int)
        if len(np.unique(y)) < 2:
            y[0] = 1 - y[0]
        k = min(3, min(n - 1, f))
        Xc, _ = center_and_scale(X)
        ref = fit_pca(Xc, k).scores
        k_eff = ref.shape[1]
        cfg = pcov.PcovConfig(alpha=1.0, n_components=k_eff)
        mc = pcov.fit_pcovx(X, y, cfg, classifier="ridge")
        cfg_r = pcov.PcovConfig(alpha=1.0, n_components=k_eff,
                                mode="regression")
        mr = pcov.fit_pcovx(X, rng.standard_normal(n), cfg_r)
        worst = max(worst,
                    sign_aligned_dev(mc.train_embedding, ref),
                    sign_aligned_dev(mr.train_embedding, ref))
    elapsed = time.perf_counter() - start
    report(1, "PCA limit at alpha=1", worst < 1e-8 and elapsed < 10.0,
           f"max dev {worst:.2e}, {elapsed:.1f}s")


def test_02_linear_regression_limit():
    """At alpha=0 regression predictions equal direct least squares."""
    rng = np.random.default_rng(7)
    worst = 0.0
    for n, f, q in ((40, 6, 1), (60, 10, 3), (25, 4, 2)):
        X = rng.standard_normal((n, f))
        Y = X @ rng.standard_normal((f, q)) + 0.1 * rng.standard_normal((n, q))
        cfg = pcov.PcovConfig(alpha=0.0, n_components=min(q, f),
                              mode="regression")
        m = pcov.fit_pcovx(X, Y, cfg, ridge_lambda=0.0)
        Xc, _ = center_and_scale(X)
        Yc = Y - Y.mean(axis=0)
        B = np.linalg.lstsq(Xc, Yc, rcond=None)[0]
        Xn = rng.standard_normal((15, f))
        for pts in (X, Xn):
            ref = (pts - X.mean(axis=0)) @ B + Y.mean(axis=0)
            worst = max(worst, float(np.max(np.abs(pcov.predict(m, pts) - ref))))
    report(2, "linear-regression limit at alpha=0", worst < 1e-8,
           f"max dev {worst:.2e}")


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_03_route_equivalence():
    """Sample- and feature-space routes give the same map and spectrum."""
    rng = np.random.default_rng(11)
    worst_emb = 0.0
    worst_eig = 0.0
    for n, f in ((60, 8), (10, 25)):
        X = rng.standard_normal((n, f))
        y = (X[:, 0] > 0).astype(int)
        if len(np.unique(y)) < 2:
            y[0] = 1 - y[0]
        for alpha in (0.0, 0.25, 0.5, 0.75, 1.0):
            k = 1 if alpha == 0.0 else min(3, min(n, f) - 1)
            cs = pcov.PcovConfig(alpha=alpha, n_components=k,
                                 route="sample-space")
            cf = pcov.PcovConfig(alpha=alpha, n_components=k,
                                 route="feature-space")
            ms = pcov.fit_pcovx(X, y, cs, classifier="ridge",
                                classifier_kwargs={"lam": 1e-3})
            mf = pcov.fit_pcovx(X, y, cf, classifier="ridge",
                                classifier_kwargs={"lam": 1e-3})
            worst_emb = max(worst_emb,
                            sign_aligned_dev(ms.train_embedding,
                                             mf.train_embedding))
            scale = max(ms.eigenvalues[0], 1.0)
            worst_eig = max(worst_eig,
                            float(np.max(np.abs(ms.eigenvalues
                                                - mf.eigenvalues))) / scale)
    report(3, "route equivalence", worst_emb < 1e-7 and worst_eig < 1e-8,
           f"emb dev {worst_emb:.2e}, eig dev {worst_eig:.2e}")


def test_04_eigensolver_oracle():
    """eigh_descending vs power iteration with deflation, 100 matrices."""
    rng = np.random.default_rng(5)
    worst = 0.0
    for trial in range(100):
        d = int(rng.integers(2, 11))
        M = rng.standard_normal((d, d))
        A = 0.5 * (M + M.T)
        eig = eigh_descending(A)
        ref_vals, _ = power_iteration_eigh(A, seed=trial)
        worst = max(worst, float(np.max(np.abs(eig.eigenvalues - ref_vals))))
    report(4, "eigensolver matches power-iteration oracle", worst < 1e-8,
           f"max dev {worst:.2e} over 100 matrices")


def test_05_multilabel_tensor_product():
    """Evidence-tensor gram term is bitwise equal to the triple loop."""
    rng = np.random.default_rng(9)
    ok = True
    for n, c, l in ((4, 2, 2), (7, 3, 2), (10, 4, 3)):
        widths = tuple(int(w) for w in rng.integers(1, c + 1, l))
        Z = rng.standard_normal((n, c, l))
        for lab, w in enumerate(widths):
            Z[:, w:, lab] = 0.0
        ev = EvidenceTensor(scores=Z, widths_per_label=widths)
        G = pcov.multilabel_gram_contribution(ev)
        ok = ok and np.array_equal(G, triple_loop_gram(Z, widths))
    report(5, "multilabel tensor product bitwise equals triple loop", ok)


def test_06_exact_shap():
    """Additivity, linear closed form and the permutation oracle."""
    rng = np.random.default_rng(13)
    worst_add = 0.0
    worst_lin = 0.0
    worst_perm = 0.0
    # (a) additivity on a nonlinear model
    bg = rng.standard_normal((25, 5))
    for _ in range(5):
        x = rng.standard_normal(5)
        res = exact_shap(lambda r: np.sin(r[0]) * r[1] + r[2] ** 2 - r[3],
                         x, bg)
        worst_add = max(worst_add,
                        abs(res.values.sum()
                            - (res.model_output - res.base_value)))
    # (b) linear closed form
    w = rng.standard_normal(6)
    bg6 = rng.standard_normal((40, 6))
    x6 = rng.standard_normal(6)
    res = exact_shap(lambda r: r @ w, x6, bg6)
    worst_lin = float(np.max(np.abs(res.values - w * (x6 - bg6.mean(axis=0)))))
    # (c) permutation oracle, <= 6 features
    bg4 = rng.standard_normal((12, 4))
    x4 = rng.standard_normal(4)

    def f(r):
        return r[0] * r[1] + np.tanh(r[2]) - 0.5 * r[3] ** 2

    res = exact_shap(f, x4, bg4)
    worst_perm = float(np.max(np.abs(res.values
                                     - permutation_shap(f, x4, bg4))))
    ok = worst_add < 1e-10 and worst_lin < 1e-10 and worst_perm < 1e-10
    report(6, "exact SHAP identities", ok,
           f"add {worst_add:.1e}, lin {worst_lin:.1e}, perm {worst_perm:.1e}")


def test_07_iris_reference():
    """Pinned Iris runs: every classifier family and the LDA baseline."""
    start = time.perf_counter()
    X, y, _ = load_iris()
    train, test = stratified_split(y, 0.2, seed=7)
    accs = {}
    for family in ("ridge", "logistic", "linear-svm", "perceptron"):
        kwargs = {"seed": 0} if family == "perceptron" else {}
        cfg = pcov.PcovConfig(alpha=0.5, n_components=2)
        m = pcov.fit_pcovx(X[train], y[train], cfg, classifier=family,
                           classifier_kwargs=kwargs, standardize=True)
        accs[family] = probe_accuracy(m.train_embedding, y[train],
                                      pcov.transform(m, X[test]), y[test])
    Xc, recipe = center_and_scale(X[train], standardize=True)
    lda = fit_lda(Xc, y[train])
    from pcovmap.linalg import apply_recipe

    acc_lda = probe_accuracy(lda.transform(Xc), y[train],
                             lda.transform(apply_recipe(X[test], recipe)),
                             y[test])
    elapsed = time.perf_counter() - start
    ok = all(a >= 0.90 for a in accs.values()) and acc_lda >= 0.93 \
        and elapsed < 5.0
    detail = ", ".join(f"{k} {v:.3f}" for k, v in accs.items())
    report(7, "Iris reference runs", ok, f"{detail}, lda {acc_lda:.3f}")


def test_08_nonlinear_separation():
    """Two-moons: KPCovC succeeds where KPCA fails on the same kernel."""
    X, y = make_moons(n=300, noise=0.05, seed=0)
    train, test = stratified_split(y, 0.25, seed=0)
    spec = KernelSpec("rbf", gamma=2.0)
    Ktr = center_kernel(compute_kernel(X[train], X[train], spec))
    Kte = compute_kernel(X[test], X[train], spec)
    m = pcov.fit_kpcovc(Ktr, y[train],
                        pcov.PcovConfig(alpha=0.1, n_components=2))
    acc_pcov = probe_accuracy(m.train_embedding, y[train],
                              pcov.transform(m, Kte), y[test])
    kp = fit_kpca(Ktr, 2)
    Kte_c = center_kernel(Kte, training_stats=Ktr)
    acc_kpca = probe_accuracy(kp.scores, y[train],
                              kp.transform(Kte_c), y[test])
    ok = acc_pcov >= 0.95 and acc_kpca <= 0.90
    report(8, "two-moons KPCovC > KPCA", ok,
           f"kpcovc {acc_pcov:.3f}, kpca {acc_kpca:.3f}")


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_09_imbalanced_cliff_sweep():
    """Best alpha sits strictly below 0.5 on the imbalanced dataset."""
    X, y = make_imbalanced_cliff(n=1000, noise_scale=(25.0, 2.0), shift=2.0,
                                 informative_scale=0.5, positive_rate=0.10,
                                 seed=0)
    train, test = stratified_split(y, 0.25, seed=0)
    rep = alpha_sweep(X[train], y[train], X[test], y[test],
                      [0.0, 0.25, 0.5, 0.75, 1.0], n_components=1,
                      classifier="logistic")
    accs = {e.alpha: e.accuracy for e in rep.entries}
    low = max(accs[0.0], accs[0.25])
    high = max(accs[0.5], accs[0.75], accs[1.0])
    ok = rep.best_alpha < 0.5 and low > high
    detail = ", ".join(f"a={a:g}:{accs[a]:.3f}" for a in sorted(accs))
    report(9, "imbalanced sweep favors alpha < 0.5", ok,
           f"{detail}, best {rep.best_alpha:g}")


def test_10_complexity_band():
    """Feature-route fit time grows 1.5-3x when n doubles at fixed f."""
    import gc

    f = 150
    cfg = pcov.PcovConfig(alpha=0.5, n_components=2, route="feature-space")

    def make(n):
        rng = np.random.default_rng(99)
        X = rng.standard_normal((n, f))
        y = (X[:, 0] + 0.5 * rng.standard_normal(n) > 0).astype(int)
        return X, y

    problems = [make(8000), make(16000)]
    for X, y in problems:
        pcov.fit_pcovx(X, y, cfg, classifier="ridge")  # warm caches
    times = [[], []]
    for _ in range(3):  # interleaved so transient load hits both sizes
        for i, (X, y) in enumerate(problems):
            gc.collect()
            t0 = time.perf_counter()
            pcov.fit_pcovx(X, y, cfg, classifier="ridge")
            times[i].append(time.perf_counter() - t0)
    t1 = float(np.median(times[0]))
    t2 = float(np.median(times[1]))
    ratio = t2 / t1
    report(10, "doubling n scales fit time 1.5-3x", 1.5 <= ratio <= 3.0,
           f"{t1 * 1e3:.0f}ms -> {t2 * 1e3:.0f}ms, ratio {ratio:.2f}")


def test_11_cli_round_trip(tmp_path):
    """fit -> serialize -> reload -> transform, plus byte-stable reruns."""
    X, y, names = load_iris()
    data = tmp_path / "iris.csv"
    with open(data, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names + ["species"])
        for i in range(X.shape[0]):
            w.writerow(["%.17g" % v for v in X[i]] + [int(y[i])])
    outs = []
    for run in ("a", "b"):
        out = tmp_path / run
        rc = cli_main(["--quiet", "--out-dir", str(out), "fit",
                       "--data", str(data), "--test-fraction", "0",
                       "--standardize"])
        assert rc == 0
        outs.append(out)
    stable = all((outs[0] / nm).read_bytes() == (outs[1] / nm).read_bytes()
                 for nm in ("model.json", "embedding.csv", "metrics.json"))
    model = serialize.load_model(outs[0] / "model.json")
    T = pcov.transform(model, X)
    with open(outs[0] / "embedding.csv") as fh:
        rows = list(csv.reader(fh))[1:]
    T_file = np.array([[float(r[3]), float(r[4])] for r in rows])
    dev = float(np.max(np.abs(T - T_file)))
    ok = stable and dev < 1e-10
    report(11, "CLI round trip", ok,
           f"reload dev {dev:.2e}, byte-stable {stable}")

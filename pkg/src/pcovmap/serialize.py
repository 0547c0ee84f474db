"""Model persistence: one self-describing JSON document per model.

Arrays are stored as base64 of their column-major float64 bytes with
shapes recorded, so a fit -> save -> load -> transform round trip is
bit-exact.  The document carries a format tag for forward compatibility.
"""

import base64
import json

import numpy as np

from . import classifiers as clf
from .linalg import ScalingRecipe
from .pcov import PcovConfig, PcovModel

__all__ = ["save_model", "load_model", "dumps_model", "loads_model"]

FORMAT_TAG = "pcovmap-model/1"


def _enc(arr):
    if arr is None:
        return None
    a = np.asarray(arr, dtype=float)
    return {
        "shape": list(a.shape),
        "data": base64.b64encode(np.asfortranarray(a).tobytes(order="F")).decode(),
    }


def _dec(obj):
    if obj is None:
        return None
    raw = base64.b64decode(obj["data"])
    return np.frombuffer(raw, dtype=float).reshape(obj["shape"], order="F").copy()


def _enc_classifier(model):
    if model is None:
        return None
    if isinstance(model, clf.MultilabelClassifierModel):
        return {"multilabel": [_enc_classifier(m) for m in model.models]}
    return {
        "weights": _enc(model.weights),
        "intercept": _enc(model.intercept),
        "family": model.family,
        "n_classes": model.n_classes,
        "regularization": model.regularization,
        "iterations": model.iterations,
        "converged": model.converged,
        "metadata": model.metadata,
    }


def _dec_classifier(obj):
    if obj is None:
        return None
    if "multilabel" in obj:
        return clf.MultilabelClassifierModel(
            models=[_dec_classifier(m) for m in obj["multilabel"]]
        )
    return clf.LinearClassifierModel(
        weights=_dec(obj["weights"]),
        intercept=_dec(obj["intercept"]).ravel(),
        family=obj["family"],
        n_classes=obj["n_classes"],
        regularization=obj["regularization"],
        iterations=obj["iterations"],
        converged=obj["converged"],
        metadata=obj["metadata"],
    )


def dumps_model(model):
    """Serialize a fitted model to a JSON string."""
    cfg = model.config
    doc = {
        "format": FORMAT_TAG,
        "config": {
            "alpha": cfg.alpha,
            "n_components": cfg.n_components,
            "route": cfg.route,
            "mode": cfg.mode,
            "rcond": cfg.rcond,
        },
        "route_used": model.route_used,
        "is_kernel": model.is_kernel,
        "arrays": {
            "p_xt": _enc(model.p_xt),
            "p_tx": _enc(model.p_tx),
            "p_tz": _enc(model.p_tz),
            "target_intercept": _enc(model.target_intercept),
            "eigenvalues": _enc(model.eigenvalues),
            "train_embedding": _enc(model.train_embedding),
        },
        "recipe": None if model.recipe is None else {
            "column_means": _enc(model.recipe.column_means),
            "column_scales": _enc(model.recipe.column_scales),
            "global_scale": model.recipe.global_scale,
        },
        "kernel_stats": None if model.kernel_stats is None else {
            "training_row_means": _enc(model.kernel_stats[0]),
            "training_mean": model.kernel_stats[1],
        },
        "widths_per_label": (None if model.widths_per_label is None
                             else list(model.widths_per_label)),
        "classifier": _enc_classifier(model.classifier),
        "metadata": model.metadata,
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def loads_model(text):
    """Inverse of :func:`dumps_model`."""
    doc = json.loads(text)
    if doc.get("format") != FORMAT_TAG:
        raise ValueError(f"unsupported model format {doc.get('format')!r}")
    c = doc["config"]
    cfg = PcovConfig(alpha=c["alpha"], n_components=c["n_components"],
                     route=c["route"], mode=c["mode"], rcond=c["rcond"])
    arrays = doc["arrays"]
    recipe = None
    if doc["recipe"] is not None:
        r = doc["recipe"]
        recipe = ScalingRecipe(
            column_means=_dec(r["column_means"]).ravel(),
            column_scales=_dec(r["column_scales"]).ravel(),
            global_scale=r["global_scale"],
        )
    kernel_stats = None
    if doc["kernel_stats"] is not None:
        ks = doc["kernel_stats"]
        kernel_stats = (_dec(ks["training_row_means"]).ravel(),
                        ks["training_mean"])
    widths = doc["widths_per_label"]
    return PcovModel(
        config=cfg,
        p_xt=_dec(arrays["p_xt"]),
        p_tx=_dec(arrays["p_tx"]),
        p_tz=_dec(arrays["p_tz"]),
        target_intercept=_dec(arrays["target_intercept"]).ravel(),
        eigenvalues=_dec(arrays["eigenvalues"]).ravel(),
        recipe=recipe,
        route_used=doc["route_used"],
        widths_per_label=None if widths is None else tuple(widths),
        train_embedding=_dec(arrays["train_embedding"]),
        classifier=_dec_classifier(doc["classifier"]),
        is_kernel=doc["is_kernel"],
        kernel_stats=kernel_stats,
        metadata=doc["metadata"],
    )


def save_model(model, path):
    with open(path, "w") as fh:
        fh.write(dumps_model(model))


def load_model(path):
    with open(path) as fh:
        return loads_model(fh.read())

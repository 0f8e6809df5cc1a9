"""Versioned JSON persistence for trained models.

One artifact file holds one model: its type, the section shape and target
it was trained for, the numeric payload, input standardization constants
and training metadata.  Serialization is canonical (sorted keys, exact
float round-trip), so save(load(bytes)) == bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ArityMismatch, CorruptPayload, UnsupportedVersion
from .types import SectionShape

FORMAT_VERSION = 1

MODEL_TYPES = (
    "gm", "mlr", "prm", "rlr", "linear-trained", "gpr", "mlp", "ova",
)
CLOSED_FORM_TYPES = ("gm", "mlr", "prm", "rlr")
TARGETS = ("a", "b", "mode")


@dataclass
class ModelArtifact:
    model_type: str
    shape: SectionShape
    target: str
    payload: dict = field(default_factory=dict)
    standardization: Optional[dict] = None
    training_meta: dict = field(default_factory=dict)
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        if self.model_type not in MODEL_TYPES:
            raise CorruptPayload(f"unknown model_type {self.model_type!r}")
        if self.target not in TARGETS:
            raise CorruptPayload(f"unknown target {self.target!r}")
        _validate_payload(self.model_type, self.payload, self.standardization)


def _as_float_list(obj, what: str) -> list:
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError):
        raise ArityMismatch(f"{what}: expected numeric array") from None
    if not np.all(np.isfinite(arr)):
        raise ArityMismatch(f"{what}: contains non-finite values")
    return arr.tolist()


def _require(payload: dict, keys: tuple[str, ...], what: str) -> None:
    missing = [k for k in keys if k not in payload]
    if missing:
        raise CorruptPayload(f"{what}: missing payload key(s) "
                             f"{', '.join(missing)}")


def _validate_payload(model_type: str, payload: dict,
                      standardization: Optional[dict]) -> None:
    if model_type in CLOSED_FORM_TYPES:
        if payload:
            raise ArityMismatch(
                f"{model_type}: closed-form artifacts carry no payload")
        return

    if model_type == "linear-trained":
        _require(payload, ("feature_names", "coefficients", "lambda"),
                 model_type)
        names = payload["feature_names"]
        coeffs = _as_float_list(payload["coefficients"], "coefficients")
        if len(names) != len(coeffs):
            raise ArityMismatch(
                f"linear-trained: {len(names)} names vs "
                f"{len(coeffs)} coefficients")
        return

    if model_type == "gpr":
        _require(payload, ("training_inputs", "dual_weights", "sigma_f",
                           "length_scale", "noise_var", "jitter"), model_type)
        inputs = np.asarray(payload["training_inputs"], dtype=float)
        dual = _as_float_list(payload["dual_weights"], "dual_weights")
        if inputs.ndim != 2 or inputs.shape[0] != len(dual):
            raise ArityMismatch(
                f"gpr: {inputs.shape} training inputs vs "
                f"{len(dual)} dual weights")
        if standardization is not None:
            d = inputs.shape[1]
            for key in ("x_mean", "x_std"):
                if len(standardization.get(key, ())) != d:
                    raise ArityMismatch(f"gpr: standardization {key} "
                                        f"must have {d} entries")
        return

    if model_type == "mlp":
        _require(payload, ("layer_sizes", "weights", "biases"), model_type)
        sizes = [int(s) for s in payload["layer_sizes"]]
        weights = payload["weights"]
        biases = payload["biases"]
        if len(weights) != len(sizes) - 1 or len(biases) != len(sizes) - 1:
            raise ArityMismatch("mlp: layer count mismatch")
        for i, (w, b) in enumerate(zip(weights, biases)):
            w = np.asarray(w, dtype=float)
            b = np.asarray(b, dtype=float)
            if w.shape != (sizes[i], sizes[i + 1]) or b.shape != (sizes[i + 1],):
                raise ArityMismatch(
                    f"mlp: layer {i} has shape {w.shape}/{b.shape}, "
                    f"expected ({sizes[i]}, {sizes[i + 1]})/({sizes[i + 1]},)")
        return

    if model_type == "ova":
        _require(payload, ("feature_names", "coefficients"), model_type)
        names = payload["feature_names"]
        coeffs = payload["coefficients"]
        for mode in ("FC", "FSC", "SC"):
            if mode not in coeffs:
                raise CorruptPayload(f"ova: missing class {mode}")
            vec = _as_float_list(coeffs[mode], f"ova {mode}")
            if len(vec) != len(names) + 1:
                raise ArityMismatch(
                    f"ova {mode}: {len(vec)} coefficients for "
                    f"{len(names)} features (+ intercept)")
        return


def save_model(artifact: ModelArtifact) -> bytes:
    """Canonical JSON bytes for an artifact."""
    doc = {
        "format_version": artifact.format_version,
        "model_type": artifact.model_type,
        "shape": artifact.shape.value,
        "target": artifact.target,
        "payload": artifact.payload,
        "standardization": artifact.standardization,
        "training_meta": artifact.training_meta,
    }
    text = json.dumps(doc, sort_keys=True, indent=2, allow_nan=False)
    return (text + "\n").encode("utf-8")


def load_model(data: bytes) -> ModelArtifact:
    """Parse and validate artifact bytes."""
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptPayload(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise CorruptPayload("artifact JSON must be an object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise UnsupportedVersion(
            f"format_version {version!r} not supported "
            f"(expected {FORMAT_VERSION})")
    for key in ("model_type", "shape", "target", "payload"):
        if key not in doc:
            raise CorruptPayload(f"missing top-level key {key!r}")
    try:
        shape = SectionShape(doc["shape"])
    except ValueError:
        raise CorruptPayload(f"unknown shape {doc['shape']!r}") from None
    if not isinstance(doc["payload"], dict):
        raise CorruptPayload("payload must be an object")
    return ModelArtifact(
        model_type=doc["model_type"],
        shape=shape,
        target=doc["target"],
        payload=doc["payload"],
        standardization=doc.get("standardization"),
        training_meta=doc.get("training_meta") or {},
    )

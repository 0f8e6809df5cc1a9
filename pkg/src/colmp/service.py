"""HTTP JSON prediction service.

Endpoints (all under /api/v1):

    GET  /health    liveness probe
    GET  /models    names of servable models
    POST /predict   modeling parameters a/b for a column, per model
    POST /classify  failure-mode scores and probabilities

The closed-form families (gm, mlr, prm, rlr) are always servable; trained
models are loaded once at startup from a directory of artifact files
(default: the COLMP_MODELS_DIR environment variable) and the registry is
immutable while serving.  Responses are pure functions of the request and
the registry snapshot.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from . import artifacts as art
from .closed_form import ClassScores, classify_fixed
from .dataset import parse_dataset
from .errors import ColmpError, InvalidFeatures
from .evaluation import separation_param
from .pipeline import Predictor
from .types import ColumnFeatures, DatasetStats, SectionShape

MODELS_DIR_ENV = "COLMP_MODELS_DIR"
CLOSED_FORM_NAMES = ("gm", "mlr", "prm", "rlr")


@dataclass
class Registry:
    """Immutable snapshot of servable models and optional dataset stats."""

    predictors: dict[str, Predictor] = field(default_factory=dict)
    stats: dict[SectionShape, DatasetStats] = field(default_factory=dict)

    @classmethod
    def load(cls, models_dir: Optional[str] = None,
             dataset_path: Optional[str] = None) -> "Registry":
        predictors: dict[str, Predictor] = {}
        directory = models_dir if models_dir is not None \
            else os.environ.get(MODELS_DIR_ENV)
        if directory:
            for path in sorted(Path(directory).glob("*.json")):
                artifact = art.load_model(path.read_bytes())
                predictors[path.stem] = Predictor(artifact)
        stats: dict[SectionShape, DatasetStats] = {}
        if dataset_path:
            ds = parse_dataset(Path(dataset_path).read_text(encoding="utf-8"))
            for shape in SectionShape:
                if len(ds.by_shape(shape)) >= 2:
                    stats[shape] = ds.stats(shape)
        return cls(predictors=predictors, stats=stats)

    def model_names(self) -> list[str]:
        return list(CLOSED_FORM_NAMES) + sorted(self.predictors)


class FeaturesIn(BaseModel):
    a_over_d: float
    axial_ratio: float
    rho_l: float
    rho_t: float
    s_over_d: float
    vy_over_vo: float

    def to_features(self) -> ColumnFeatures:
        try:
            return ColumnFeatures(
                span_depth=self.a_over_d,
                axial_ratio=self.axial_ratio,
                rho_l=self.rho_l,
                rho_t=self.rho_t,
                spacing_depth=self.s_over_d,
                shear_ratio=self.vy_over_vo,
            )
        except InvalidFeatures as exc:
            raise HTTPException(
                status_code=400,
                detail={"error": "InvalidFeatures", "message": str(exc)},
            ) from None


class PredictIn(BaseModel):
    shape: str = Field(pattern="^[RC]$")
    features: FeaturesIn
    models: list[str] = Field(default_factory=lambda: list(CLOSED_FORM_NAMES))
    id: Optional[str] = None


class ClassifyIn(BaseModel):
    shape: str = Field(pattern="^[RC]$")
    features: FeaturesIn
    model: Optional[str] = None
    id: Optional[str] = None


def _scores_json(scores: ClassScores) -> dict:
    return {
        "scores": {"FC": scores.score_fc, "FSC": scores.score_fsc,
                   "SC": scores.score_sc},
        "probabilities": {"FC": scores.prob_fc, "FSC": scores.prob_fsc,
                          "SC": scores.prob_sc},
        "mode": scores.predicted.value,
    }


def _estimate_one(registry: Registry, name: str, f: ColumnFeatures,
                  shape: SectionShape) -> dict:
    if name in CLOSED_FORM_NAMES:
        from .closed_form import EstimatorFamily, estimate

        e = estimate(EstimatorFamily(name), f, shape)
        return {"a": e.a, "b": e.b, "raw_a": e.raw_a, "raw_b": e.raw_b}
    predictor = registry.predictors.get(name)
    if predictor is None:
        raise HTTPException(
            status_code=400,
            detail={"error": "UnknownModel", "message": f"no model {name!r}"})
    if predictor.shape is not shape:
        raise HTTPException(
            status_code=400,
            detail={"error": "ShapeMismatch",
                    "message": f"model {name!r} is for shape "
                               f"{predictor.shape.value}"})
    if predictor.target == "mode":
        raise HTTPException(
            status_code=400,
            detail={"error": "UnknownModel",
                    "message": f"model {name!r} is a classifier; "
                               f"use /api/v1/classify"})
    raw = predictor.predict_raw(f)
    clamped = max(raw, 0.0)
    out = {"a": None, "b": None, "raw_a": None, "raw_b": None,
           "target": predictor.target}
    out[predictor.target] = clamped
    out[f"raw_{predictor.target}"] = raw
    return out


def create_app(registry: Optional[Registry] = None,
               ui_dir: Optional[str] = None) -> FastAPI:
    """Build the service application over an immutable registry.

    ``ui_dir`` optionally mounts a directory of static files (the browser
    calculator) at /ui.
    """
    if registry is None:
        registry = Registry.load()
    app = FastAPI(title="colmp prediction service", version="1")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.registry = registry
    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True),
                  name="ui")

    @app.get("/api/v1/health")
    def health():
        return {"status": "ok", "models": len(registry.model_names())}

    @app.get("/api/v1/models")
    def models():
        entries = [{"name": n, "kind": "closed-form", "model_type": n,
                    "shape": None, "target": "ab"}
                   for n in CLOSED_FORM_NAMES]
        for name in sorted(registry.predictors):
            p = registry.predictors[name]
            entries.append({"name": name, "kind": "artifact",
                            "model_type": p.model_type,
                            "shape": p.shape.value, "target": p.target})
        return {"models": entries}

    @app.post("/api/v1/predict")
    def predict(req: PredictIn):
        shape = SectionShape(req.shape)
        f = req.features.to_features()
        estimates = {name: _estimate_one(registry, name, f, shape)
                     for name in req.models}
        x_test = None
        if shape in registry.stats:
            x_test = separation_param(f, registry.stats[shape])
        return {
            "id": req.id,
            "shape": shape.value,
            "estimates": estimates,
            "classification": _scores_json(classify_fixed(f, shape)),
            "x_test": x_test,
        }

    @app.post("/api/v1/classify")
    def classify(req: ClassifyIn):
        shape = SectionShape(req.shape)
        f = req.features.to_features()
        if req.model is None:
            scores = classify_fixed(f, shape)
        else:
            predictor = registry.predictors.get(req.model)
            if predictor is None or predictor.target != "mode":
                raise HTTPException(
                    status_code=400,
                    detail={"error": "UnknownModel",
                            "message": f"no classifier {req.model!r}"})
            try:
                scores = predictor.classify(f)
            except ColmpError as exc:
                raise HTTPException(
                    status_code=400,
                    detail={"error": type(exc).__name__,
                            "message": str(exc)}) from None
        return {"id": req.id, "shape": shape.value,
                "classification": _scores_json(scores)}

    return app


def run_server(host: str = "127.0.0.1", port: int = 8080,
               models_dir: Optional[str] = None,
               dataset_path: Optional[str] = None,
               ui_dir: Optional[str] = None) -> None:  # pragma: no cover
    import uvicorn

    app = create_app(Registry.load(models_dir, dataset_path), ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port)

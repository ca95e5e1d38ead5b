"""FastAPI service wrapping the core package.

Every endpoint mirrors one CLI command and returns the same document shapes
(the CLI is an in-process client of the same core functions). Run with:

    uvicorn balancekit.service:app
"""
from __future__ import annotations

import warnings

from fastapi import FastAPI, HTTPException

from .. import dataset as ds
from .. import evaluate as ev
from .. import reports
from ..errors import DataError
from ..forest import ForestConfig
from ..profiling import profile as compute_profile
from ..recommend import RuleModel, get_model, model_from_doc, model_to_doc, recommend
from ..resample import EVALUATION_STRATEGIES, ResampleConfig, StrategyId, apply
from ..rules import mine_rules
from .schemas import (
    DatasetPayload,
    EvaluateRequest,
    GenerateRequest,
    MineRequest,
    ProfileResponse,
    RecommendRequest,
    ResampleRequest,
)

app = FastAPI(
    title="balancekit",
    description="Profiling, resampling, evaluation and strategy recommendation "
    "for imbalanced binary classification data.",
)


def _data_error(exc: Exception) -> HTTPException:
    return HTTPException(status_code=422, detail=str(exc))


@app.get("/health")
def health():
    return {"status": "ok"}


@app.get("/strategies")
def strategies():
    return {
        "evaluated": [s.token for s in EVALUATION_STRATEGIES],
        "all": [s.token for s in StrategyId],
    }


@app.post("/profile", response_model=ProfileResponse)
def profile_endpoint(payload: DatasetPayload):
    try:
        p = compute_profile(payload.to_dataset())
    except DataError as exc:
        raise _data_error(exc) from exc
    return ProfileResponse(**reports.profile_doc(p) | {})


@app.post("/resample", response_model=DatasetPayload)
def resample_endpoint(req: ResampleRequest):
    try:
        strategy = StrategyId.from_token(req.method)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    cfg = ResampleConfig(
        perc_over=req.perc_over,
        perc_under_minority_share=req.minority_share,
        k_smote=req.k_smote,
        k_cnn=req.k_cnn,
        k_enn=req.k_enn,
        seed=req.seed,
    )
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            result = apply(strategy, req.dataset.to_dataset(), cfg)
    except DataError as exc:
        raise _data_error(exc) from exc
    return DatasetPayload.from_dataset(result)


@app.post("/evaluate")
def evaluate_endpoint(req: EvaluateRequest):
    try:
        chosen = (
            EVALUATION_STRATEGIES
            if req.strategies is None
            else tuple(StrategyId.from_token(t) for t in req.strategies)
        )
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    cfg = ResampleConfig(
        perc_over=req.perc_over, perc_under_minority_share=req.minority_share, seed=req.seed
    )
    fcfg = ForestConfig(n_trees=req.trees, seed=req.seed)
    try:
        report = ev.run_experiment(
            req.dataset.to_dataset(),
            chosen,
            cfg,
            fcfg,
            K=req.folds,
            R=req.repeats,
            seed=req.seed,
            threads=req.threads,
        )
    except DataError as exc:
        raise _data_error(exc) from exc
    return reports._fixed(reports.experiment_doc(report))


@app.post("/mine")
def mine_endpoint(req: MineRequest):
    from ..profiling import Profile

    labeled = [
        (
            Profile(
                n_instances=entry.n_instances,
                n_attributes=entry.n_attributes,
                imbalance_ratio=entry.imbalance_ratio,
                borderline_pct=entry.borderline_pct,
                overlap_pct=entry.overlap_pct,
                minority_label=entry.minority_label,
            ),
            StrategyId.from_token(entry.best_strategy),
        )
        for entry in req.profiles
    ]
    try:
        rules = mine_rules(labeled, min_support=req.min_supp, min_confidence=req.min_conf)
    except DataError as exc:
        raise _data_error(exc) from exc
    model = RuleModel(req.name, tuple(rules), provenance=f"mined from {len(labeled)} profiles")
    return reports._fixed(model_to_doc(model))


@app.post("/recommend")
def recommend_endpoint(req: RecommendRequest):
    try:
        prof = req.resolved_profile()
        model = (
            model_from_doc(req.model) if isinstance(req.model, dict) else get_model(req.model)
        )
        rec = recommend(prof, model)
    except (DataError, ValueError) as exc:
        raise _data_error(exc) from exc
    return reports._fixed(reports.recommendation_doc(rec, model))


@app.post("/generate", response_model=DatasetPayload)
def generate_endpoint(req: GenerateRequest):
    try:
        spec = ds.SynthSpec(
            n=req.n,
            p=req.features,
            informative=req.features if req.informative is None else req.informative,
            ir_target=req.ir,
            class_sep=req.sep,
            noise_flip_fraction=req.flip,
            seed=req.seed,
        )
        generated = ds.make_imbalanced(spec)
    except DataError as exc:
        raise _data_error(exc) from exc
    return DatasetPayload.from_dataset(generated)

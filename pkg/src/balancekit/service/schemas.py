"""Pydantic request/response models for the HTTP service."""
from __future__ import annotations

from pydantic import BaseModel, Field

from ..dataset import Dataset
from ..errors import DataError


class DatasetPayload(BaseModel):
    """Inline dataset: row-major features plus one label per row."""

    feature_names: list[str]
    features: list[list[float]]
    labels: list[str]
    minority_label: str | None = None

    def to_dataset(self) -> Dataset:
        from ..dataset import _detect_minority

        minority = _detect_minority(self.labels, self.minority_label)
        return Dataset(self.features, self.labels, minority, tuple(self.feature_names))

    @classmethod
    def from_dataset(cls, d: Dataset) -> "DatasetPayload":
        return cls(
            feature_names=list(d.feature_names),
            features=[[float(v) for v in row] for row in d.features],
            labels=[str(v) for v in d.labels],
            minority_label=d.minority_label,
        )


class ProfileResponse(BaseModel):
    n_instances: int
    n_attributes: int
    imbalance_ratio: float
    borderline_pct: float
    overlap_pct: float
    minority_label: str


class ResampleRequest(BaseModel):
    dataset: DatasetPayload
    method: str = "smote"
    perc_over: int = 500
    minority_share: float = 0.5
    k_smote: int = 6
    k_cnn: int = 1
    k_enn: int = 3
    seed: int = 0


class EvaluateRequest(BaseModel):
    dataset: DatasetPayload
    strategies: list[str] | None = None  # None = the eight compared strategies
    folds: int = 10
    repeats: int = 5
    trees: int = 100
    perc_over: int = 500
    minority_share: float = 0.5
    seed: int = 0
    threads: int = 1


class LabeledProfile(BaseModel):
    n_instances: int
    n_attributes: int
    imbalance_ratio: float
    borderline_pct: float
    overlap_pct: float
    minority_label: str = ""
    best_strategy: str


class MineRequest(BaseModel):
    profiles: list[LabeledProfile]
    min_conf: float = 0.9
    min_supp: float = 0.05
    name: str = "user-model"


class RecommendRequest(BaseModel):
    """Recommend from an explicit profile, or from an inline dataset that the
    service profiles first. ``model`` is a built-in name or an inline model doc."""

    profile: ProfileResponse | None = None
    dataset: DatasetPayload | None = None
    model: str | dict = "builtin-overall"

    def resolved_profile(self):
        from ..profiling import Profile, profile

        if self.profile is not None:
            return Profile(**self.profile.model_dump())
        if self.dataset is not None:
            return profile(self.dataset.to_dataset())
        raise DataError("provide either 'profile' or 'dataset'")


class GenerateRequest(BaseModel):
    n: int
    ir: float
    features: int = Field(gt=0)
    informative: int | None = None
    sep: float = 1.0
    flip: float = 0.0
    seed: int = 0

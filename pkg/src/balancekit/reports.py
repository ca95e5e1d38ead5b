"""JSON/CSV report documents shared by the CLI and the HTTP service.

Floats are rounded to 12 significant digits before serialization so a fixed
seed yields byte-identical output files across runs and machines.
"""
from __future__ import annotations

import json
import math

from .errors import DataError
from .evaluate import ExperimentReport
from .profiling import Profile
from .recommend import Recommendation, RuleModel, rule_to_doc

SCHEMA_VERSION = 1


def _fixed(value):
    if isinstance(value, float):
        if math.isinf(value):
            return "-inf" if value < 0 else "inf"
        if math.isnan(value):
            return None
        return float(f"{value:.12g}")
    if isinstance(value, dict):
        return {k: _fixed(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_fixed(v) for v in value]
    return value


def dump_json(doc: dict) -> str:
    return json.dumps(_fixed(doc), indent=2, allow_nan=False) + "\n"


def profile_doc(p: Profile) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "profile",
        "n_instances": p.n_instances,
        "n_attributes": p.n_attributes,
        "imbalance_ratio": p.imbalance_ratio,
        "borderline_pct": p.borderline_pct,
        "overlap_pct": p.overlap_pct,
        "minority_label": p.minority_label,
    }


def profile_from_doc(doc: dict) -> Profile:
    if doc.get("kind") != "profile":
        raise DataError("document is not a profile")
    try:
        return Profile(
            n_instances=int(doc["n_instances"]),
            n_attributes=int(doc["n_attributes"]),
            imbalance_ratio=float(doc["imbalance_ratio"]),
            borderline_pct=float(doc["borderline_pct"]),
            overlap_pct=float(doc["overlap_pct"]),
            minority_label=str(doc.get("minority_label", "")),
        )
    except KeyError as exc:
        raise DataError(f"profile document missing field {exc}") from exc


def recommendation_doc(rec: Recommendation, model: RuleModel) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "recommendation",
        "model": model.name,
        "strategy": rec.strategy.token,
        "strategy_display": rec.strategy.display,
        "fallback": rec.fallback,
        "score": {"confidence": rec.score[0], "lift": rec.score[1]},
        "matched_rules": [rule_to_doc(r) for r in rec.matched_rules],
    }


def experiment_doc(report: ExperimentReport) -> dict:
    results = {
        token: {
            metric: {"mean": report.means[token][metric], "std": report.stds[token][metric]}
            for metric in report.metrics
        }
        for token in (s.token for s in report.strategies)
    }
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "experiment_report",
        "folds": report.K,
        "repeats": report.R,
        "seed": report.seed,
        "alpha": report.alpha,
        "strategies": [s.token for s in report.strategies],
        "metrics": list(report.metrics),
        "results": results,
        "avg_ranks": {s.token: report.avg_ranks[s.token] for s in report.strategies},
        "friedman": {
            "statistic": report.friedman_statistic,
            "p_value": report.friedman_p,
            "df": len(report.strategies) - 1,
        },
        "nemenyi_cd": report.nemenyi_cd,
        "best_strategy": report.best_strategy.token,
    }


def folds_csv(report: ExperimentReport) -> str:
    """Flat per-fold values: strategy,metric,repetition,fold,value."""
    lines = ["strategy,metric,repetition,fold,value"]
    for s in report.strategies:
        for metric in report.metrics:
            values = report.fold_values[s.token][metric]
            for rep in range(report.R):
                for fold in range(report.K):
                    lines.append(f"{s.token},{metric},{rep},{fold},{values[rep, fold]:.12g}")
    return "\n".join(lines) + "\n"


def labeled_profiles_from_doc(doc) -> list:
    """Parse a labeled-profiles document: either the versioned wrapper
    {kind: labeled_profiles, profiles: [...]} or a bare list of entries, each
    a profile document plus a 'best_strategy' token."""
    from .resample import StrategyId

    if isinstance(doc, dict):
        if doc.get("kind") != "labeled_profiles":
            raise DataError("document is not a labeled_profiles collection")
        entries = doc.get("profiles", [])
    else:
        entries = doc
    if not isinstance(entries, list) or not entries:
        raise DataError("no labeled profiles found")
    out = []
    for entry in entries:
        if "best_strategy" not in entry:
            raise DataError("labeled profile entry missing 'best_strategy'")
        profile = profile_from_doc({**entry, "kind": "profile"})
        out.append((profile, StrategyId.from_token(entry["best_strategy"])))
    return out

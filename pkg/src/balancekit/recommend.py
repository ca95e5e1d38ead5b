"""Strategy recommendation from interval rule models.

Ships two built-in reference models: one selecting by the balanced-accuracy
index, one by the overall significance-test outcome across all metrics.
Their interval bounds and quality measures are stored as literal data;
coarsely rounded bounds stay rounded, so matching near those boundaries
inherits the rounding. A profile matches a rule when every antecedent
interval contains the profile's raw meta-feature value; no re-binning
happens at recommendation time.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import DataError
from .profiling import Profile
from .resample import StrategyId
from .rules import Interval, Rule

RULE_MODEL_SCHEMA_VERSION = 1

FALLBACK_STRATEGY = StrategyId.SMOTE  # best performer across most mined rules

_INF = math.inf


@dataclass(frozen=True)
class RuleModel:
    name: str
    rules: tuple[Rule, ...]
    provenance: str = ""


@dataclass(frozen=True)
class Recommendation:
    strategy: StrategyId
    matched_rules: tuple[Rule, ...]
    score: tuple[float, float]  # (confidence, lift) of the winning strategy
    fallback: bool


def matches(rule: Rule, p: Profile) -> bool:
    """True when every antecedent interval contains the profile's value."""
    values = p.meta_values()
    return all(interval.contains(values[name]) for name, interval in rule.antecedent)


def recommend(p: Profile, model: RuleModel) -> Recommendation:
    """Top strategy among matching rules, ranked by (max confidence, max
    lift, matching-rule count, fixed strategy order); SMOTE when nothing
    matches, flagged as a fallback."""
    if not model.rules:
        raise DataError(f"rule model {model.name!r} is empty")
    hits = [r for r in model.rules if matches(r, p)]
    if not hits:
        return Recommendation(FALLBACK_STRATEGY, (), (0.0, 0.0), fallback=True)
    by_strategy: dict[StrategyId, list[Rule]] = {}
    for rule in hits:
        by_strategy.setdefault(rule.strategy, []).append(rule)

    def sort_key(strategy: StrategyId):
        rules = by_strategy[strategy]
        return (
            -max(r.confidence for r in rules),
            -max(r.lift for r in rules),
            -len(rules),
            strategy.value,
        )

    winner = sorted(by_strategy, key=sort_key)[0]
    ordered = sorted(hits, key=lambda r: (r.strategy is not winner, -r.confidence, -r.lift))
    score = (
        max(r.confidence for r in by_strategy[winner]),
        max(r.lift for r in by_strategy[winner]),
    )
    return Recommendation(winner, tuple(ordered), score, fallback=False)


def _rule(conditions, strategy, conf, lift, lev, conv) -> Rule:
    antecedent = tuple(
        (name, Interval(lo, hi, lower_open=True, upper_open=math.isinf(hi)))
        for name, lo, hi in conditions
    )
    return Rule(
        antecedent=antecedent,
        strategy=strategy,
        confidence=conf,
        lift=lift,
        leverage=lev,
        conviction=conv,
        support=None,
    )


def _builtin_iba() -> RuleModel:
    S = StrategyId
    rules = (
        _rule([("IR", -_INF, 48), ("BL%", 6.75, 12.56), ("OVL%", 78.8, _INF)], S.ROS, 1.00, 9.00, 0.03, 1.78),
        _rule([("IR", -_INF, 48), ("BL%", 12.56, 18.38), ("OVL%", 44.4, 61.6)], S.ORIGINAL, 1.00, 6.75, 0.03, 1.70),
        _rule([("IR", -_INF, 48), ("BL%", -_INF, 6.75), ("OVL%", 44.4, 61.6)], S.SMOTE_TL, 1.00, 3.00, 0.02, 1.33),
        _rule([("BL%", -_INF, 6.75), ("OVL%", 61.6, 78.8)], S.SMOTE_CNN, 1.00, 1.64, 0.01, 0.78),
        _rule([("IR", 48, 91), ("BL%", -_INF, 6.75), ("OVL%", 61.6, 78.8)], S.SMOTE, 1.00, 1.64, 0.01, 0.78),
        _rule([("IR", 48, 91), ("BL%", -_INF, 6.75), ("OVL%", 78.8, _INF)], S.ROS, 1.00, 1.64, 0.01, 0.78),
        _rule([("IR", -_INF, 48), ("#Instances", -_INF, 3154)], S.SMOTE, 1.00, 1.54, 0.05, 2.46),
        _rule([("#Instances", -_INF, 3007), ("#Attributes", -_INF, 22), ("OVL%", 61.6, 78.8)], S.SMOTE, 1.00, 1.29, 0.02, 1.11),
        _rule([("#Instances", -_INF, 3007), ("OVL%", 44.4, 61.6)], S.SMOTE, 1.00, 1.54, 0.03, 1.41),
        _rule([("#Attributes", -_INF, 22), ("BL%", -_INF, 6.75)], S.SMOTE_OSS, 1.00, 1.29, 0.02, 1.11),
    )
    return RuleModel("builtin-iba", rules, provenance="built-in reference model: best strategy by balanced-accuracy index")


def _builtin_overall() -> RuleModel:
    S = StrategyId
    rules = (
        _rule([("IR", -_INF, 48), ("BL%", 12.56, 18.38)], S.ORIGINAL, 1.00, 8.00, 0.04, 1.75),
        _rule([("IR", -_INF, 48), ("BL%", 6.75, 12.56), ("OVL%", 78.8, _INF)], S.ROS, 1.00, 5.00, 0.04, 1.60),
        _rule([("BL%", 6.75, 12.56), ("OVL%", 44.4, 61.6)], S.SMOTE, 1.00, 4.44, 0.04, 1.55),
        _rule([("IR", -_INF, 48), ("BL%", -_INF, 6.75), ("OVL%", 44.4, 61.6)], S.SMOTE_TL, 1.00, 4.44, 0.04, 1.55),
        _rule([("IR", 48, 91), ("OVL%", 78.8, _INF)], S.SMOTE_TL, 1.00, 4.00, 0.04, 1.50),
        _rule([("IR", 134, 178)], S.ROS, 1.00, 2.86, 0.03, 1.30),
        _rule([("BL%", 6.75, 12.56), ("OVL%", 78.8, _INF)], S.ROS, 1.00, 2.86, 0.03, 1.30),
        _rule([("#Instances", -_INF, 3007), ("OVL%", 44.4, 61.6)], S.SMOTE, 1.00, 1.48, 0.04, 1.63),
        _rule([("#Attributes", -_INF, 22), ("BL%", -_INF, 6.75)], S.SMOTE_CNN, 1.00, 1.29, 0.02, 0.68),
        _rule([("IR", 48, 91), ("#Attributes", -_INF, 22)], S.SMOTE_OSS, 1.00, 1.29, 0.02, 0.68),
    )
    return RuleModel("builtin-overall", rules, provenance="built-in reference model: best strategy across all metrics")


def builtin_models() -> tuple[RuleModel, RuleModel]:
    """(builtin-iba, builtin-overall), each holding its 10 reference rules."""
    return _builtin_iba(), _builtin_overall()


def get_model(name_or_path: str) -> RuleModel:
    """Resolve a built-in model name or load a persisted model document."""
    for model in builtin_models():
        if model.name == name_or_path:
            return model
    try:
        with open(name_or_path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DataError(f"unknown model {name_or_path!r}: not a builtin and {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{name_or_path}: invalid model document: {exc}") from exc
    return model_from_doc(doc)


def _bound_to_doc(v: float):
    if math.isinf(v):
        return "-inf" if v < 0 else "inf"
    return v


def _bound_from_doc(v) -> float:
    if isinstance(v, str):
        return float(v)
    return float(v)


def rule_to_doc(r: Rule) -> dict:
    return {
        "antecedent": [
            {
                "feature": name,
                "lower": _bound_to_doc(i.lower),
                "upper": _bound_to_doc(i.upper),
                "lower_open": i.lower_open,
                "upper_open": i.upper_open,
            }
            for name, i in r.antecedent
        ],
        "strategy": r.strategy.token,
        "support": r.support,
        "confidence": r.confidence,
        "lift": r.lift,
        "leverage": r.leverage,
        "conviction": _bound_to_doc(r.conviction),
    }


def model_to_doc(model: RuleModel) -> dict:
    """Versioned plain-JSON document for a rule model; infinities become
    the literal tokens 'inf' / '-inf'."""
    return {
        "schema_version": RULE_MODEL_SCHEMA_VERSION,
        "kind": "rule_model",
        "name": model.name,
        "provenance": model.provenance,
        "rules": [rule_to_doc(r) for r in model.rules],
    }


def model_from_doc(doc: dict) -> RuleModel:
    if doc.get("kind") != "rule_model":
        raise DataError("document is not a rule model")
    if doc.get("schema_version") != RULE_MODEL_SCHEMA_VERSION:
        raise DataError(f"unsupported rule model schema version {doc.get('schema_version')!r}")
    rules = []
    for r in doc["rules"]:
        antecedent = tuple(
            (
                item["feature"],
                Interval(
                    _bound_from_doc(item["lower"]),
                    _bound_from_doc(item["upper"]),
                    lower_open=bool(item["lower_open"]),
                    upper_open=bool(item["upper_open"]),
                ),
            )
            for item in r["antecedent"]
        )
        rules.append(
            Rule(
                antecedent=antecedent,
                strategy=StrategyId.from_token(r["strategy"]),
                confidence=float(r["confidence"]),
                lift=float(r["lift"]),
                leverage=float(r["leverage"]),
                conviction=_bound_from_doc(r["conviction"]),
                support=None if r.get("support") is None else float(r["support"]),
            )
        )
    return RuleModel(str(doc["name"]), tuple(rules), provenance=str(doc.get("provenance", "")))

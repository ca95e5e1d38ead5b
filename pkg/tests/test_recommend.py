import json
import math

import pytest

from balancekit.errors import DataError
from balancekit.profiling import Profile
from balancekit.recommend import (
    Recommendation,
    RuleModel,
    builtin_models,
    get_model,
    matches,
    model_from_doc,
    model_to_doc,
    recommend,
)
from balancekit.resample import StrategyId
from balancekit.rules import Interval, Rule

# Meta-feature catalog of public benchmark datasets (name, #inst, #attrib,
# IR, BL%, OVL%) used to exercise the built-in models end to end.
CATALOG = [
    ("newthyroid", 215, 5, 4.84, 4, 45),
    ("glass6", 214, 9, 6.38, 7, 73),
    ("susy", 15000, 18, 7.69, 30, 87),
    ("gd2", 6000, 6, 7.74, 23, 69),
    ("yeast3", 1484, 8, 8.10, 10, 63),
    ("ecoli3", 336, 7, 8.6, 14, 45),
    ("page-blocks0", 5472, 10, 8.78, 8, 19),
    ("hill-valley", 606, 100, 8.93, 24, 55),
    ("ecoli-046-vs-5", 203, 6, 9.15, 7, 49),
    ("gd15", 11000, 40, 9.36, 15, 44),
    ("vowel0", 988, 13, 9.97, 2, 68),
    ("glass-016-vs-2", 192, 9, 10.29, 18, 71),
    ("glass2", 214, 9, 11.59, 18, 71),
    ("infection", 4615, 15, 13.89, 14, 61),
    ("ecoli4", 336, 7, 15.80, 3, 56),
    ("page-blocks-13-vs-4", 472, 10, 15.85, 1.7, 10),
    ("abalone-9-18", 731, 7, 16.40, 9, 62),
    ("glass5", 214, 9, 22.77, 7, 60),
    ("yeast-2-vs-8", 482, 8, 23.10, 4, 71),
    ("gd3", 5500, 30, 24.70, 11, 91),
    ("yeast4", 1484, 8, 28.10, 6, 57),
    ("yeast5", 1484, 8, 32.73, 3, 48),
    ("gd6", 1600, 25, 38.00, 7, 88),
    ("wineqlty-white-3-vs-7", 900, 11, 44.0, 4, 63),
    ("wineqlty-red-8-vs-67", 855, 11, 46.5, 5.7, 67),
    ("gd1", 2500, 40, 54.55, 5.2, 93),
    ("wineqlty-white-39-vs-5", 1482, 11, 58.28, 3.77, 60),
    ("gd4", 2500, 13, 59.00, 5, 76),
    ("gd5", 2000, 5, 59.61, 4.55, 55),
    ("gd7", 6000, 100, 60.85, 4.46, 96),
    ("gd8", 3500, 15, 62.63, 4.7, 83),
    ("gd9", 10000, 50, 62.69, 4.7, 94),
    ("abalone-20-vs-8910", 1916, 7, 72.69, 2.71, 58),
    ("gd10", 10100, 60, 72.72, 4, 95),
    ("poker-8-vs-6", 1477, 10, 85.88, 0.94, 78),
    ("gd11", 3000, 3, 99.00, 3.3, 61),
    ("abalone19", 4174, 7, 129.44, 2, 59),
    ("gd12", 6000, 20, 156.89, 2.2, 90),
    ("gd13", 5000, 5, 165.66, 1.7, 66),
    ("gd14", 10000, 60, 221.22, 1.43, 92),
]


def catalog_profile(name) -> Profile:
    row = next(r for r in CATALOG if r[0] == name)
    return Profile(
        n_instances=row[1], n_attributes=row[2], imbalance_ratio=row[3],
        borderline_pct=row[4], overlap_pct=row[5], minority_label="positive",
    )


class TestBuiltinModels:
    def test_rule_counts(self):
        iba_model, overall_model = builtin_models()
        assert len(iba_model.rules) == 10
        assert len(overall_model.rules) == 10
        assert iba_model.name == "builtin-iba"
        assert overall_model.name == "builtin-overall"

    def test_iba_first_rule_contents(self):
        iba_model, _ = builtin_models()
        rule = iba_model.rules[0]
        assert rule.strategy is StrategyId.ROS
        assert rule.confidence == 1.00
        assert rule.lift == 9.00
        assert rule.leverage == 0.03
        assert rule.conviction == 1.78
        bounds = {name: (i.lower, i.upper) for name, i in rule.antecedent}
        assert bounds == {
            "IR": (-math.inf, 48),
            "BL%": (6.75, 12.56),
            "OVL%": (78.8, math.inf),
        }

    def test_overall_ir_only_rule(self):
        _, overall_model = builtin_models()
        rule = next(r for r in overall_model.rules if len(r.antecedent) == 1)
        assert rule.antecedent[0][0] == "IR"
        assert rule.antecedent[0][1].lower == 134
        assert rule.antecedent[0][1].upper == 178
        assert rule.strategy is StrategyId.ROS

    def test_inconsistent_printed_instance_bins_preserved(self):
        iba_model, _ = builtin_models()
        uppers = {
            interval.upper
            for rule in iba_model.rules
            for name, interval in rule.antecedent
            if name == "#Instances"
        }
        assert uppers == {3154, 3007}


class TestMatches:
    def rule_ir_bl(self):
        return Rule(
            antecedent=(
                ("IR", Interval(-math.inf, 48)),
                ("BL%", Interval(12.56, 18.38)),
            ),
            strategy=StrategyId.ORIGINAL,
            confidence=1.0, lift=8.0, leverage=0.04, conviction=1.75,
        )

    def test_ecoli3_matches(self):
        assert matches(self.rule_ir_bl(), catalog_profile("ecoli3"))

    def test_glass6_does_not_match(self):
        assert not matches(self.rule_ir_bl(), catalog_profile("glass6"))

    def test_left_open_boundary(self):
        profile = Profile(336, 7, 8.6, 12.56, 45.0, "positive")
        assert not matches(self.rule_ir_bl(), profile)

    def test_removing_conditions_is_monotone(self):
        rule = self.rule_ir_bl()
        relaxed = Rule(
            antecedent=rule.antecedent[:1], strategy=rule.strategy,
            confidence=1.0, lift=1.0, leverage=0.0, conviction=1.0,
        )
        for name, *values in CATALOG:
            p = catalog_profile(name)
            if matches(rule, p):
                assert matches(relaxed, p)


class TestRecommend:
    def test_ecoli3_overall_original(self):
        _, overall_model = builtin_models()
        rec = recommend(catalog_profile("ecoli3"), overall_model)
        assert rec.strategy is StrategyId.ORIGINAL
        assert not rec.fallback
        assert rec.score[0] == 1.0

    def test_gd1_overall_smote_tl(self):
        _, overall_model = builtin_models()
        rec = recommend(catalog_profile("gd1"), overall_model)
        assert rec.strategy is StrategyId.SMOTE_TL

    def test_newthyroid_iba_smote_tl(self):
        iba_model, _ = builtin_models()
        rec = recommend(catalog_profile("newthyroid"), iba_model)
        assert rec.strategy is StrategyId.SMOTE_TL
        assert all(r.strategy is StrategyId.SMOTE_TL for r in rec.matched_rules[:1])

    def test_fallback_when_nothing_matches(self):
        _, overall_model = builtin_models()
        p = Profile(50000, 500, 1000.0, 99.0, 5.0, "positive")
        rec = recommend(p, overall_model)
        assert rec.fallback
        assert rec.strategy is StrategyId.SMOTE
        assert rec.matched_rules == ()

    def test_single_firing_rule_consistency(self):
        _, overall_model = builtin_models()
        for name, *_ in CATALOG:
            p = catalog_profile(name)
            firing = [r for r in overall_model.rules if matches(r, p)]
            if len(firing) == 1:
                rec = recommend(p, overall_model)
                assert rec.strategy is firing[0].strategy, name

    def test_empty_model_rejected(self):
        with pytest.raises(DataError):
            recommend(catalog_profile("ecoli3"), RuleModel("empty", ()))


class TestModelPersistence:
    def test_round_trip(self, tmp_path):
        iba_model, _ = builtin_models()
        doc = model_to_doc(iba_model)
        text = json.dumps(doc)
        restored = model_from_doc(json.loads(text))
        assert restored == iba_model

    def test_infinite_bounds_tokenized(self):
        iba_model, _ = builtin_models()
        doc = model_to_doc(iba_model)
        first = doc["rules"][0]["antecedent"][0]
        assert first["lower"] == "-inf"
        serialized = json.dumps(doc)
        assert "Infinity" not in serialized

    def test_mined_conviction_inf_round_trip(self):
        rule = Rule(
            antecedent=(("IR", Interval(-math.inf, 48)),),
            strategy=StrategyId.SMOTE,
            confidence=1.0, lift=2.0, leverage=0.1, conviction=math.inf, support=0.5,
        )
        model = RuleModel("m", (rule,))
        doc = model_to_doc(model)
        assert doc["rules"][0]["conviction"] == "inf"
        assert model_from_doc(doc).rules[0].conviction == math.inf

    def test_get_model_builtin_and_file(self, tmp_path):
        assert get_model("builtin-iba").name == "builtin-iba"
        path = tmp_path / "model.json"
        _, overall_model = builtin_models()
        path.write_text(json.dumps(model_to_doc(overall_model)))
        assert get_model(str(path)) == overall_model
        with pytest.raises(DataError):
            get_model("no-such-model")

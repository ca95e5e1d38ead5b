"""Association-rule machinery for strategy selection.

Meta-feature values are discretized into five equal-width intervals over
their observed range, each labeled dataset becomes a transaction of interval
items plus one best-strategy item, and Apriori mines the frequent itemsets
from which best-strategy rules are generated with confidence, lift, leverage
and conviction attached.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

from .errors import DataError
from .profiling import META_FEATURES, Profile
from .resample import StrategyId

BEST = "BEST"  # reserved item name for the consequent


def _fmt(v: float) -> str:
    if math.isinf(v):
        return "-inf" if v < 0 else "inf"
    return f"{v:g}"


@dataclass(frozen=True)
class Interval:
    """Numeric interval, open/closed per side, printable as e.g. (6.75-12.56]."""

    lower: float
    upper: float
    lower_open: bool = True
    upper_open: bool = False

    def __post_init__(self):
        if not self.lower < self.upper:
            raise DataError(f"empty interval: lower={self.lower}, upper={self.upper}")

    def contains(self, x: float) -> bool:
        lo_ok = x > self.lower if self.lower_open else x >= self.lower
        hi_ok = x < self.upper if self.upper_open else x <= self.upper
        return lo_ok and hi_ok

    def __str__(self) -> str:
        left = "(" if self.lower_open else "["
        right = ")" if self.upper_open else "]"
        return f"{left}{_fmt(self.lower)}-{_fmt(self.upper)}{right}"


@dataclass(frozen=True)
class Rule:
    """Interval conditions on meta-features implying a best strategy."""

    antecedent: tuple[tuple[str, Interval], ...]
    strategy: StrategyId
    confidence: float
    lift: float
    leverage: float
    conviction: float  # +inf when confidence is 1 in mined rules
    support: float | None = None

    def __str__(self) -> str:
        conditions = " & ".join(f"{name} = {interval}" for name, interval in self.antecedent)
        return f"{conditions} -> {self.strategy.display}"


@dataclass(frozen=True)
class TransactionBase:
    transactions: tuple[frozenset, ...]
    bins: dict


def equal_width_bins(lo: float, hi: float, k: int = 5) -> list[Interval]:
    """k left-open right-closed intervals with equal-width interior cuts;
    the first opens at -inf and the last runs to +inf."""
    if not lo < hi:
        raise DataError(f"cannot bin a constant range [{lo}, {hi}]")
    if k < 1:
        raise DataError("bin count must be >= 1")
    cuts = [lo + i * (hi - lo) / k for i in range(1, k)]
    bounds = [-math.inf] + cuts + [math.inf]
    out = []
    for i in range(k):
        upper_open = i == k - 1
        out.append(Interval(bounds[i], bounds[i + 1], lower_open=True, upper_open=upper_open))
    return out


def _bin_of(bins: list[Interval], x: float) -> Interval:
    for interval in bins:
        if interval.contains(x):
            return interval
    raise DataError(f"value {x} falls in no interval")  # unreachable: bins partition R


def to_transactions(labeled_profiles) -> TransactionBase:
    """Turn (Profile, StrategyId) pairs into interval-item transactions.

    Bins come from the observed min/max of each meta-feature across the
    profiles; a feature constant across all profiles gets one catch-all
    interval. Every transaction holds 5 interval items plus one BEST item.
    """
    pairs = [(p, s) for p, s in labeled_profiles]
    if len(pairs) < 2:
        raise DataError("need at least 2 labeled profiles to mine rules")
    values = {name: [p.meta_values()[name] for p, _ in pairs] for name in META_FEATURES}
    bins = {}
    for name in META_FEATURES:
        lo, hi = min(values[name]), max(values[name])
        if lo == hi:
            bins[name] = [Interval(-math.inf, math.inf, upper_open=True)]
        else:
            bins[name] = equal_width_bins(lo, hi, 5)
    transactions = []
    for p, strategy in pairs:
        items = {(name, _bin_of(bins[name], p.meta_values()[name])) for name in META_FEATURES}
        items.add((BEST, strategy.token))
        transactions.append(frozenset(items))
    return TransactionBase(tuple(transactions), bins)


def _item_key(item) -> str:
    return repr(item)


def apriori(transactions, min_support: float) -> dict[frozenset, float]:
    """All itemsets with support >= min_support, levelwise with the
    downward-closure prune. Support is the containing-transaction fraction."""
    transactions = [frozenset(t) for t in transactions]
    n = len(transactions)
    if n == 0:
        raise DataError("empty transaction base")
    if not 0 < min_support <= 1:
        raise DataError("min_support must be in (0, 1]")

    counts: dict = {}
    for t in transactions:
        for item in t:
            counts[item] = counts.get(item, 0) + 1
    frequent: dict[frozenset, float] = {}
    level = []
    for item in sorted(counts, key=_item_key):
        support = counts[item] / n
        if support >= min_support:
            frequent[frozenset([item])] = support
            level.append((item,))

    while level:
        candidates = []
        for a, b in combinations(level, 2):
            if a[:-1] == b[:-1]:  # join on shared prefix (items kept sorted)
                candidate = a + (b[-1],)
                if all(
                    frozenset(candidate[:i] + candidate[i + 1 :]) in frequent
                    for i in range(len(candidate))
                ):
                    candidates.append(candidate)
        next_level = []
        for candidate in candidates:
            cset = frozenset(candidate)
            support = sum(1 for t in transactions if cset <= t) / n
            if support >= min_support:
                frequent[cset] = support
                next_level.append(candidate)
        level = next_level
    return frequent


def generate_rules(frequents: dict, min_confidence: float) -> list[Rule]:
    """Best-strategy rules from the frequent itemsets.

    Only itemsets holding exactly one BEST item and at least one interval
    item are considered; the BEST item is always the consequent. Conviction
    is +inf at confidence 1.
    """
    if not 0 < min_confidence <= 1:
        raise DataError("min_confidence must be in (0, 1]")
    rules = []
    for itemset, support in frequents.items():
        best_items = [item for item in itemset if item[0] == BEST]
        if len(best_items) != 1 or len(itemset) < 2:
            continue
        consequent = best_items[0]
        antecedent = frozenset(itemset - {consequent})
        supp_a = frequents[antecedent]
        supp_c = frequents[frozenset([consequent])]
        confidence = support / supp_a
        if confidence < min_confidence:
            continue
        lift = confidence / supp_c
        leverage = support - supp_a * supp_c
        conviction = math.inf if confidence >= 1.0 else (1.0 - supp_c) / (1.0 - confidence)
        rules.append(
            Rule(
                antecedent=tuple(sorted(antecedent, key=_item_key)),
                strategy=StrategyId.from_token(consequent[1]),
                confidence=confidence,
                lift=lift,
                leverage=leverage,
                conviction=conviction,
                support=support,
            )
        )
    rules.sort(key=lambda r: (-r.confidence, -r.lift, [_item_key(i) for i in r.antecedent]))
    return rules


def mine_rules(labeled_profiles, min_support: float = 0.05, min_confidence: float = 0.9) -> list[Rule]:
    """End to end: transactions, Apriori, best-strategy rule generation."""
    base = to_transactions(labeled_profiles)
    frequents = apriori(base.transactions, min_support)
    return generate_rules(frequents, min_confidence)

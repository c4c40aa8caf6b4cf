"""Association-rule generation and quality measures.

Rare rules come from every split of every expanded rare itemset;
frequent rules come from splits of the maximal frequent itemsets.
Confidence filtering is done in exact rational arithmetic so threshold
equality (e.g. conf = 3/5 at min_conf 60) never hinges on float noise.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from . import bitset
from .context import Context, Itemset, SupportThresholds, absolute_count
from .errors import ConfigError, ContractError, UndefinedConfidenceError
from .mining import (
    MinedItemset,
    MinerParams,
    expand_rare,
    maximal_frequent_itemsets,
    minimal_rare_itemsets,
)

__all__ = [
    "Rule",
    "RuleSet",
    "rule_metrics",
    "get_rare_rules",
    "get_freq_rules",
    "write_rules",
]


@dataclass(frozen=True)
class Rule:
    """A rule antecedent -> consequent with its quality measures.

    support_abs counts objects containing antecedent and consequent
    together; confidence and lift derive from it. kind records which
    miner produced the rule ("rare" or "frequent").
    """

    antecedent: Itemset
    consequent: Itemset
    support_abs: int
    confidence: float
    lift: float
    kind: str

    @property
    def length(self) -> int:
        return len(self.antecedent) + len(self.consequent)

    def render(self, item_names: tuple[str, ...]) -> str:
        left = ";".join(item_names[i] for i in self.antecedent)
        right = ";".join(item_names[i] for i in self.consequent)
        return f"{left} -> {right}"


@dataclass(frozen=True)
class RuleSet:
    """Deduplicated rules in canonical (antecedent, consequent) order,
    with the mining parameters they were produced under."""

    rules: tuple[Rule, ...]
    params: MinerParams

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)


def rule_metrics(c: Context, ant: Itemset, cons: Itemset) -> tuple[int, float, float]:
    """Support, confidence, and lift of ant -> cons.

    Raises UndefinedConfidenceError when the antecedent never occurs;
    lift is 0 when the union never occurs (conf is then 0 as well).
    """
    if not ant or not cons:
        raise ContractError("rule sides must be non-empty")
    ant_mask = c.itemset_mask(ant)
    cons_mask = c.itemset_mask(cons)
    if ant_mask & cons_mask:
        raise ContractError("antecedent and consequent must be disjoint")
    tau_a = c.tau(ant_mask)
    supp_a = tau_a.bit_count()
    if supp_a == 0:
        raise UndefinedConfidenceError(
            "confidence undefined: antecedent has zero support"
        )
    tau_c = c.tau(cons_mask)
    supp_c = tau_c.bit_count()
    supp_z = (tau_a & tau_c).bit_count()
    confidence = supp_z / supp_a
    lift = 0.0 if supp_z == 0 else supp_z * c.m / (supp_a * supp_c)
    return supp_z, confidence, lift


def _conf_threshold(min_conf: float) -> Fraction:
    if not 0 < min_conf <= 100:
        raise ConfigError(f"min_conf must be in (0, 100], got {min_conf!r}")
    return Fraction(str(min_conf)) / 100


def _split_rules(
    c: Context,
    source: Iterable[MinedItemset],
    conf_thr: Fraction,
    kind: str,
    supp_cache: dict[int, int],
) -> list[Rule]:
    m = c.m
    rules: list[Rule] = []

    def supp_of(mask: int) -> int:
        cached = supp_cache.get(mask)
        if cached is None:
            cached = c.tau(mask).bit_count()
            supp_cache[mask] = cached
        return cached

    for mi in source:
        items = mi.itemset
        k = len(items)
        if k < 2:
            continue
        supp_z = mi.support_abs
        supp_cache[bitset.pack(items)] = supp_z
        for pick in range(1, (1 << k) - 1):
            ant = tuple(items[j] for j in range(k) if pick >> j & 1)
            supp_a = supp_of(bitset.pack(ant))
            if Fraction(supp_z, supp_a) < conf_thr:
                continue
            cons = tuple(items[j] for j in range(k) if not pick >> j & 1)
            supp_c = supp_of(bitset.pack(cons))
            rules.append(
                Rule(
                    antecedent=ant,
                    consequent=cons,
                    support_abs=supp_z,
                    confidence=supp_z / supp_a,
                    lift=supp_z * m / (supp_a * supp_c),
                    kind=kind,
                )
            )
    return rules


def _finish(rules: list[Rule], params: MinerParams) -> RuleSet:
    unique = {(r.antecedent, r.consequent): r for r in rules}
    ordered = tuple(
        unique[key] for key in sorted(unique, key=lambda ac: (ac[0], ac[1]))
    )
    return RuleSet(ordered, params)


def get_rare_rules(
    c: Context,
    max_supp: float | None = None,
    min_conf: float | None = None,
    max_len: int = 4,
    *,
    max_supp_abs: int | None = None,
) -> RuleSet:
    """Valid rare rules: every confident split of every rare itemset
    reachable from the minimal rare border within max_len items.

    Exactly one of max_supp (percent) and max_supp_abs must be given;
    min_conf is a percent.
    """
    if (max_supp is None) == (max_supp_abs is None):
        raise ConfigError("pass exactly one of max_supp and max_supp_abs")
    if min_conf is None:
        raise ConfigError("min_conf is required")
    if max_supp_abs is None:
        max_supp_abs = absolute_count(max_supp, c.m)
    elif max_supp_abs < 1:
        raise ConfigError(f"max_supp_abs must be at least 1, got {max_supp_abs}")
    params = MinerParams(
        SupportThresholds(max_supp=max_supp, min_conf=min_conf), max_len
    )
    conf_thr = _conf_threshold(min_conf)
    mris = minimal_rare_itemsets(c, max_supp_abs)
    rare = expand_rare(c, mris, max_supp_abs, max_len)
    rules = _split_rules(c, rare, conf_thr, "rare", {})
    return _finish(rules, params)


def get_freq_rules(
    c: Context,
    min_supp: float | None = None,
    min_conf: float | None = None,
    max_len: int = 4,
    *,
    min_supp_abs: int | None = None,
) -> RuleSet:
    """Valid frequent rules: every confident split of every maximal
    frequent itemset of at most max_len items."""
    if (min_supp is None) == (min_supp_abs is None):
        raise ConfigError("pass exactly one of min_supp and min_supp_abs")
    if min_conf is None:
        raise ConfigError("min_conf is required")
    if min_supp_abs is None:
        min_supp_abs = absolute_count(min_supp, c.m)
    elif min_supp_abs < 1:
        raise ConfigError(f"min_supp_abs must be at least 1, got {min_supp_abs}")
    params = MinerParams(
        SupportThresholds(min_supp=min_supp, min_conf=min_conf), max_len
    )
    conf_thr = _conf_threshold(min_conf)
    mfis = [mi for mi in maximal_frequent_itemsets(c, min_supp_abs) if len(mi.itemset) <= max_len]
    rules = _split_rules(c, mfis, conf_thr, "frequent", {})
    return _finish(rules, params)


def write_rules(ruleset: RuleSet, c: Context, path: str) -> None:
    """CSV dump: kind,antecedent,consequent,supp_abs,confidence,lift
    with itemsets as ;-joined item names."""
    names = c.item_names
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["kind", "antecedent", "consequent", "supp_abs", "confidence", "lift"]
        )
        for r in ruleset.rules:
            writer.writerow(
                [
                    r.kind,
                    ";".join(names[i] for i in r.antecedent),
                    ";".join(names[i] for i in r.consequent),
                    r.support_abs,
                    repr(r.confidence),
                    repr(r.lift),
                ]
            )

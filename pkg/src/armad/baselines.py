"""Comparison detectors over the same transaction-database model.

fpof and avf score low for anomalous objects, od scores high; the
Ranking polarity field records which way each one points.
"""

from __future__ import annotations

import warnings

from .context import Context, absolute_count
from .errors import ConfigError, DomainError
from .mining import frequent_itemsets
from .rules import get_freq_rules
from .scoring import HIGH, LOW, Ranking, ScoredObject, _ranked

__all__ = ["fpof", "avf", "od"]


def _resolve_abs(c: Context, percent, absolute, label: str) -> int:
    if (percent is None) == (absolute is None):
        raise ConfigError(f"pass exactly one of {label} and {label}_abs")
    if absolute is None:
        return absolute_count(percent, c.m)
    if absolute < 1:
        raise ConfigError(f"{label}_abs must be at least 1, got {absolute}")
    return absolute


def fpof(
    c: Context,
    min_supp: float | None = None,
    max_len: int = 5,
    *,
    min_supp_abs: int | None = None,
) -> Ranking:
    """Frequent-pattern outlier factor.

    Each object averages the relative supports of the frequent itemsets
    it contains (itemsets capped at max_len items); objects containing
    few frequent patterns score low and rank as anomalous.
    """
    supp_abs = _resolve_abs(c, min_supp, min_supp_abs, "min_supp")
    freq = frequent_itemsets(c, supp_abs, max_len=max_len)
    scores = [0.0] * c.m
    if not freq:
        warnings.warn(
            "no frequent itemsets at this threshold; FPOF is degenerate (all 0)",
            stacklevel=2,
        )
    else:
        # scatter each pattern's support to its supporting rows; the
        # per-row addend order is canonical itemset order either way
        for mi in freq:
            rel = mi.support_abs / c.m
            tids = mi.tids_mask
            while tids:
                low = tids & -tids
                scores[low.bit_length() - 1] += rel
                tids ^= low
        k = len(freq)
        scores = [s / k for s in scores]
    entries = [ScoredObject(t, scores[t], ()) for t in range(c.m)]
    return _ranked(entries, "fpof", LOW, c.tid_names)


def avf(c: Context) -> Ranking:
    """Attribute-value frequency over the binarized item matrix.

    Score is the mean, over all n items, of the frequency of the
    object's value for that item (presence or absence); rare value
    combinations drag the mean down.
    """
    if c.n < 1:
        raise DomainError("AVF needs at least one item column")
    present = [col.bit_count() / c.m for col in c.col_masks]
    absent = [1.0 - f for f in present]
    entries = []
    for t in range(c.m):
        row = c.row_masks[t]
        total = 0.0
        for i in range(c.n):
            total += present[i] if row >> i & 1 else absent[i]
        entries.append(ScoredObject(t, total / c.n, ()))
    return _ranked(entries, "avf", LOW, c.tid_names)


def od(
    c: Context,
    min_supp: float | None = None,
    min_conf: float | None = None,
    max_len: int = 4,
    *,
    min_supp_abs: int | None = None,
) -> Ranking:
    """Rule-violation outlier degree.

    Sums the confidences of the valid frequent rules an object
    violates, normalized by how many rules applied to it at all.
    """
    ruleset = get_freq_rules(
        c, min_supp, min_conf, max_len, min_supp_abs=min_supp_abs
    )
    ant_masks = [0] * len(ruleset.rules)
    cons_masks = [0] * len(ruleset.rules)
    for j, r in enumerate(ruleset.rules):
        for i in r.antecedent:
            ant_masks[j] |= 1 << i
        for i in r.consequent:
            cons_masks[j] |= 1 << i
    entries = []
    for t in range(c.m):
        row = c.row_masks[t]
        applicable = 0
        total = 0.0
        for j in range(len(ant_masks)):
            if ant_masks[j] & row != ant_masks[j]:
                continue
            applicable += 1
            if cons_masks[j] & row != cons_masks[j]:
                total += ruleset.rules[j].confidence
        entries.append(ScoredObject(t, total / max(1, applicable), ()))
    return _ranked(entries, "od", HIGH, c.tid_names)

"""Anomaly scoring from rule matches.

Objects are scored by the rare rules they satisfy (vr_arm) or the
frequent rules they violate (vf_arm). Weight accumulation always walks
rules in canonical rule-set order so scores are bit-reproducible.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

from . import bitset
from .context import Context, Itemset
from .errors import ConfigError, ContractError, UndefinedWeightError
from .rules import Rule, RuleSet, get_freq_rules, get_rare_rules

__all__ = [
    "MatchRecord",
    "ScoredObject",
    "Ranking",
    "matches_rare",
    "violates_freq",
    "rule_weight",
    "vr_arm",
    "vf_arm",
    "explain",
    "write_ranking",
]

HIGH = "high-is-anomalous"
LOW = "low-is-anomalous"

_EPS = 2.0**-30
_CAP = 2.0**30


@dataclass(frozen=True)
class MatchRecord:
    rule: Rule
    mode: str  # "satisfied-rare" | "violated-frequent"
    weight: float


@dataclass(frozen=True)
class ScoredObject:
    tid: int
    score: float
    matches: tuple[MatchRecord, ...]


@dataclass(frozen=True)
class Ranking:
    """Scored objects, most anomalous first.

    For high-is-anomalous detectors entries descend by score, for
    low-is-anomalous ones they ascend; ties always break by ascending
    tid name, which keeps rankings reproducible.
    """

    entries: tuple[ScoredObject, ...]
    detector: str
    polarity: str
    tid_names: tuple[str, ...]

    def complete(self) -> "Ranking":
        """Extend a flagged-only ranking to the whole dataset.

        Missing objects are appended after the scored ones with score 0,
        ordered by tid name. Detectors that score every object already
        are returned unchanged.
        """
        if len(self.entries) == len(self.tid_names):
            return self
        present = {e.tid for e in self.entries}
        missing = sorted(
            (t for t in range(len(self.tid_names)) if t not in present),
            key=lambda t: self.tid_names[t],
        )
        tail = tuple(ScoredObject(t, 0.0, ()) for t in missing)
        return replace(self, entries=self.entries + tail)


def _check_kind(rule: Rule, expected: str) -> None:
    if rule.kind != expected:
        raise ContractError(f"expected a {expected} rule, got kind={rule.kind!r}")


def matches_rare(obj: Itemset, r: Rule) -> bool:
    """An object satisfies a rare rule when it contains both sides."""
    _check_kind(r, "rare")
    members = set(obj)
    return members.issuperset(r.antecedent) and members.issuperset(r.consequent)


def violates_freq(obj: Itemset, r: Rule) -> bool:
    """An object violates a frequent rule when the antecedent applies
    but the consequent is not fully present."""
    _check_kind(r, "frequent")
    members = set(obj)
    return members.issuperset(r.antecedent) and not members.issuperset(r.consequent)


def rule_weight(r: Rule, interest_mode: str = "lift-normalized") -> float:
    """Score contribution of one matched rule.

    lift-normalized (default): |log2(lift)| * length, with lift clamped
    to [2^-30, 2^30]; zero exactly at independence. literal: the
    historical |log2(1 - lift)| * length, defined only for lift < 1.
    """
    if interest_mode == "lift-normalized":
        lift = min(max(r.lift, _EPS), _CAP)
        return abs(math.log2(lift)) * r.length
    if interest_mode == "literal":
        rest = 1.0 - r.lift
        if rest <= 0.0:
            raise UndefinedWeightError(
                f"literal interest undefined for lift {r.lift} (needs lift < 1)"
            )
        return abs(math.log2(rest)) * r.length
    raise ConfigError(f"unknown interest mode {interest_mode!r}")


def _aggregate(
    ruleset: RuleSet,
    weights: list[float],
    matched: dict[int, list[int]],
    mode: str,
    aggregation: str,
) -> list[ScoredObject]:
    entries = []
    for t in sorted(matched):
        idxs = matched[t]
        score = 0.0
        records = []
        for j in idxs:
            w = weights[j]
            score += w
            records.append(MatchRecord(ruleset.rules[j], mode, w))
        if aggregation == "mean":
            score /= len(idxs)
        entries.append(ScoredObject(t, score, tuple(records)))
    return entries


def _ranked(
    entries: list[ScoredObject],
    detector: str,
    polarity: str,
    tid_names: tuple[str, ...],
) -> Ranking:
    rev = polarity == HIGH
    ordered = sorted(
        entries,
        key=lambda e: (-e.score if rev else e.score, tid_names[e.tid]),
    )
    return Ranking(tuple(ordered), detector, polarity, tid_names)


def _check_aggregation(aggregation: str) -> None:
    if aggregation not in ("sum", "mean"):
        raise ConfigError(f"aggregation must be sum or mean, got {aggregation!r}")


def vr_arm(
    c: Context,
    max_supp: float | None = None,
    min_conf: float | None = None,
    max_len: int = 4,
    aggregation: str = "sum",
    *,
    max_supp_abs: int | None = None,
    interest_mode: str = "lift-normalized",
) -> tuple[RuleSet, Ranking]:
    """Rank objects by the rare rules they satisfy.

    Parameters
    ----------
    c : Context
    max_supp : float, optional
        Rare-side support threshold in percent; max_supp_abs is the
        absolute alternative (pass exactly one).
    min_conf : float
        Confidence threshold in percent.
    max_len : int
        Cardinality cap on mined rare itemsets.
    aggregation : {"sum", "mean"}
        How matched-rule weights combine into a score.
    interest_mode : {"lift-normalized", "literal"}
        Weight function, see rule_weight.

    Returns
    -------
    (RuleSet, Ranking)
        The mined rare rules and the flagged objects, most anomalous
        first. Objects matching no rule are not listed; use
        Ranking.complete() for a full-dataset ranking.
    """
    _check_aggregation(aggregation)
    ruleset = get_rare_rules(
        c, max_supp, min_conf, max_len, max_supp_abs=max_supp_abs
    )
    weights = [rule_weight(r, interest_mode) for r in ruleset.rules]
    # a rare rule is satisfied exactly by the supporters of its union,
    # so matching per rule is a tidset walk, not an object scan
    matched: dict[int, list[int]] = {}
    tau_cache: dict[int, int] = {}
    for j, r in enumerate(ruleset.rules):
        zmask = bitset.pack(r.antecedent) | bitset.pack(r.consequent)
        tids = tau_cache.get(zmask)
        if tids is None:
            tids = c.tau(zmask)
            tau_cache[zmask] = tids
        for t in bitset.iter_bits(tids):
            matched.setdefault(t, []).append(j)
    entries = _aggregate(ruleset, weights, matched, "satisfied-rare", aggregation)
    return ruleset, _ranked(entries, "vr-arm", HIGH, c.tid_names)


def vf_arm(
    c: Context,
    min_supp: float | None = None,
    min_conf: float | None = None,
    max_len: int = 4,
    aggregation: str = "sum",
    *,
    min_supp_abs: int | None = None,
    interest_mode: str = "lift-normalized",
) -> tuple[RuleSet, Ranking]:
    """Rank objects by the frequent rules they violate.

    Same contract as vr_arm with the frequent-rule miner and the
    violation predicate (antecedent present, consequent incomplete).
    """
    _check_aggregation(aggregation)
    ruleset = get_freq_rules(
        c, min_supp, min_conf, max_len, min_supp_abs=min_supp_abs
    )
    weights = [rule_weight(r, interest_mode) for r in ruleset.rules]
    ant_masks = [bitset.pack(r.antecedent) for r in ruleset.rules]
    cons_masks = [bitset.pack(r.consequent) for r in ruleset.rules]
    matched: dict[int, list[int]] = {}
    for t in range(c.m):
        row = c.row_masks[t]
        idxs = [
            j
            for j in range(len(ant_masks))
            if ant_masks[j] & row == ant_masks[j] and cons_masks[j] & row != cons_masks[j]
        ]
        if idxs:
            matched[t] = idxs
    entries = _aggregate(ruleset, weights, matched, "violated-frequent", aggregation)
    return ruleset, _ranked(entries, "vf-arm", HIGH, c.tid_names)


def explain(entry: ScoredObject, rules: RuleSet, c: Context) -> str:
    """Human-readable report for one ranked object.

    Lists the tid name, the score, and each matched rule with its
    measures, heaviest first (ties by rule text).
    """
    known = set(rules.rules)
    for record in entry.matches:
        if record.rule not in known:
            raise ContractError("entry was not produced from the given rule set")
    name = c.tid_names[entry.tid]
    if not entry.matches:
        return f"{name}  score {entry.score:.4f}  no matched rules\n"
    item_names = c.item_names
    lines = [f"{name}  score {entry.score:.4f}  ({len(entry.matches)} matched rules)"]
    ordered = sorted(
        entry.matches,
        key=lambda rec: (-rec.weight, rec.rule.render(item_names)),
    )
    for record in ordered:
        r = record.rule
        lines.append(
            f"  {r.render(item_names)}  (supp={r.support_abs}, conf={r.confidence:.4f}, "
            f"lift={r.lift:.4f}, weight={record.weight:.4f})"
        )
    return "\n".join(lines) + "\n"


def write_ranking(ranking: Ranking, path: str) -> None:
    """CSV dump: rank,tid,score,n_matched_rules,detector."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rank", "tid", "score", "n_matched_rules", "detector"])
        for pos, e in enumerate(ranking.entries, start=1):
            writer.writerow(
                [
                    pos,
                    ranking.tid_names[e.tid],
                    repr(e.score),
                    len(e.matches),
                    ranking.detector,
                ]
            )

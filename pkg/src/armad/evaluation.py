"""Ranking evaluation against ground-truth labels, plus the band SVG.

Metrics always run on a full-dataset ranking; truncated rankings are
completed first so detectors with different coverage stay comparable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable

from .errors import ConfigError, UndefinedMetricError
from .scoring import HIGH, Ranking

__all__ = [
    "LabelSet",
    "EvalReport",
    "load_labels",
    "ndcg",
    "auc",
    "evaluate",
    "band_svg",
    "band_diagram",
    "report_json",
    "write_report",
]


@dataclass(frozen=True)
class LabelSet:
    """Ground-truth anomalous tid names for one dataset."""

    attack_tids: frozenset[str]
    total_objects: int


@dataclass(frozen=True)
class EvalReport:
    ndcg: float
    auc: float
    n: int
    attack_positions: tuple[int, ...]


def load_labels(path: str) -> tuple[str, ...]:
    """Read label names, one per line; blanks skipped, order kept."""
    out: list[str] = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            name = line.strip()
            if name and name not in seen:
                seen.add(name)
                out.append(name)
    return tuple(out)


def _relevance(ranking: Ranking, attack_names: Iterable[str]) -> tuple[Ranking, list[int], int]:
    attacks = set(attack_names)
    if not attacks:
        raise UndefinedMetricError("metrics undefined without labeled attacks")
    unknown = attacks.difference(ranking.tid_names)
    if unknown:
        raise ConfigError(
            f"labels name tids absent from the dataset: {sorted(unknown)[:5]}"
        )
    full = ranking.complete()
    rel = [1 if ranking.tid_names[e.tid] in attacks else 0 for e in full.entries]
    return full, rel, len(attacks)


def _dcg(rel: Iterable[int]) -> float:
    total = 0.0
    for i, r in enumerate(rel, start=1):
        if r:
            total += r / math.log2(i + 1)
    return total


def ndcg(ranking: Ranking, attack_names: Iterable[str]) -> float:
    """Normalized discounted cumulative gain with binary relevance.

    The ideal ranking places all p labeled attacks on top, so missed
    attacks anywhere in the list depress the score.
    """
    _, rel, p = _relevance(ranking, attack_names)
    ideal = _dcg([1] * p)
    return _dcg(rel) / ideal


def auc(ranking: Ranking, attack_names: Iterable[str]) -> float:
    """Rank-statistic AUC: the probability a random attack scores more
    anomalous than a random normal object, counting ties as half."""
    full, rel, p = _relevance(ranking, attack_names)
    n = len(rel)
    if p == n:
        raise UndefinedMetricError("AUC undefined when every object is an attack")
    sign = 1.0 if full.polarity == HIGH else -1.0
    keyed = sorted(
        (sign * e.score, rel[pos]) for pos, e in enumerate(full.entries)
    )
    # midranks over ascending anomaly keys: least anomalous gets rank 1
    pos_rank_sum = 0.0
    i = 0
    while i < n:
        j = i
        while j < n and keyed[j][0] == keyed[i][0]:
            j += 1
        midrank = (i + 1 + j) / 2
        for k in range(i, j):
            if keyed[k][1]:
                pos_rank_sum += midrank
        i = j
    return (pos_rank_sum - p * (p + 1) / 2) / (p * (n - p))


def evaluate(ranking: Ranking, attack_names: Iterable[str]) -> EvalReport:
    """Full report: both metrics plus where the attacks landed."""
    attacks = tuple(attack_names)
    full, rel, _ = _relevance(ranking, attacks)
    positions = tuple(i for i, r in enumerate(rel, start=1) if r)
    return EvalReport(
        ndcg=ndcg(full, attacks),
        auc=auc(full, attacks),
        n=len(rel),
        attack_positions=positions,
    )


def band_svg(report: EvalReport) -> str:
    """Render the ranking band: a grey strip with one red line per
    attack, most anomalous rank at the left edge."""
    n = report.n
    span = max(1, n - 1)
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        'viewBox="0 0 800 40" width="800" height="40">',
        '  <rect x="0" y="0" width="800" height="26" fill="#d9d9d9"/>',
    ]
    for rank in report.attack_positions:
        x = 800.0 * (rank - 1) / span
        parts.append(
            f'  <line x1="{x:.4f}" y1="0" x2="{x:.4f}" y2="26" '
            'stroke="#cc0000" stroke-width="1"/>'
        )
    parts.append(
        '  <text x="0" y="38" font-size="9" fill="#444444">'
        "rank 1 (most anomalous)</text>"
    )
    parts.append(
        f'  <text x="800" y="38" font-size="9" fill="#444444" '
        f'text-anchor="end">rank {n}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def band_diagram(report: EvalReport, out: str) -> str:
    """Write the band SVG to a file and return the document text."""
    svg = band_svg(report)
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(svg)
    return svg


def report_json(report: EvalReport) -> str:
    payload = {
        "ndcg": report.ndcg,
        "auc": report.auc,
        "n": report.n,
        "attack_positions": list(report.attack_positions),
    }
    return json.dumps(payload, indent=2) + "\n"


def write_report(report: EvalReport, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(report_json(report))

"""Anomaly ranking for categorical transaction data via association rules.

The library mines rare and frequent association rules over a binary
object-by-item context and scores objects by the rare rules they
satisfy or the frequent rules they violate, alongside three classic
baseline detectors and ranking-quality evaluation.
"""

from .baselines import avf, fpof, od
from .context import (
    Context,
    Item,
    Itemset,
    SupportThresholds,
    Tidset,
    absolute_count,
    image,
    join_contexts,
    load_context,
    support,
    support_set,
    write_context,
)
from .errors import (
    ArmadError,
    ConfigError,
    ContractError,
    DomainError,
    EmptyContextError,
    ParseError,
    UndefinedConfidenceError,
    UndefinedMetricError,
    UndefinedWeightError,
)
from .evaluation import (
    EvalReport,
    LabelSet,
    auc,
    band_diagram,
    band_svg,
    evaluate,
    load_labels,
    ndcg,
    report_json,
    write_report,
)
from .mining import (
    MinedItemset,
    MinerParams,
    expand_rare,
    frequent_itemsets,
    maximal_frequent_itemsets,
    minimal_rare_itemsets,
    read_itemsets,
    write_itemsets,
)
from .rules import (
    Rule,
    RuleSet,
    get_freq_rules,
    get_rare_rules,
    rule_metrics,
    write_rules,
)
from .scoring import (
    HIGH,
    LOW,
    MatchRecord,
    Ranking,
    ScoredObject,
    explain,
    matches_rare,
    rule_weight,
    vf_arm,
    violates_freq,
    vr_arm,
    write_ranking,
)

__version__ = "0.1.0"

__all__ = [
    "ArmadError",
    "ConfigError",
    "ContractError",
    "Context",
    "DomainError",
    "EmptyContextError",
    "EvalReport",
    "HIGH",
    "Item",
    "Itemset",
    "LOW",
    "LabelSet",
    "MatchRecord",
    "MinedItemset",
    "MinerParams",
    "ParseError",
    "Ranking",
    "Rule",
    "RuleSet",
    "ScoredObject",
    "SupportThresholds",
    "Tidset",
    "UndefinedConfidenceError",
    "UndefinedMetricError",
    "UndefinedWeightError",
    "absolute_count",
    "auc",
    "avf",
    "band_diagram",
    "band_svg",
    "evaluate",
    "expand_rare",
    "explain",
    "fpof",
    "frequent_itemsets",
    "get_freq_rules",
    "get_rare_rules",
    "image",
    "join_contexts",
    "load_context",
    "load_labels",
    "matches_rare",
    "maximal_frequent_itemsets",
    "minimal_rare_itemsets",
    "ndcg",
    "od",
    "read_itemsets",
    "report_json",
    "rule_metrics",
    "rule_weight",
    "support",
    "support_set",
    "vf_arm",
    "violates_freq",
    "vr_arm",
    "write_context",
    "write_itemsets",
    "write_ranking",
    "write_report",
    "write_rules",
]

"""Shared fixtures-adjacent utilities for the test suite."""

from __future__ import annotations

import random

from armad import Context

TABLE1_ROWS = [
    ("o1", ("b", "c", "e")),
    ("o2", ("a", "c", "d")),
    ("o3", ("a", "b", "c", "d")),
    ("o4", ("a", "d")),
    ("o5", ("a", "b", "c", "d")),
    ("o6", ("a", "c", "d")),
]


def table1_context() -> Context:
    return Context.from_rows(TABLE1_ROWS)


def ids(c: Context, letters) -> tuple[int, ...]:
    return tuple(sorted(c.item_id(x) for x in letters))


def names(c: Context, itemset) -> frozenset[str]:
    return frozenset(c.items[i].name for i in itemset)


def name_rows(row_list) -> dict[str, frozenset]:
    return {tid: frozenset(row) for tid, row in row_list}


def random_context(rng: random.Random, max_m: int = 30, max_n: int = 12):
    """Random small context in the oracle-equivalence regime.

    Returns the Context plus the raw row list the oracles work on.
    Density is drawn per context from 10-60%.
    """
    m = rng.randint(1, max_m)
    n = rng.randint(1, max_n)
    density = rng.uniform(0.1, 0.6)
    rows = []
    for t in range(m):
        row = tuple(f"i{j}" for j in range(n) if rng.random() < density)
        rows.append((f"t{t:02d}", row))
    return Context.from_rows(rows), rows


def rules_as_names(c: Context, ruleset):
    """Map a RuleSet into the oracle's name-keyed rule dictionary."""
    out = {}
    for r in ruleset.rules:
        out[(names(c, r.antecedent), names(c, r.consequent))] = (
            r.support_abs,
            r.confidence,
            r.lift,
        )
    return out


def oracle_sorted_rules(c: Context, oracle_rules: dict):
    """Order an oracle rule dict canonically: by (antecedent, consequent)
    under the context's item ids. Only the ordering metadata comes from
    the context; all rule values stay the oracle's own."""
    def key(ac):
        ant, cons = ac
        return (ids(c, ant), ids(c, cons))

    out = []
    for ant, cons in sorted(oracle_rules, key=key):
        s, conf, lift = oracle_rules[(ant, cons)]
        out.append((ant, cons, s, conf, lift))
    return out

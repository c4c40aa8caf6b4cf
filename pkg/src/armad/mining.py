"""Itemset miners: frequent sets, the MFI and MRI borders, and a bounded
expansion of the rare region above the MRI border."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from . import bitset
from .context import Context, Itemset, SupportThresholds, Tidset
from .errors import ConfigError, ParseError

__all__ = [
    "MinedItemset",
    "MinerParams",
    "frequent_itemsets",
    "maximal_frequent_itemsets",
    "minimal_rare_itemsets",
    "expand_rare",
    "write_itemsets",
    "read_itemsets",
]


@dataclass(frozen=True)
class MinedItemset:
    """An itemset with its absolute support and, when cheap to keep,
    the supporting tidset as a bit mask."""

    itemset: Itemset
    support_abs: int
    tids_mask: int | None = None

    @property
    def tidset(self) -> Tidset | None:
        if self.tids_mask is None:
            return None
        return bitset.to_tuple(self.tids_mask)


@dataclass(frozen=True)
class MinerParams:
    thresholds: SupportThresholds
    max_len: int = 4

    def __post_init__(self):
        if self.max_len < 2:
            raise ConfigError(f"max_len must be at least 2, got {self.max_len}")


def _canonical(mined: Iterable[MinedItemset]) -> tuple[MinedItemset, ...]:
    return tuple(sorted(mined, key=lambda mi: mi.itemset))


def frequent_itemsets(
    c: Context, min_supp_abs: int, max_len: int | None = None
) -> tuple[MinedItemset, ...]:
    """Enumerate every non-empty itemset with support >= min_supp_abs.

    Parameters
    ----------
    c : Context
        The transaction database.
    min_supp_abs : int
        Absolute support threshold, at least 1.
    max_len : int, optional
        Cardinality cap; None means unbounded. Frequent-pattern
        consumers that only need short patterns use this to keep the
        enumeration from exploding on dense data.

    Returns
    -------
    tuple of MinedItemset
        In canonical (lexicographic item-id) order.
    """
    if min_supp_abs < 1:
        raise ConfigError(f"min_supp_abs must be at least 1, got {min_supp_abs}")
    cap = c.n if max_len is None else max_len
    out: list[MinedItemset] = []

    def extend(prefix: Itemset, prefix_tids: int, start: int) -> None:
        for i in range(start, c.n):
            tids = prefix_tids & c.col_masks[i]
            supp = tids.bit_count()
            if supp < min_supp_abs:
                continue
            items = prefix + (i,)
            out.append(MinedItemset(items, supp, tids))
            if len(items) < cap:
                extend(items, tids, i + 1)

    if cap >= 1:
        extend((), bitset.universe(c.m), 0)
    return _canonical(out)


def maximal_frequent_itemsets(
    c: Context, min_supp_abs: int
) -> tuple[MinedItemset, ...]:
    """Frequent itemsets with no frequent strict superset.

    Frequency is downward closed, so checking single-item extensions
    against the full frequent set decides maximality.
    """
    freq = frequent_itemsets(c, min_supp_abs)
    have = {mi.itemset for mi in freq}
    out = []
    for mi in freq:
        members = set(mi.itemset)
        if any(
            tuple(sorted(members | {i})) in have
            for i in range(c.n)
            if i not in members
        ):
            continue
        out.append(mi)
    return _canonical(out)


def minimal_rare_itemsets(c: Context, max_supp_abs: int) -> tuple[MinedItemset, ...]:
    """Itemsets below the support threshold whose strict subsets all sit
    at or above it.

    Levelwise search: level k extends only the k-itemsets that met the
    threshold, so a candidate falling below it has all subsets frequent
    and is minimal by construction. Zero-support minimal itemsets are
    legitimate output; rule generation filters them later.
    """
    if max_supp_abs < 1:
        raise ConfigError(f"max_supp_abs must be at least 1, got {max_supp_abs}")
    mris: list[MinedItemset] = []
    gen: list[tuple[Itemset, int]] = []
    for i in range(c.n):
        tids = c.col_masks[i]
        supp = tids.bit_count()
        if supp < max_supp_abs:
            mris.append(MinedItemset((i,), supp, tids))
        else:
            gen.append(((i,), tids))
    while gen:
        gen_keys = {items for items, _ in gen}
        nxt: list[tuple[Itemset, int]] = []
        for a in range(len(gen)):
            items_a, tids_a = gen[a]
            for b in range(a + 1, len(gen)):
                items_b, tids_b = gen[b]
                # gen is lexicographically sorted, so candidates sharing
                # the k-1 prefix form a contiguous block
                if items_a[:-1] != items_b[:-1]:
                    break
                cand = items_a + (items_b[-1],)
                if any(
                    cand[:j] + cand[j + 1 :] not in gen_keys
                    for j in range(len(cand) - 2)
                ):
                    continue
                tids = tids_a & tids_b
                supp = tids.bit_count()
                if supp < max_supp_abs:
                    mris.append(MinedItemset(cand, supp, tids))
                else:
                    nxt.append((cand, tids))
        gen = nxt
    return _canonical(mris)


def expand_rare(
    c: Context,
    mris: Iterable[MinedItemset],
    max_supp_abs: int,
    max_len: int,
) -> tuple[MinedItemset, ...]:
    """Upward closure of the minimal rare itemsets, capped by max_len.

    Produces every itemset with non-zero support below the threshold
    that contains some minimal rare itemset and has at most max_len
    items. Supersets of rare sets are rare, so the walk never needs a
    threshold check; it only prunes empty supports.
    """
    if max_len < 1:
        raise ConfigError(f"max_len must be at least 1, got {max_len}")
    visited: dict[int, MinedItemset] = {}
    queue: deque[tuple[int, int, int]] = deque()
    for mi in mris:
        if mi.support_abs == 0 or len(mi.itemset) > max_len:
            continue
        mask = bitset.pack(mi.itemset)
        if mask in visited:
            continue
        tids = mi.tids_mask if mi.tids_mask is not None else c.tau(mask)
        visited[mask] = MinedItemset(mi.itemset, mi.support_abs, tids)
        queue.append((mask, tids, len(mi.itemset)))
    while queue:
        mask, tids, k = queue.popleft()
        if k == max_len:
            continue
        # only items occurring in the supporting rows can extend with
        # non-zero support
        cand = 0
        for t in bitset.iter_bits(tids):
            cand |= c.row_masks[t]
        cand &= ~mask
        for i in bitset.iter_bits(cand):
            nmask = mask | (1 << i)
            if nmask in visited:
                continue
            ntids = tids & c.col_masks[i]
            if not ntids:
                continue
            visited[nmask] = MinedItemset(
                bitset.to_tuple(nmask), ntids.bit_count(), ntids
            )
            queue.append((nmask, ntids, k + 1))
    return _canonical(visited.values())


def write_itemsets(path: str, mined: Iterable[MinedItemset], c: Context) -> None:
    """Dump itemsets as `supp<TAB>name;name;...`, one per line."""
    names = c.item_names
    with open(path, "w", encoding="utf-8") as fh:
        for mi in mined:
            fh.write(f"{mi.support_abs}\t{';'.join(names[i] for i in mi.itemset)}\n")


def read_itemsets(path: str, c: Context) -> tuple[MinedItemset, ...]:
    """Load an itemset dump written by write_itemsets."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            supp_text, sep, names = line.partition("\t")
            if not sep or not names:
                raise ParseError("expected `supp<TAB>items`", line=lineno)
            try:
                supp = int(supp_text)
            except ValueError:
                raise ParseError(f"bad support {supp_text!r}", line=lineno) from None
            items = tuple(sorted(c.item_id(n) for n in names.split(";")))
            out.append(MinedItemset(items, supp))
    return _canonical(out)

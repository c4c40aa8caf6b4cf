"""Transaction-database model: contexts, Galois operators, and file I/O.

A context is an m x n binary relation between objects (transactions,
rows) and items (attributes, columns). Both orientations are kept as
bit masks so support computation reduces to integer intersection.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import bitset
from .errors import ConfigError, DomainError, EmptyContextError, ParseError

# An itemset is a strictly ascending tuple of item ids; a tidset the
# same over object ids. Tuples keep equality structural and hashable.
Itemset = tuple[int, ...]
Tidset = tuple[int, ...]


@dataclass(frozen=True)
class Item:
    """A column of the context."""

    id: int
    name: str
    source_tag: str | None = None


@dataclass(frozen=True)
class SupportThresholds:
    """Relative thresholds, all expressed in percent.

    Any field may be left unset; each detector validates the ones it
    needs. Conversion to absolute row counts goes through
    :func:`absolute_count`.
    """

    min_supp: float | None = None
    max_supp: float | None = None
    min_conf: float | None = None

    def __post_init__(self):
        for label in ("min_supp", "max_supp", "min_conf"):
            value = getattr(self, label)
            if value is not None and not 0 < value <= 100:
                raise ConfigError(f"{label} must be in (0, 100], got {value!r}")


def absolute_count(percent: float, m: int) -> int:
    """Convert a percent threshold into an absolute row count.

    Ceiling semantics ("at least this fraction of the m objects"),
    floor-bounded at 1. Uses exact rational arithmetic so that e.g.
    0.1% of 1000 rows is 1, not 2 via a float round-up.
    """
    if m <= 0:
        raise DomainError(f"context has no objects (m={m})")
    if not 0 < percent <= 100:
        raise ConfigError(f"percent threshold must be in (0, 100], got {percent!r}")
    return max(1, math.ceil(Fraction(str(percent)) * m / 100))


@dataclass(frozen=True)
class Context:
    """Immutable m x n transaction database.

    Parameters
    ----------
    tid_names : tuple of str
        External object identifiers, in dense-id order.
    items : tuple of Item
        Column descriptors, in dense-id order.
    row_masks : tuple of int
        Per object, the bit mask of item ids it contains.
    col_masks : tuple of int
        Per item, the bit mask of object ids containing it.

    Both masks encode the identical relation; constructors build one
    from the other. All read operations are pure, so a Context is safe
    to share across threads.
    """

    tid_names: tuple[str, ...]
    items: tuple[Item, ...]
    row_masks: tuple[int, ...]
    col_masks: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.tid_names)

    @property
    def n(self) -> int:
        return len(self.items)

    @property
    def item_names(self) -> tuple[str, ...]:
        return tuple(it.name for it in self.items)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]]) -> "Context":
        """Build a context from (tid name, item name) pairs.

        Ids are assigned in first-appearance order; duplicate pairs
        collapse to one cell.
        """
        tid_of: dict[str, int] = {}
        item_of: dict[str, int] = {}
        rows: list[int] = []
        for tid, item in pairs:
            t = tid_of.setdefault(tid, len(tid_of))
            if t == len(rows):
                rows.append(0)
            i = item_of.setdefault(item, len(item_of))
            rows[t] |= 1 << i
        if not rows:
            raise EmptyContextError("no transactions")
        cols = _invert(rows, len(item_of))
        items = tuple(Item(i, name) for name, i in item_of.items())
        return cls(tuple(tid_of), items, tuple(rows), tuple(cols))

    @classmethod
    def from_rows(cls, rows: Iterable[tuple[str, Iterable[str]]]) -> "Context":
        """Build a context from (tid name, item names) rows.

        Unlike the pair form this can express empty objects. Repeated
        tid names merge their items.
        """
        tid_of: dict[str, int] = {}
        item_of: dict[str, int] = {}
        masks: list[int] = []
        for tid, names in rows:
            t = tid_of.setdefault(tid, len(tid_of))
            if t == len(masks):
                masks.append(0)
            for name in names:
                i = item_of.setdefault(name, len(item_of))
                masks[t] |= 1 << i
        if not masks:
            raise EmptyContextError("no transactions")
        cols = _invert(masks, len(item_of))
        items = tuple(Item(i, name) for name, i in item_of.items())
        return cls(tuple(tid_of), items, tuple(masks), tuple(cols))

    # -- id lookups ----------------------------------------------------

    def item_id(self, name: str) -> int:
        for it in self.items:
            if it.name == name:
                return it.id
        raise DomainError(f"unknown item name {name!r}")

    def tid_id(self, name: str) -> int:
        try:
            return self.tid_names.index(name)
        except ValueError:
            raise DomainError(f"unknown tid name {name!r}") from None

    # -- views ---------------------------------------------------------

    @property
    def objects(self) -> tuple[Itemset, ...]:
        return tuple(bitset.to_tuple(r) for r in self.row_masks)

    @property
    def columns(self) -> tuple[Tidset, ...]:
        return tuple(bitset.to_tuple(c) for c in self.col_masks)

    # -- mask helpers ---------------------------------------------------

    def itemset_mask(self, x: Iterable[int]) -> int:
        mask = 0
        for i in x:
            if not 0 <= i < self.n:
                raise DomainError(f"item id {i} out of range 0..{self.n - 1}")
            mask |= 1 << i
        return mask

    def tidset_mask(self, y: Iterable[int]) -> int:
        mask = 0
        for t in y:
            if not 0 <= t < self.m:
                raise DomainError(f"tid {t} out of range 0..{self.m - 1}")
            mask |= 1 << t
        return mask

    def tau(self, item_mask: int) -> int:
        # tau(empty) is every object
        tids = bitset.universe(self.m)
        for i in bitset.iter_bits(item_mask):
            tids &= self.col_masks[i]
            if not tids:
                break
        return tids

    def iota(self, tid_mask: int) -> int:
        # iota(empty) is every item
        items = bitset.universe(self.n)
        for t in bitset.iter_bits(tid_mask):
            items &= self.row_masks[t]
            if not items:
                break
        return items


def _invert(rows: Sequence[int], n: int) -> list[int]:
    cols = [0] * n
    for t, mask in enumerate(rows):
        for i in bitset.iter_bits(mask):
            cols[i] |= 1 << t
    return cols


def support_set(c: Context, x: Itemset) -> Tidset:
    """Objects containing every item of x; all objects for x = ()."""
    return bitset.to_tuple(c.tau(c.itemset_mask(x)))


def image(c: Context, y: Tidset) -> Itemset:
    """Items common to every object of y; all items for y = ()."""
    return bitset.to_tuple(c.iota(c.tidset_mask(y)))


def support(c: Context, x: Itemset) -> tuple[int, float]:
    """Absolute and relative support of an itemset."""
    absolute = c.tau(c.itemset_mask(x)).bit_count()
    return absolute, absolute / c.m


def load_context(path: str, format: str = "pair-csv") -> Context:
    """Read a context from a pair-list CSV file.

    Each data line is ``tid,item`` with RFC-4180 quoting allowed. An
    optional leading header line ``tid,item`` is skipped. Tids and
    items receive dense ids in first-appearance order; duplicate pairs
    are deduplicated.

    Raises
    ------
    ParseError
        On a malformed line, with its line number.
    EmptyContextError
        When the file holds no data lines.
    """
    if format != "pair-csv":
        raise ConfigError(f"unsupported context format {format!r}")
    pairs: list[tuple[str, str]] = []
    first = True
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for row in reader:
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if first and [f.strip().lower() for f in row] == ["tid", "item"]:
                first = False
                continue
            first = False
            if len(row) != 2:
                raise ParseError(
                    f"expected 2 fields, got {len(row)}", line=reader.line_num
                )
            tid, item = row
            if not tid or not item:
                raise ParseError("empty tid or item field", line=reader.line_num)
            pairs.append((tid, item))
    if not pairs:
        raise EmptyContextError(f"no transactions in {path}")
    return Context.from_pairs(pairs)


def write_context(c: Context, path: str) -> None:
    """Serialize a context as pair-list CSV.

    Rows are emitted in tid-id order and items in item-id order, which
    makes load(write(c)) reproduce c exactly, ids included.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tid", "item"])
        names = [it.name for it in c.items]
        for t, tid in enumerate(c.tid_names):
            for i in bitset.iter_bits(c.row_masks[t]):
                writer.writerow([tid, names[i]])


def join_contexts(parts: Sequence[tuple[str, Context]]) -> Context:
    """Outer-join several contexts on tid names.

    Every item is renamed ``tag:name`` so columns from different parts
    never collide. An object absent from a part simply contributes no
    items from it. Tid order is first appearance across parts; item
    order is part order, then id order within the part.
    """
    if not parts:
        raise ConfigError("join requires at least one context")
    seen_tags = set()
    for tag, _ in parts:
        if not tag:
            raise ConfigError("join tags must be non-empty")
        if tag in seen_tags:
            raise ConfigError(f"duplicate join tag {tag!r}")
        seen_tags.add(tag)

    tid_of: dict[str, int] = {}
    for _, part in parts:
        for name in part.tid_names:
            tid_of.setdefault(name, len(tid_of))

    items: list[Item] = []
    cols: list[int] = []
    rows = [0] * len(tid_of)
    for tag, part in parts:
        remap = [tid_of[name] for name in part.tid_names]
        for it in part.items:
            new_id = len(items)
            items.append(Item(new_id, f"{tag}:{it.name}", tag))
            col = 0
            for t in bitset.iter_bits(part.col_masks[it.id]):
                jt = remap[t]
                col |= 1 << jt
                rows[jt] |= 1 << new_id
            cols.append(col)
    return Context(tuple(tid_of), tuple(items), tuple(rows), tuple(cols))

"""Bit-mask kernels for tidset/itemset work.

Sets of dense integer ids are packed into arbitrary-precision ints, one
bit per id. Intersection is then a single ``&`` and cardinality one
``bit_count()``, which is what keeps the mining loops cheap on wide
contexts.
"""

from __future__ import annotations

from typing import Iterable, Iterator


def pack(ids: Iterable[int]) -> int:
    mask = 0
    for i in ids:
        mask |= 1 << i
    return mask


def iter_bits(mask: int) -> Iterator[int]:
    # peel off the lowest set bit each round
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_tuple(mask: int) -> tuple[int, ...]:
    return tuple(iter_bits(mask))


def universe(size: int) -> int:
    return (1 << size) - 1


def contains(mask: int, sub: int) -> bool:
    return mask & sub == sub

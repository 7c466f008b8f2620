"""Move-aware word-level edit distance.

Distance between two token sequences is max(I, D) - min(I, D)/2 + M where
I is inserted words, D deleted words, and M sums, per matched block, the
block length times the fraction of the (matched) document the block moved
across.  Blocks come from iterated greedy longest-common-substring
matching; each token matches at most once per side.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class Block:
    a_start: int
    b_start: int
    length: int


@dataclass(frozen=True)
class DiffBreakdown:
    inserted: int
    deleted: int
    moved_mass: float
    distance: float


def _longest_common_block(a: Sequence[str], b: Sequence[str],
                          a_free: list[bool], b_free: list[bool],
                          occ: dict[str, list[int]]) -> Block | None:
    """Longest common substring over still-unmatched positions.

    Ties break by smallest a offset, then smallest b offset.
    """
    best_len = 0
    best_a = best_b = 0
    prev: dict[int, int] = {}
    for j, tok in enumerate(b):
        if not b_free[j]:
            prev = {}
            continue
        cur: dict[int, int] = {}
        for k in occ.get(tok, ()):
            if not a_free[k]:
                continue
            run = prev.get(k - 1, 0) + 1
            cur[k] = run
            a_start = k - run + 1
            b_start = j - run + 1
            if run > best_len or (
                run == best_len and (a_start, b_start) < (best_a, best_b)
            ):
                best_len = run
                best_a = a_start
                best_b = b_start
        prev = cur
    if best_len == 0:
        return None
    return Block(best_a, best_b, best_len)


def match_blocks(a: Sequence[str], b: Sequence[str]) -> list[Block]:
    """Greedy iterated longest-common-substring block alignment."""
    a_free = [True] * len(a)
    b_free = [True] * len(b)
    occ: dict[str, list[int]] = {}
    for i, tok in enumerate(a):
        occ.setdefault(tok, []).append(i)
    blocks: list[Block] = []
    while True:
        block = _longest_common_block(a, b, a_free, b_free, occ)
        if block is None:
            break
        blocks.append(block)
        for i in range(block.a_start, block.a_start + block.length):
            a_free[i] = False
        for j in range(block.b_start, block.b_start + block.length):
            b_free[j] = False
    return blocks


def _moved_mass(blocks: list[Block]) -> float:
    """Sum of block length x normalized center shift.

    Positions are ranks within the matched content only, so blocks that keep
    their place relative to the other matched text contribute zero even when
    surrounding text is inserted or deleted (a pure insertion has M = 0).
    """
    total = sum(bl.length for bl in blocks)
    if total == 0:
        return 0.0
    a_rank: dict[int, int] = {}
    b_rank: dict[int, int] = {}
    rank = 0
    for bl in sorted(blocks, key=lambda bl: bl.a_start):
        a_rank[bl.a_start] = rank
        rank += bl.length
    rank = 0
    for bl in sorted(blocks, key=lambda bl: bl.b_start):
        b_rank[bl.b_start] = rank
        rank += bl.length
    mass = 0.0
    for bl in blocks:
        center_a = (a_rank[bl.a_start] + bl.length / 2.0) / total
        center_b = (b_rank[bl.b_start] + bl.length / 2.0) / total
        mass += bl.length * abs(center_a - center_b)
    return mass


def edit_distance(a: Sequence[str], b: Sequence[str]) -> DiffBreakdown:
    """Move-aware edit distance with its I / D / M components.

    The pair is matched in a canonical order so that the result is exactly
    symmetric (greedy tie-breaks would otherwise depend on argument order).
    """
    swapped = (len(a), tuple(a)) > (len(b), tuple(b))
    if swapped:
        a, b = b, a
    blocks = match_blocks(a, b)
    matched = sum(bl.length for bl in blocks)
    deleted = len(a) - matched
    inserted = len(b) - matched
    if swapped:
        inserted, deleted = deleted, inserted
    moved = _moved_mass(blocks)
    distance = max(inserted, deleted) - 0.5 * min(inserted, deleted) + moved
    return DiffBreakdown(inserted=inserted, deleted=deleted,
                         moved_mass=moved, distance=distance)


def triangle_guard(d_ij: float, d_jk: float, d_ik: float) -> float:
    """Clamp d_ik so the triple satisfies the triangle inequality."""
    if d_ij < 0 or d_jk < 0 or d_ik < 0:
        raise ValueError("negative edit distance")
    return min(d_ik, d_ij + d_jk)

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from wikiq.worddiff import Block, DiffBreakdown, edit_distance, match_blocks, triangle_guard

tokens = st.lists(st.sampled_from("abcdefgh"), max_size=30)


def brute_longest_common_substring(a, b):
    """Exhaustive longest-common-substring oracle (first match wins)."""
    best = (0, 0, 0)
    for i in range(len(a)):
        for j in range(len(b)):
            length = 0
            while (i + length < len(a) and j + length < len(b)
                   and a[i + length] == b[j + length]):
                length += 1
            if length > best[2]:
                best = (i, j, length)
    return best


def test_identity_block():
    blocks = match_blocks(["x", "y", "z"], ["x", "y", "z"])
    assert blocks == [Block(0, 0, 3)]


def test_swap_gives_two_unit_blocks():
    blocks = match_blocks(["x", "y"], ["y", "x"])
    assert sorted((b.a_start, b.b_start, b.length) for b in blocks) == [
        (0, 1, 1), (1, 0, 1)
    ]


def test_rotated_blocks_match_exhaustive_oracle():
    a = list("abcde")
    b = list("deabc")
    i, j, length = brute_longest_common_substring(a, b)
    assert (i, j, length) == (0, 2, 3)
    blocks = match_blocks(a, b)
    assert blocks[0] == Block(0, 2, 3)
    assert blocks[1] == Block(3, 0, 2)


def test_pure_insertion():
    d = edit_distance(list("wxy"), list("wxyuv"))
    assert d == DiffBreakdown(inserted=2, deleted=0, moved_mass=0.0, distance=2.0)


def test_disjoint_replacement():
    d = edit_distance(list("pq"), list("rs"))
    assert d.inserted == 2 and d.deleted == 2 and d.moved_mass == 0.0
    assert d.distance == 1.0


def test_block_move_centers():
    # [a,b] moved to the end of a ten-token document; centers computed by
    # hand over matched ranks: 2*|0.1-0.9| + 8*|0.6-0.4| = 3.2
    d = edit_distance(list("abcdefghij"), list("cdefghijab"))
    assert d.inserted == 0 and d.deleted == 0
    assert d.moved_mass == pytest.approx(3.2)
    assert d.distance == pytest.approx(3.2)


def test_both_empty():
    assert edit_distance([], []) == DiffBreakdown(0, 0, 0.0, 0.0)


@given(tokens, tokens)
def test_symmetry(a, b):
    d1 = edit_distance(a, b)
    d2 = edit_distance(b, a)
    assert d1.distance == d2.distance
    assert d1.inserted == d2.deleted and d1.deleted == d2.inserted
    assert d1.moved_mass == d2.moved_mass


@given(tokens)
def test_identity_distance(a):
    assert edit_distance(a, a).distance == 0.0


@given(tokens, tokens)
def test_positivity(a, b):
    d = edit_distance(a, b)
    if a == b:
        assert d.distance == 0.0
    else:
        assert d.distance > 0.0


@given(tokens, st.integers(min_value=1, max_value=5))
def test_insertion_monotonicity(a, k):
    # appending k fresh tokens (outside the fuzz alphabet) adds exactly k
    fresh = [f"z{i}" for i in range(k)]
    base = edit_distance(a, a).distance
    extended = edit_distance(a, a + fresh).distance
    assert extended == base + k


@given(tokens, tokens)
def test_deterministic(a, b):
    assert edit_distance(a, b) == edit_distance(a, b)


@given(tokens, tokens, tokens)
@settings(max_examples=200)
def test_triangle_after_guard(a, b, c):
    d_ij = edit_distance(a, b).distance
    d_jk = edit_distance(b, c).distance
    d_ik = triangle_guard(d_ij, d_jk, edit_distance(a, c).distance)
    assert d_ik <= d_ij + d_jk + 1e-12


def test_triangle_guard_values():
    assert triangle_guard(3, 4, 10) == 7
    assert triangle_guard(3, 4, 5) == 5
    assert triangle_guard(0, 0, 0) == 0
    assert triangle_guard(1, 2, 3) == triangle_guard(1, 2, triangle_guard(1, 2, 3))


def test_triangle_guard_rejects_negative():
    with pytest.raises(ValueError):
        triangle_guard(-1, 0, 0)


def test_every_token_matched_at_most_once():
    a = list("aabbaabb")
    b = list("bbaabbaa")
    blocks = match_blocks(a, b)
    seen_a = list(itertools.chain.from_iterable(
        range(bl.a_start, bl.a_start + bl.length) for bl in blocks))
    seen_b = list(itertools.chain.from_iterable(
        range(bl.b_start, bl.b_start + bl.length) for bl in blocks))
    assert len(seen_a) == len(set(seen_a))
    assert len(seen_b) == len(set(seen_b))
    for bl in blocks:
        assert a[bl.a_start:bl.a_start + bl.length] == b[bl.b_start:bl.b_start + bl.length]

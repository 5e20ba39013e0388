import pytest
from hypothesis import given, strategies as st

from poslearn.coding import (
    decode_fact,
    encode_fact,
    is_positive,
    pair,
    rel_index,
    rel_name,
    seq_code,
    seq_decode,
    set_code,
    set_decode,
    unpair,
)


def test_pair_known_values():
    # (x+y)(x+y+1)/2 + y, worked by hand
    assert pair(0, 0) == 0
    assert pair(1, 2) == 8
    assert pair(2, 8) == 63
    assert pair(0, 1) == 2
    assert pair(1, 0) == 1


@given(st.integers(0, 10**9), st.integers(0, 10**9))
def test_pair_roundtrip(x, y):
    assert unpair(pair(x, y)) == (x, y)


def test_pair_is_bijective_on_prefix():
    seen = {pair(x, y) for x in range(40) for y in range(40)}
    assert len(seen) == 1600
    # surjective onto an initial segment: every code below pair(0, 39) hits
    assert set(range(40 * 41 // 2)) <= seen


def test_encode_fact_spec_values():
    assert encode_fact("=", 0, 0) == 0
    assert encode_fact("~", 1, 2) == 63
    assert decode_fact(63) == ("~", 1, 2, True)


def test_fact_roundtrip_small():
    rels = ["=", "!=", "~", "<", "P0", "P1", "P7"]
    seen = set()
    for rel in rels:
        for a in range(0, 51, 7):
            for b in range(0, 51, 7):
                if rel.startswith("P") and a != b:
                    continue
                for positive in (True, False):
                    c = encode_fact(rel, a, b, positive=positive)
                    assert decode_fact(c) == (rel, a, b, positive)
                    assert c not in seen
                    seen.add(c)


def test_negative_codes_disjoint_from_positive():
    pos = {encode_fact(r, a, b) for r in ("=", "~", "P0") for a in range(6) for b in range(6) if not (r == "P0" and a != b)}
    neg = {encode_fact(r, a, b, positive=False) for r in ("=", "~", "P0") for a in range(6) for b in range(6) if not (r == "P0" and a != b)}
    assert not pos & neg
    assert all(is_positive(c) for c in pos)
    assert not any(is_positive(c) for c in neg)


def test_rel_names():
    assert rel_index("P3") == 7
    assert rel_name(7) == "P3"
    with pytest.raises(ValueError):
        rel_index("Q")


def test_unary_facts_force_b_eq_a():
    assert encode_fact("P2", 5) == encode_fact("P2", 5, 5)
    with pytest.raises(ValueError):
        encode_fact("P2", 5, 6)


@given(st.lists(st.integers(0, 10**6), max_size=6))
def test_seq_code_roundtrip(xs):
    assert seq_decode(seq_code(xs)) == xs


def test_seq_code_empty_and_order():
    assert seq_code([]) == 0
    assert seq_code([3]) != seq_code([3, 3])
    assert seq_code([1, 2]) != seq_code([2, 1])


@given(st.sets(st.integers(0, 200), max_size=12))
def test_set_code_roundtrip(s):
    assert set_decode(set_code(s)) == frozenset(s)


def test_set_code_canonical():
    assert set_code([2]) == 4
    assert set_code([]) == 0
    assert set_code([0, 1]) == 3

"""Integer codings: Cantor pairing, atomic-fact codes, sequence and set codes.

Every object the workbench passes around (facts, sequences, finite sets) has a
canonical natural-number code, so traces are plain decimal integers and all
"least such" searches have a stable meaning.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

# Named relations of the equivalence signature and the ordered-predicate
# signature.  Unary predicates P_k get canonical index 4 + k.
REL_EQ = "="
REL_NEQ = "!="
REL_SIM = "~"
REL_LT = "<"

_NAMED = {REL_EQ: 0, REL_NEQ: 1, REL_SIM: 2, REL_LT: 3}
_NAMED_BY_INDEX = {v: k for k, v in _NAMED.items()}


def pair(x: int, y: int) -> int:
    """Cantor pairing (x+y)(x+y+1)/2 + y."""
    if x < 0 or y < 0:
        raise ValueError("pairing is defined on naturals")
    s = x + y
    return s * (s + 1) // 2 + y


def unpair(z: int) -> tuple[int, int]:
    """Inverse of pair()."""
    if z < 0:
        raise ValueError("negative code")
    w = (math.isqrt(8 * z + 1) - 1) // 2
    t = w * (w + 1) // 2
    y = z - t
    return w - y, y


def rel_index(rel: str) -> int:
    """Canonical index of a relation name ('P3' -> 7)."""
    if rel in _NAMED:
        return _NAMED[rel]
    if rel.startswith("P") and rel[1:].isdigit():
        return 4 + int(rel[1:])
    raise ValueError(f"unknown relation {rel!r}")


def rel_name(index: int) -> str:
    if index in _NAMED_BY_INDEX:
        return _NAMED_BY_INDEX[index]
    if index >= 4:
        return f"P{index - 4}"
    raise ValueError(f"bad relation index {index}")


def _rel_id(index: int, positive: bool) -> int:
    # Positive ids: 0..3 then evens >= 4.  Negative ids: odds >= 5
    # (the reserved 5-offset range; informants are the only producers).
    if positive:
        return index if index <= 3 else 2 * index - 4
    return 2 * index + 5


def _rel_id_decode(rid: int) -> tuple[int, bool]:
    if rid <= 3:
        return rid, True
    if rid % 2 == 0:
        return (rid + 4) // 2, True
    return (rid - 5) // 2, False


def encode_fact(rel: str, a: int, b: int | None = None, *, positive: bool = True) -> int:
    """Code of the atomic fact rel(a, b); unary facts set b = a."""
    if b is None:
        b = a
    idx = rel_index(rel)
    if idx >= 4 and a != b:
        raise ValueError("unary facts must set b = a")
    if a < 0 or b < 0:
        raise ValueError("element ids are naturals")
    return pair(_rel_id(idx, positive), pair(a, b))


def decode_fact(code: int) -> tuple[str, int, int, bool]:
    """Inverse of encode_fact: (rel, a, b, positive)."""
    rid, ab = unpair(code)
    idx, positive = _rel_id_decode(rid)
    a, b = unpair(ab)
    return rel_name(idx), a, b, positive


def is_positive(code: int) -> bool:
    rid, _ = unpair(code)
    return _rel_id_decode(rid)[1]


def seq_code(items: Sequence[int]) -> int:
    """Canonical code of a finite sequence: [] -> 0, x::r -> pair(x, code(r)) + 1."""
    code = 0
    for x in reversed(items):
        code = pair(x, code) + 1
    return code


def seq_decode(code: int) -> list[int]:
    out = []
    while code:
        x, code = unpair(code - 1)
        out.append(x)
    return out


def set_code(items: Iterable[int]) -> int:
    """Bit-sum code of a finite set: D_v = {x : bit x of v is 1}."""
    v = 0
    for x in set(items):
        if x < 0:
            raise ValueError("set elements are naturals")
        v |= 1 << x
    return v


def set_decode(v: int) -> frozenset[int]:
    if v < 0:
        raise ValueError("negative set code")
    out = set()
    i = 0
    while v:
        if v & 1:
            out.add(i)
        v >>= 1
        i += 1
    return frozenset(out)

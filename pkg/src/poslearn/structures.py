"""Structure descriptions, canonical finite realizations, and diagram queries.

An equivalence-type spec [a1:b1, ..., an:bn] describes the structure with
exactly bi classes of size ai; a kst spec picks the i-th member of the family
of ordered structures with disjoint unary predicates.  Realizations are
level-truncated positive diagrams of fixed canonical copies, monotone in the
level, so growing a level never invalidates earlier facts.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from .coding import (
    REL_EQ,
    REL_LT,
    REL_NEQ,
    REL_SIM,
    decode_fact,
    encode_fact,
    pair,
)

OMEGA = math.inf

Size = Union[int, float]  # int or OMEGA


def is_omega(s: Size) -> bool:
    return s == OMEGA


def _check_size(s) -> Size:
    if s == OMEGA:
        return OMEGA
    if isinstance(s, int) and s >= 1:
        return s
    raise ValueError(f"sizes and counts must be positive integers or omega, got {s!r}")


@dataclass(frozen=True)
class StructureSpec:
    """A finitary description of a target structure."""

    kind: str
    classes: tuple[tuple[Size, Size], ...] = ()
    index: int = 0

    def __post_init__(self):
        if self.kind == "eq":
            if not self.classes:
                raise ValueError("eq spec needs a nonempty class list")
            for size, count in self.classes:
                _check_size(size)
                _check_size(count)
        elif self.kind == "kst":
            if self.index < 0:
                raise ValueError("kst index must be a natural")
        else:
            raise ValueError(f"unknown spec kind {self.kind!r}")

    @staticmethod
    def eq(classes: Iterable[tuple[Size, Size]]) -> "StructureSpec":
        return StructureSpec("eq", tuple((_check_size(s), _check_size(c)) for s, c in classes))

    @staticmethod
    def kst(index: int) -> "StructureSpec":
        return StructureSpec("kst", (), index)

    def notation(self) -> str:
        if self.kind == "kst":
            return f"kst:{self.index}"

        def w(s):
            return "w" if is_omega(s) else str(int(s))

        return "[" + ", ".join(f"{w(s)}:{w(c)}" for s, c in self.classes) + "]"

    def __repr__(self):
        return f"StructureSpec({self.notation()})"

    def to_json(self) -> dict:
        if self.kind == "kst":
            return {"kind": "kst", "index": self.index}
        enc = lambda s: "omega" if is_omega(s) else int(s)
        return {
            "kind": "eq",
            "classes": [{"size": enc(s), "count": enc(c)} for s, c in self.classes],
        }

    @staticmethod
    def from_json(obj: dict) -> "StructureSpec":
        if obj.get("kind") == "kst":
            return StructureSpec.kst(int(obj["index"]))
        if obj.get("kind") == "eq":
            dec = lambda v: OMEGA if v == "omega" else int(v)
            return StructureSpec.eq([(dec(c["size"]), dec(c["count"])) for c in obj["classes"]])
        raise ValueError(f"bad spec object: {obj!r}")

    @staticmethod
    def loads(text: str) -> "StructureSpec":
        return StructureSpec.from_json(json.loads(text))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


@dataclass(frozen=True)
class FiniteDiagram:
    """A finite set of positive fact codes."""

    facts: frozenset[int]

    @staticmethod
    def of(facts: Iterable[int]) -> "FiniteDiagram":
        return FiniteDiagram(frozenset(facts))

    @staticmethod
    def checked(facts: Iterable[int]) -> "FiniteDiagram":
        fs = frozenset(facts)
        for f in fs:
            if not decode_fact(f)[3]:
                raise ValueError(f"negative-polarity code {f} in a positive diagram")
        return FiniteDiagram(fs)

    @property
    def support(self) -> frozenset[int]:
        out = set()
        for f in self.facts:
            _, a, b, _ = decode_fact(f)
            out.add(a)
            out.add(b)
        return frozenset(out)

    def __contains__(self, code: int) -> bool:
        return code in self.facts

    def __len__(self):
        return len(self.facts)

    def __or__(self, other: "FiniteDiagram") -> "FiniteDiagram":
        return FiniteDiagram(self.facts | other.facts)

    def issubset(self, other: "FiniteDiagram") -> bool:
        return self.facts <= other.facts

    def sorted_codes(self) -> list[int]:
        return sorted(self.facts)


def as_fact_set(d) -> frozenset[int]:
    if isinstance(d, FiniteDiagram):
        return d.facts
    return frozenset(d)


# -- canonical equivalence realizations ------------------------------------

def eq_class_ids(spec: StructureSpec, level: int) -> list[int]:
    """Class ids of the level truncation, in (group, ordinal) order."""
    ids = []
    for g, (_, count) in enumerate(spec.classes):
        n = level if is_omega(count) else int(count)
        for c in range(n):
            ids.append(pair(g, c))
    return ids


def eq_class_members(spec: StructureSpec, group: int, ordinal: int, level: int) -> list[int]:
    size = spec.classes[group][0]
    n = level if is_omega(size) else int(size)
    cid = pair(group, ordinal)
    return [pair(cid, m) for m in range(n)]


def realize_eq_spec(spec: StructureSpec, level: int) -> FiniteDiagram:
    """Level-truncated positive diagram of the canonical equivalence copy."""
    if spec.kind != "eq":
        raise ValueError("realize_eq_spec wants an eq spec")
    if level < 1:
        raise ValueError("level must be >= 1")
    classes: list[list[int]] = []
    for g, (_, count) in enumerate(spec.classes):
        n = level if is_omega(count) else int(count)
        for c in range(n):
            classes.append(eq_class_members(spec, g, c, level))
    facts: set[int] = set()
    all_elems: list[int] = []
    for members in classes:
        all_elems.extend(members)
        for x in members:
            facts.add(encode_fact(REL_EQ, x, x))
            facts.add(encode_fact(REL_SIM, x, x))
        for i, x in enumerate(members):
            for y in members[i + 1:]:
                facts.add(encode_fact(REL_SIM, x, y))
                facts.add(encode_fact(REL_SIM, y, x))
                facts.add(encode_fact(REL_NEQ, x, y))
                facts.add(encode_fact(REL_NEQ, y, x))
    for i, x in enumerate(all_elems):
        for y in all_elems[i + 1:]:
            if encode_fact(REL_NEQ, x, y) not in facts:
                facts.add(encode_fact(REL_NEQ, x, y))
                facts.add(encode_fact(REL_NEQ, y, x))
    return FiniteDiagram(frozenset(facts))


# -- canonical ordered realizations -----------------------------------------

_BOTTOM = (-1, 1)  # sentinel value below every dyadic


def dyadic_point(idx: int) -> tuple[int, int]:
    """idx-th dyadic rational in (0,1), breadth-first by denominator."""
    d = 1
    block = 1
    while idx >= block:
        idx -= block
        block *= 2
        d += 1
    return 2 * idx + 1, 1 << d


def _part_points(i: int, j: int, level: int) -> list[tuple[int, int]]:
    if j == i:
        return [_BOTTOM] + [dyadic_point(t) for t in range(level - 1)]
    return [dyadic_point(t) for t in range(level)]


def realize_kst(i: int, level: int) -> FiniteDiagram:
    """Level-truncated positive diagram of the i-th canonical ordered structure.

    Part j holds a finite suborder of the rationals, with a fixed bottom point
    prepended exactly when j == i; cross-part pairs carry no order facts.
    """
    if level < 1:
        raise ValueError("level must be >= 1")
    facts: set[int] = set()
    elems: list[int] = []
    for j in range(level):
        points = _part_points(i, j, level)
        part_elems = [pair(j, t) for t in range(len(points))]
        elems.extend(part_elems)
        for e in part_elems:
            facts.add(encode_fact(REL_EQ, e, e))
            facts.add(encode_fact(f"P{j}", e))
        for s in range(len(points)):
            for t in range(len(points)):
                if s == t:
                    continue
                ps, pt = points[s], points[t]
                if ps[0] * pt[1] < pt[0] * ps[1]:
                    facts.add(encode_fact(REL_LT, part_elems[s], part_elems[t]))
    for a in range(len(elems)):
        for b in range(a + 1, len(elems)):
            facts.add(encode_fact(REL_NEQ, elems[a], elems[b]))
            facts.add(encode_fact(REL_NEQ, elems[b], elems[a]))
    return FiniteDiagram(frozenset(facts))


def realize(spec: StructureSpec, level: int) -> FiniteDiagram:
    if spec.kind == "eq":
        return realize_eq_spec(spec, level)
    return realize_kst(spec.index, level)


# -- "sigma is on the positive diagram" -------------------------------------

TRUE = "true"
FALSE = "false"
INCONCLUSIVE = "inconclusive"


def is_on(sigma: Sequence[int], spec: StructureSpec, level: int) -> str:
    """Whether the fact sequence embeds into the level truncation.

    Searches injective renamings of sigma's support into the canonical copy's
    support.  Failure is final (FALSE) only when the truncation is already big
    enough to host any embeddable pattern of that support size; otherwise the
    verdict is INCONCLUSIVE.
    """
    facts = []
    for code in sigma:
        rel, a, b, pos = decode_fact(code)
        if not pos:
            raise ValueError("is_on expects positive facts")
        facts.append((rel, a, b))
    support = sorted({x for _, a, b in facts for x in (a, b)})
    if not support:
        return TRUE

    target = realize(spec, level)
    tfacts = target.facts
    tsupport = sorted(target.support)

    by_elem: dict[int, list[tuple[str, int, int]]] = {x: [] for x in support}
    for rel, a, b in facts:
        by_elem[a].append((rel, a, b))
        if b != a:
            by_elem[b].append((rel, a, b))

    def consistent(assign: dict[int, int], x: int, t: int) -> bool:
        for rel, a, b in by_elem[x]:
            ta = t if a == x else assign.get(a)
            tb = t if b == x else assign.get(b)
            if ta is None or tb is None:
                continue
            if encode_fact(rel, ta, tb) not in tfacts:
                return False
        return True

    def search(pos: int, assign: dict[int, int], used: set[int]) -> bool:
        if pos == len(support):
            return True
        x = support[pos]
        for t in tsupport:
            if t in used:
                continue
            if consistent(assign, x, t):
                assign[x] = t
                used.add(t)
                if search(pos + 1, assign, used):
                    return True
                del assign[x]
                used.discard(t)
        return False

    if len(support) > len(tsupport):
        return INCONCLUSIVE
    if search(0, {}, set()):
        return TRUE
    needed = len(support)
    for rel, _, _ in facts:
        if rel.startswith("P"):
            needed = max(needed, int(rel[1:]) + 1)
    return FALSE if level >= needed else INCONCLUSIVE


# -- census -----------------------------------------------------------------

@dataclass(frozen=True)
class EqTypeEstimate:
    """Lower-bound census of an equivalence diagram: observed class sizes."""

    components: tuple[tuple[int, ...], ...]  # sorted element tuples
    lower_bounds: bool = field(default=True)

    @property
    def census(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for comp in self.components:
            out[len(comp)] = out.get(len(comp), 0) + 1
        return out

    def sizes(self) -> list[int]:
        return sorted(len(c) for c in self.components)

    @property
    def total(self) -> int:
        return sum(len(c) for c in self.components)


def eq_type_of(diagram) -> EqTypeEstimate:
    """Connected components of the "~" graph; sizes are lower bounds only."""
    facts = as_fact_set(diagram)
    adj: dict[int, set[int]] = {}
    seen: set[int] = set()
    for f in facts:
        rel, a, b, _ = decode_fact(f)
        if rel == REL_LT or rel.startswith("P"):
            raise ValueError("eq census is defined for ~/=/!= diagrams")
        seen.add(a)
        seen.add(b)
        if rel == REL_SIM and a != b:
            adj.setdefault(a, set()).add(b)
            adj.setdefault(b, set()).add(a)
    comps = []
    visited: set[int] = set()
    for x in sorted(seen):
        if x in visited:
            continue
        comp = []
        stack = [x]
        while stack:
            y = stack.pop()
            if y in visited:
                continue
            visited.add(y)
            comp.append(y)
            stack.extend(adj.get(y, ()))
        comps.append(tuple(sorted(comp)))
    return EqTypeEstimate(tuple(sorted(comps)))

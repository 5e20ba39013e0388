"""The four continuous embedding constructions, as operators on finite diagrams.

Each construction consumes a finite positive diagram and emits a finite part
of the image structure's positive diagram.  All four are monotone (growing the
input never retracts output facts) and compact (every output fact is forced by
a finite part of the input); resource caps are explicit arguments and fixed
caps preserve monotonicity.  Large equivalence blocks are emitted star-shaped
and cross-block inequalities on a budget: a finite stage never claims to be
support-complete, only to grow towards the full image diagram.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cmp_to_key
from typing import Callable, Sequence

from .coding import decode_fact, encode_fact, pair, seq_code
from .structures import (
    FiniteDiagram,
    OMEGA,
    StructureSpec,
    as_fact_set,
    dyadic_point,
    eq_type_of,
    is_omega,
)


class CapExceeded(RuntimeError):
    pass


# -- infinite copying -----------------------------------------------------------

def eq_to_etilde(diagram, copies: int) -> FiniteDiagram:
    """Disjoint renamed copies of an equivalence diagram.

    Copy c of element e is pair(c, e); cross-copy inequalities are emitted for
    elements whose reflexive equality fact is present.
    """
    if copies < 1:
        raise ValueError("copies must be >= 1")
    facts = as_fact_set(diagram)
    out: set[int] = set()
    present: set[int] = set()
    for f in facts:
        rel, a, b, pos = decode_fact(f)
        if not pos or rel not in ("=", "~", "!="):
            continue
        for c in range(copies):
            out.add(encode_fact(rel, pair(c, a), pair(c, b)))
        if rel == "=" and a == b:
            present.add(a)
    for a in present:
        for b in present:
            for c1 in range(copies):
                for c2 in range(copies):
                    if c1 != c2:
                        out.add(encode_fact("!=", pair(c1, a), pair(c2, b)))
    return FiniteDiagram(frozenset(out))


def eq_to_etilde_schematic(copies: int):
    """The same construction as a schematic operator (pullback-eligible)."""
    from .operators import SAtom, SchematicOp, SPair, SVar, Template

    u, v = SVar("u"), SVar("v")
    templates = []
    for rel in ("=", "~", "!="):
        for c in range(copies):
            templates.append(Template(
                SAtom(rel, (SPair(c, u), SPair(c, v))), (SAtom(rel, (u, v)),)))
    for c1 in range(copies):
        for c2 in range(copies):
            if c1 != c2:
                templates.append(Template(
                    SAtom("!=", (SPair(c1, u), SPair(c2, v))),
                    (SAtom("=", (u, u)), SAtom("=", (v, v)))))
    return SchematicOp(tuple(templates), f"eq2etilde[{copies}]")


def eq_to_etilde_type(spec: StructureSpec, copies: int) -> StructureSpec:
    """Type-level action: class counts multiply by the number of copies."""
    return StructureSpec.eq([
        (s, OMEGA if is_omega(c) else int(c) * copies) for s, c in spec.classes])


# -- equivalence types into ordered structures ------------------------------------

@dataclass(frozen=True)
class KstCaps:
    tuple_len: int = 2
    tuple_code: int = 600
    fillers: int = 1


def _component_sizes(facts: frozenset[int]) -> dict[int, int]:
    est = eq_type_of(f for f in facts if decode_fact(f)[0] in ("=", "~", "!="))
    sizes: dict[int, int] = {}
    for comp in est.components:
        for e in comp:
            sizes[e] = len(comp)
    return sizes


def _certified_tuples(sizes: dict[int, int], k: int, caps: KstCaps) -> list[tuple[int, ...]]:
    """Increasing element tuples whose class-size lower bounds the input certifies.

    Inner coordinates need certified size >= k+1, the last >= k; enumeration is
    cut by tuple length and tuple code (extension strictly grows the code).
    """
    valid_last = [e for e in sorted(sizes) if sizes[e] >= k]
    inner = {e for e in valid_last if sizes[e] >= k + 1}
    out: list[tuple[int, ...]] = []

    def extend(prefix: list[int]):
        t = tuple(prefix)
        if seq_code(t) >= caps.tuple_code:
            return
        out.append(t)
        if len(prefix) < caps.tuple_len and prefix[-1] in inner:
            for e in valid_last:
                if e > prefix[-1]:
                    extend(prefix + [e])

    for e in valid_last:
        extend([e])
    return out


def _kb_cmp(t: tuple[int, ...], s: tuple[int, ...]) -> int:
    """Proper extensions come first, else least first pointwise difference."""
    for a, b in zip(t, s):
        if a != b:
            return -1 if a < b else 1
    if len(t) == len(s):
        return 0
    return -1 if len(t) > len(s) else 1


def etilde_to_kst(diagram, k_max: int, caps: KstCaps = KstCaps()) -> FiniteDiagram:
    """Tuple orders per class-size threshold, densified and tagged by predicate.

    Component k enumerates the certified tuples of the k-th threshold order,
    each tuple densified into a bottom-plus-rationals block of dyadic fillers;
    blocks inherit the tuple order, components are disjointly unioned under
    unary predicates.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    facts = as_fact_set(diagram)
    sizes = _component_sizes(facts)
    out: set[int] = set()
    all_points: list[int] = []
    for k in range(1, k_max + 1):
        tuples = sorted(_certified_tuples(sizes, k, caps), key=cmp_to_key(_kb_cmp))
        pts_of: dict[tuple[int, ...], list[int]] = {}
        for t in tuples:
            tc = seq_code(t)
            pts = [pair(k, pair(tc, j)) for j in range(1 + caps.fillers)]
            pts_of[t] = pts
            all_points.extend(pts)
            for e in pts:
                out.add(encode_fact(f"P{k}", e))
                out.add(encode_fact("=", e, e))
            # the block's bottom point precedes every filler; fillers follow
            # the dyadic value order
            for j in range(1, len(pts)):
                out.add(encode_fact("<", pts[0], pts[j]))
            for j1 in range(1, len(pts)):
                for j2 in range(1, len(pts)):
                    if j1 == j2:
                        continue
                    p1, p2 = dyadic_point(j1 - 1), dyadic_point(j2 - 1)
                    if p1[0] * p2[1] < p2[0] * p1[1]:
                        out.add(encode_fact("<", pts[j1], pts[j2]))
        for t1, t2 in itertools.combinations(tuples, 2):
            # tuples arrive KB-sorted: t1 precedes t2
            for e1 in pts_of[t1]:
                for e2 in pts_of[t2]:
                    out.add(encode_fact("<", e1, e2))
    for e1 in all_points:
        for e2 in all_points:
            if e1 != e2:
                out.add(encode_fact("!=", e1, e2))
    return FiniteDiagram(frozenset(out))


@dataclass(frozen=True)
class LeastReport:
    least: tuple[int, ...] | None
    closed: bool  # the least tuple ends in a class certified at exactly the threshold


def least_element_profile(diagram, k_max: int, caps: KstCaps = KstCaps()) -> dict[int, LeastReport]:
    """Per component: the certified order's least tuple and whether it is closed.

    A closed least (last coordinate's certified class size equals the
    threshold exactly) is the stage-level signature of a genuine bottom
    element; an open one sits on a still-descending chain.
    """
    facts = as_fact_set(diagram)
    sizes = _component_sizes(facts)
    out = {}
    for k in range(1, k_max + 1):
        tuples = _certified_tuples(sizes, k, caps)
        if not tuples:
            out[k] = LeastReport(None, False)
            continue
        least = min(tuples, key=cmp_to_key(_kb_cmp))
        out[k] = LeastReport(least, sizes[least[-1]] == k)
    return out


# -- ordered structures into equivalence types --------------------------------------

def kst_to_eq(diagram, merge_infinite: bool = False) -> FiniteDiagram:
    """Blocks per ordered element: threshold-plus-one for a current least,
    growing with each certified predecessor.

    Element x in part k gets an equivalence block of size (k+1) + (number of
    certified predecessors of x); a former least's block starts growing as
    soon as something smaller shows up.  With merge_infinite set, every block
    with a predecessor is linked to one global anchor class (the variant whose
    limit type has a single infinite class).
    """
    facts = as_fact_set(diagram)
    part: dict[int, int] = {}
    for f in facts:
        rel, a, b, pos = decode_fact(f)
        if pos and rel.startswith("P"):
            k = int(rel[1:])
            part[a] = min(part.get(a, k), k)
    preds: dict[int, int] = {x: 0 for x in part}
    for f in facts:
        rel, a, b, pos = decode_fact(f)
        if pos and rel == "<" and part.get(a) is not None and part.get(a) == part.get(b):
            preds[b] = preds.get(b, 0) + 1
    out: set[int] = set()
    anchor = pair(1, 0)
    hubs: list[int] = []
    for x in sorted(part):
        k = part[x]
        size = (k + 1) + preds[x]
        pts = [pair(0, pair(pair(k, x), j)) for j in range(size)]
        hub = pts[0]
        hubs.append(hub)
        for e in pts:
            out.add(encode_fact("=", e, e))
            out.add(encode_fact("~", e, e))
            if e != hub:
                out.add(encode_fact("~", hub, e))
                out.add(encode_fact("~", e, hub))
        for e1, e2 in itertools.combinations(pts, 2):
            out.add(encode_fact("!=", e1, e2))
            out.add(encode_fact("!=", e2, e1))
        if merge_infinite and preds[x] > 0:
            out.add(encode_fact("=", anchor, anchor))
            out.add(encode_fact("~", anchor, anchor))
            out.add(encode_fact("~", hub, anchor))
            out.add(encode_fact("~", anchor, hub))
    for h1, h2 in itertools.combinations(sorted(hubs), 2):
        out.add(encode_fact("!=", h1, h2))
        out.add(encode_fact("!=", h2, h1))
    return FiniteDiagram(frozenset(out))


# -- learner into equivalence types ---------------------------------------------------

@dataclass(frozen=True)
class EtildeCaps:
    sigma_len: int = 4
    block_enum: int = 200  # per-block enumeration bound for the growing classes
    rule1_len: int | None = None  # conjecture blocks up to this length (default sigma_len - 2)
    rels: tuple[str, ...] = ("~",)
    max_sequences: int = 1_000_000


def learner_to_etilde(learner: Callable[[Sequence[int]], object], diagram,
                      caps: EtildeCaps = EtildeCaps()) -> FiniteDiagram:
    """Image diagram of the learner-driven construction.

    Enumerates the anchored component-growing sequences over the diagram's
    eligible facts (an intrinsic family, so the operator is monotone): every
    item must extend the ~-component of the first fact's least element.  A
    sequence with a numeric verdict contributes a conjecture block of that
    size plus one; a sequence some enumerated extension of which changes the
    verdict has its block promoted to a growing class.  Growing classes are
    sized by the eligible-fact count so they never masquerade as stabilized.
    """
    facts = as_fact_set(diagram)
    eligible = sorted(
        f for f in facts
        if decode_fact(f)[3] and decode_fact(f)[0] in caps.rels)
    elems = {f: decode_fact(f)[1:3] for f in eligible}
    rule1 = caps.rule1_len if caps.rule1_len is not None else max(1, caps.sigma_len - 2)
    omega_n = min(caps.block_enum, len(eligible) // 8 + 2)

    verdicts: dict[tuple[int, ...], object] = {}
    promoted: set[tuple[int, ...]] = set()
    count = 0

    def dfs(seq: tuple[int, ...], comp: frozenset[int], path_verdicts: list):
        nonlocal count
        count += 1
        if count > caps.max_sequences:
            raise CapExceeded(f"sequence enumeration exceeded {caps.max_sequences}")
        val = learner(list(seq))
        verdicts[seq] = val
        for depth, v in enumerate(path_verdicts, start=1):
            if v != val:
                promoted.add(seq[:depth])
        if len(seq) < caps.sigma_len:
            for g in eligible:
                if g in seq:
                    continue
                a, b = elems[g]
                if (a in comp) == (b in comp):
                    continue  # must touch the component and strictly grow it
                dfs(seq + (g,), comp | {a, b}, path_verdicts + [val])

    for f0 in eligible:
        a, b = elems[f0]
        dfs((f0,), frozenset({a, b}), [])

    out: set[int] = set()
    for seq, val in verdicts.items():
        if len(seq) > rule1:
            continue
        tag = seq_code(seq)
        if isinstance(val, int):
            base = val + 1
            size = max(omega_n, base + 1) if seq in promoted else base
            _emit_block(out, tag, 0, size, full=(seq not in promoted))
        elif seq in promoted:
            _emit_block(out, tag, 0, omega_n, full=False)
        if len(seq) == 1:
            _emit_block(out, tag, 1, omega_n, full=False)
    return FiniteDiagram(frozenset(out))


def _emit_block(out: set[int], tag: int, role: int, size: int, full: bool):
    pts = [pair(pair(tag, role), j) for j in range(size)]
    hub = pts[0]
    for e in pts:
        out.add(encode_fact("=", e, e))
        out.add(encode_fact("~", e, e))
        if e != hub:
            out.add(encode_fact("~", hub, e))
            out.add(encode_fact("~", e, hub))
            out.add(encode_fact("!=", hub, e))
            out.add(encode_fact("!=", e, hub))
    if full:
        for e1, e2 in itertools.combinations(pts, 2):
            out.add(encode_fact("~", e1, e2))
            out.add(encode_fact("~", e2, e1))
            out.add(encode_fact("!=", e1, e2))
            out.add(encode_fact("!=", e2, e1))


def stable_finite_sizes(out_earlier, out_later) -> set[int]:
    """Sizes of classes identical at both stages (the stabilized census)."""
    earlier = {c[0]: set(c) for c in eq_type_of(out_earlier).components}
    later = {c[0]: set(c) for c in eq_type_of(out_later).components}
    return {len(c) for key, c in earlier.items() if later.get(key) == c}

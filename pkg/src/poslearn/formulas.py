"""Positive infinitary formulas up to level 2 and their evaluation.

Two representations live here: a general tree form (and/or/exists/forall/not
over positive atoms, negation only directly on atoms) used for parsing,
classification and printing, and the level-2 existential normal form used by
the learners: a disjunction of guarded witnesses, each guard a finite
conjunction of positive atoms and each universal block a finite conjunction of
positive atoms whose joint presence refutes the witness.

Evaluation against an equivalence-type spec is exact: witnesses and block
instances range over abstract placements (which variables coincide, which
share a class, drawn against the spec's size/count budgets), which classify
the automorphism orbits of concrete tuples, so no truncation heuristics are
involved.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, Union

from .coding import encode_fact, seq_code
from .structures import FiniteDiagram, StructureSpec, as_fact_set, is_omega

Term = Union[str, int]


class MalformedFormula(ValueError):
    pass


# -- tree form ---------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    rel: str
    args: tuple[Term, Term]

    def subst(self, env: dict[str, int]) -> "Atom":
        a, b = self.args
        return Atom(self.rel, (env.get(a, a) if isinstance(a, str) else a,
                               env.get(b, b) if isinstance(b, str) else b))

    def code(self) -> int:
        a, b = self.args
        if isinstance(a, str) or isinstance(b, str):
            raise ValueError(f"atom {self} still has free variables")
        return encode_fact(self.rel, a, b)

    def variables(self) -> set[str]:
        return {t for t in self.args if isinstance(t, str)}


def atom(rel: str, a: Term, b: Term | None = None) -> Atom:
    return Atom(rel, (a, a if b is None else b))


@dataclass(frozen=True)
class FAtom:
    a: Atom


@dataclass(frozen=True)
class FNot:
    body: "Formula"


@dataclass(frozen=True)
class FAnd:
    children: tuple["Formula", ...]


@dataclass(frozen=True)
class FOr:
    children: tuple["Formula", ...]


@dataclass(frozen=True)
class FExists:
    vars: tuple[str, ...]
    body: "Formula"


@dataclass(frozen=True)
class FForall:
    vars: tuple[str, ...]
    body: "Formula"


Formula = Union[FAtom, FNot, FAnd, FOr, FExists, FForall]


def _fits(f: Formula, level: int, pol: str) -> bool:
    if level == 0:
        if pol == "Sigma":
            if isinstance(f, FAtom):
                return True
            return isinstance(f, FAnd) and all(_fits(c, 0, "Sigma") for c in f.children)
        if isinstance(f, FNot):
            return isinstance(f.body, FAtom)
        return isinstance(f, FOr) and all(_fits(c, 0, "Pi") for c in f.children)
    if level == 1:
        if pol == "Sigma":
            if _fits(f, 0, "Sigma"):
                return True
            if isinstance(f, FExists):
                return _fits(f.body, 0, "Sigma")
            return isinstance(f, FOr) and all(_fits(c, 1, "Sigma") for c in f.children)
        if _fits(f, 0, "Pi"):
            return True
        if isinstance(f, FForall):
            return _fits(f.body, 0, "Pi")
        return isinstance(f, FAnd) and all(_fits(c, 1, "Pi") for c in f.children)
    # level 2: normal-shaped bodies only (conjunctions of level-<=1 parts)
    if pol == "Sigma":
        if _fits(f, 1, "Sigma") or _fits(f, 1, "Pi"):
            return True
        if isinstance(f, FExists):
            return _fits(f.body, 2, "SigmaBody")
        return isinstance(f, FOr) and all(_fits(c, 2, "Sigma") for c in f.children)
    if pol == "SigmaBody":
        if isinstance(f, FAnd):
            return all(_fits(c, 1, "Sigma") or _fits(c, 1, "Pi") for c in f.children)
        return _fits(f, 1, "Sigma") or _fits(f, 1, "Pi")
    if pol == "Pi":
        if _fits(f, 1, "Sigma") or _fits(f, 1, "Pi"):
            return True
        if isinstance(f, FForall):
            return _fits(f.body, 2, "PiBody")
        return isinstance(f, FAnd) and all(_fits(c, 2, "Pi") for c in f.children)
    if pol == "PiBody":
        if isinstance(f, FOr):
            return all(_fits(c, 1, "Sigma") or _fits(c, 1, "Pi") for c in f.children)
        return _fits(f, 1, "Sigma") or _fits(f, 1, "Pi")
    raise AssertionError(pol)


def _check_shape(f: Formula):
    if isinstance(f, FAtom):
        return
    if isinstance(f, FNot):
        if not isinstance(f.body, FAtom):
            raise MalformedFormula("negation is allowed on atoms only")
        return
    if isinstance(f, (FAnd, FOr)):
        for c in f.children:
            _check_shape(c)
        return
    if isinstance(f, (FExists, FForall)):
        _check_shape(f.body)
        return
    raise MalformedFormula(f"not a formula node: {f!r}")


def classify_level(f: Formula) -> tuple[int, str]:
    """Least (level, polarity) in the positive hierarchy that fits f."""
    _check_shape(f)
    for level in (0, 1, 2):
        for pol in ("Sigma", "Pi"):
            if _fits(f, level, pol):
                return level, pol
    raise MalformedFormula("formula does not fit the hierarchy up to level 2")


def free_variables(f: Formula, bound: frozenset[str] = frozenset()) -> set[str]:
    if isinstance(f, FAtom):
        return f.a.variables() - bound
    if isinstance(f, FNot):
        return free_variables(f.body, bound)
    if isinstance(f, (FAnd, FOr)):
        out: set[str] = set()
        for c in f.children:
            out |= free_variables(c, bound)
        return out
    return free_variables(f.body, bound | frozenset(f.vars))


# -- s-expression text format -------------------------------------------------

def _tokenize(text: str) -> list[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def _parse_tokens(toks: list[str], pos: int):
    if toks[pos] != "(":
        raise MalformedFormula(f"expected '(' at token {pos}")
    head = toks[pos + 1]
    pos += 2
    if head == "atom":
        rel = toks[pos]
        args = []
        pos += 1
        while toks[pos] != ")":
            t = toks[pos]
            args.append(int(t) if t.lstrip("-").isdigit() else t)
            pos += 1
        if len(args) == 1:
            args.append(args[0])
        if len(args) != 2:
            raise MalformedFormula("atoms take one or two arguments")
        return FAtom(Atom(rel, tuple(args))), pos + 1
    if head == "not":
        body, pos = _parse_tokens(toks, pos)
        if toks[pos] != ")":
            raise MalformedFormula("'not' takes one argument")
        return FNot(body), pos + 1
    if head in ("and", "or"):
        children = []
        while toks[pos] != ")":
            c, pos = _parse_tokens(toks, pos)
            children.append(c)
        node = FAnd(tuple(children)) if head == "and" else FOr(tuple(children))
        return node, pos + 1
    if head in ("exists", "forall"):
        if toks[pos] != "(":
            raise MalformedFormula("quantifier needs a variable list")
        pos += 1
        vars_ = []
        while toks[pos] != ")":
            vars_.append(toks[pos])
            pos += 1
        pos += 1
        body, pos = _parse_tokens(toks, pos)
        if toks[pos] != ")":
            raise MalformedFormula("quantifier takes one body")
        node = FExists(tuple(vars_), body) if head == "exists" else FForall(tuple(vars_), body)
        return node, pos + 1
    raise MalformedFormula(f"unknown node kind {head!r}")


def parse_formula(text: str) -> Formula:
    toks = _tokenize(text)
    f, pos = _parse_tokens(toks, 0)
    if pos != len(toks):
        raise MalformedFormula("trailing tokens")
    _check_shape(f)
    return f


def format_formula(f: Formula) -> str:
    if isinstance(f, FAtom):
        a, b = f.a.args
        if a == b:
            return f"(atom {f.a.rel} {a})"
        return f"(atom {f.a.rel} {a} {b})"
    if isinstance(f, FNot):
        return f"(not {format_formula(f.body)})"
    if isinstance(f, FAnd):
        return "(and " + " ".join(format_formula(c) for c in f.children) + ")"
    if isinstance(f, FOr):
        return "(or " + " ".join(format_formula(c) for c in f.children) + ")"
    kw = "exists" if isinstance(f, FExists) else "forall"
    return f"({kw} (" + " ".join(f.vars) + f") {format_formula(f.body)})"


# -- level-2 existential normal form ------------------------------------------

@dataclass(frozen=True)
class Block:
    """One universal block: presence of all atoms refutes the witness."""

    yvars: tuple[str, ...]
    atoms: tuple[Atom, ...]


@dataclass(frozen=True)
class GeneratedBlocks:
    """Countable block family given by an enumeration procedure and a bound."""

    produce: Callable[[int], Block] = field(compare=False)
    count: int | None = None  # None: genuinely infinite

    def expand(self, bound: int) -> tuple[list[Block], bool]:
        n = bound if self.count is None else min(bound, self.count)
        more = self.count is None or self.count > bound
        return [self.produce(j) for j in range(n)], more


@dataclass(frozen=True)
class Disjunct:
    xvars: tuple[str, ...]
    guard: tuple[Atom, ...]
    blocks: Union[tuple[Block, ...], GeneratedBlocks]

    def expand_blocks(self, bound: int) -> tuple[list[Block], bool]:
        if isinstance(self.blocks, GeneratedBlocks):
            return self.blocks.expand(bound)
        return list(self.blocks), False


@dataclass(frozen=True)
class Sigma2pNormal:
    disjuncts: tuple[Disjunct, ...]

    def __post_init__(self):
        for d in self.disjuncts:
            xset = set(d.xvars)
            for a in d.guard:
                if not a.variables() <= xset:
                    raise MalformedFormula("guard atoms may mention witness variables only")
            for x in d.xvars:
                if Atom("=", (x, x)) not in d.guard:
                    raise MalformedFormula(f"guard must carry the presence conjunct {x} = {x}")
            if isinstance(d.blocks, tuple):
                for blk in d.blocks:
                    if not {v for a in blk.atoms for v in a.variables()} <= xset | set(blk.yvars):
                        raise MalformedFormula("block atoms mention unknown variables")

    def to_tree(self) -> Formula:
        parts = []
        for d in self.disjuncts:
            blocks, _ = d.expand_blocks(64)
            body: list[Formula] = [FAtom(a) for a in d.guard]
            for blk in blocks:
                neg = FOr(tuple(FNot(FAtom(a)) for a in blk.atoms))
                body.append(FForall(blk.yvars, neg) if blk.yvars else neg)
            inner: Formula = FAnd(tuple(body))
            parts.append(FExists(d.xvars, inner) if d.xvars else inner)
        return parts[0] if len(parts) == 1 else FOr(tuple(parts))


def normal_from_tree(f: Formula) -> Sigma2pNormal:
    """Validate a tree as the existential normal form and convert it."""
    disjuncts = f.children if isinstance(f, FOr) else (f,)
    out = []
    for part in disjuncts:
        if isinstance(part, FExists):
            xvars, body = part.vars, part.body
        else:
            xvars, body = (), part
        conjuncts = body.children if isinstance(body, FAnd) else (body,)
        guard: list[Atom] = []
        blocks: list[Block] = []
        for c in conjuncts:
            if isinstance(c, FAtom):
                guard.append(c.a)
            elif isinstance(c, (FForall, FOr, FNot)):
                yvars = c.vars if isinstance(c, FForall) else ()
                inner = c.body if isinstance(c, FForall) else c
                negs = inner.children if isinstance(inner, FOr) else (inner,)
                atoms = []
                for n in negs:
                    if not (isinstance(n, FNot) and isinstance(n.body, FAtom)):
                        raise MalformedFormula("block members must be negated atoms")
                    atoms.append(n.body.a)
                blocks.append(Block(tuple(yvars), tuple(atoms)))
            else:
                raise MalformedFormula(f"unexpected conjunct {c!r} in normal form")
        out.append(Disjunct(tuple(xvars), tuple(guard), tuple(blocks)))
    return Sigma2pNormal(tuple(out))


def exact_size_sentence(i: int) -> Sigma2pNormal:
    """Sentence: some equivalence class has exactly i+1 elements.

    Witness: i+1 pairwise equivalent, pairwise distinct elements; the single
    block forbids any further element of the same class.  Each ∀-disjunction of
    negated atoms becomes one block of jointly refuting positive atoms.
    """
    if i < 0:
        raise ValueError("index must be a natural")
    xs = tuple(f"x{k}" for k in range(i + 1))
    guard = [atom("=", x, x) for x in xs]
    for k in range(i + 1):
        for l in range(k + 1, i + 1):
            guard.append(atom("~", xs[k], xs[l]))
            guard.append(atom("!=", xs[k], xs[l]))
    block = Block(("y",), tuple([atom("~", "y", xs[0])] + [atom("!=", "y", x) for x in xs]))
    return Sigma2pNormal((Disjunct(xs, tuple(guard), (block,)),))


def phi_family(n: int) -> list[Sigma2pNormal]:
    return [exact_size_sentence(i) for i in range(n)]


# -- stage evaluation over a finite diagram ------------------------------------

@dataclass(frozen=True)
class StageVerdict:
    satisfied: bool
    witness: tuple[int, ...] | None = None


def _tuples_by_code(support: Sequence[int], arity: int):
    if arity == 0:
        yield ()
        return
    tuples = itertools.product(support, repeat=arity)
    yield from sorted(tuples, key=seq_code)


def eval_at_stage(phi: Sigma2pNormal, diagram, block_bound: int | None = None) -> StageVerdict:
    """Reference witness search over a finite diagram.

    SatisfiedSoFar(a) iff a has every guard conjunct in the diagram and no
    block instance fully contained in it; the least such witness under the
    sequence-code order is returned.
    """
    facts = as_fact_set(diagram)
    support = sorted({x for f in facts for x in _fact_elems(f)})
    bound = block_bound if block_bound is not None else max(1, len(support))
    best: tuple[int, ...] | None = None
    for d in phi.disjuncts:
        blocks, _ = d.expand_blocks(bound)
        for xs in _tuples_by_code(support, len(d.xvars)):
            if best is not None and seq_code(xs) >= seq_code(best):
                break
            env = dict(zip(d.xvars, xs))
            if not all(a.subst(env).code() in facts for a in d.guard):
                continue
            if _violated(blocks, env, support, facts):
                continue
            best = xs
            break
    if best is None:
        return StageVerdict(False)
    return StageVerdict(True, best)


def _violated(blocks: Iterable[Block], env: dict[str, int], support, facts) -> bool:
    for blk in blocks:
        for ys in itertools.product(support, repeat=len(blk.yvars)):
            e = dict(env)
            e.update(zip(blk.yvars, ys))
            if all(a.subst(e).code() in facts for a in blk.atoms):
                return True
    return False


def _fact_elems(code: int) -> tuple[int, int]:
    from .coding import decode_fact

    _, a, b, _ = decode_fact(code)
    return a, b


# -- exact evaluation against an equivalence-type spec --------------------------

TRUE = "true"
FALSE = "false"
INCONCLUSIVE = "inconclusive"


class _Placement:
    """Cells are distinct elements; each cell sits in a class slot (group, tag)."""

    __slots__ = ("cells", "slot_of", "slots")

    def __init__(self):
        self.cells: list[frozenset[str]] = []
        self.slot_of: list[int] = []
        self.slots: list[int] = []  # slot -> group index

    def clone(self) -> "_Placement":
        p = _Placement.__new__(_Placement)
        p.cells = list(self.cells)
        p.slot_of = list(self.slot_of)
        p.slots = list(self.slots)
        return p

    def cell_of(self, v: str) -> int | None:
        for i, c in enumerate(self.cells):
            if v in c:
                return i
        return None

    def slot_load(self, s: int) -> int:
        return sum(1 for t in self.slot_of if t == s)

    def group_slots(self, g: int) -> int:
        return sum(1 for gg in self.slots if gg == g)


def _atoms_hold(atoms: Iterable[Atom], p: _Placement) -> bool:
    for a in atoms:
        x, y = a.args
        cx, cy = p.cell_of(x), p.cell_of(y)
        if cx is None or cy is None:
            return False
        if a.rel == "=":
            if cx != cy:
                return False
        elif a.rel == "!=":
            if cx == cy:
                return False
        elif a.rel == "~":
            if p.slot_of[cx] != p.slot_of[cy]:
                return False
        else:
            raise ValueError(f"equivalence signature only, got {a.rel!r}")
    return True


def _extensions(base: _Placement, new_vars: Sequence[str], spec: StructureSpec):
    """All placements extending base by the given variables."""

    def rec(i: int, p: _Placement):
        if i == len(new_vars):
            yield p
            return
        v = new_vars[i]
        # join an existing cell (equal to an already placed element)
        for ci in range(len(p.cells)):
            q = p.clone()
            q.cells[ci] = q.cells[ci] | {v}
            yield from rec(i + 1, q)
        # a fresh element in an existing slot
        for s in range(len(p.slots)):
            size = spec.classes[p.slots[s]][0]
            if not is_omega(size) and p.slot_load(s) >= size:
                continue
            q = p.clone()
            q.cells.append(frozenset({v}))
            q.slot_of.append(s)
            yield from rec(i + 1, q)
        # a fresh element in a fresh class of some group
        for g, (_, count) in enumerate(spec.classes):
            if not is_omega(count) and p.group_slots(g) >= count:
                continue
            q = p.clone()
            q.slots.append(g)
            q.cells.append(frozenset({v}))
            q.slot_of.append(len(q.slots) - 1)
            yield from rec(i + 1, q)

    yield from rec(0, base)


def eval_exact(
    phi: Sigma2pNormal,
    spec: StructureSpec,
    level: int = 3,
    block_bound: int = 16,
) -> str:
    """Truth of phi in the structure the spec describes.

    Exact for equivalence-type specs (abstract placements classify witness
    orbits).  Returns INCONCLUSIVE for other spec kinds, and when certifying
    truth would need blocks beyond block_bound of a generated family.
    """
    if level < 1 or block_bound < 1:
        raise ValueError("level and block_bound must be >= 1")
    if spec.kind != "eq":
        return INCONCLUSIVE
    saw_bound_gap = False
    for d in phi.disjuncts:
        blocks, more = d.expand_blocks(block_bound)
        for p in _extensions(_Placement(), list(d.xvars), spec):
            if not _atoms_hold(d.guard, p):
                continue
            refuted = False
            for blk in blocks:
                for q in _extensions(p, list(blk.yvars), spec):
                    if _atoms_hold(blk.atoms, q):
                        refuted = True
                        break
                if refuted:
                    break
            if not refuted:
                if more:
                    saw_bound_gap = True
                else:
                    return TRUE
    return INCONCLUSIVE if saw_bound_gap else FALSE

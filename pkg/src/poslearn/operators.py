"""Generalized enumeration operators and their property checks.

An operator maps sets of naturals to sets of naturals.  Explicit operators
carry an axiom set of pairs (x, v) and emit x whenever the v-coded finite set
is contained in the input; schematic operators carry finitely many templates
(an output atom pattern plus input atom patterns over shared variables) closed
under element substitution.  Schematic operators are the pullback-eligible
subclass: a level-2 sentence about their outputs translates syntactically into
one about their inputs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, Union

from .coding import decode_fact, encode_fact, pair, set_code, set_decode
from .formulas import (
    Atom,
    Block,
    Disjunct,
    MalformedFormula,
    Sigma2pNormal,
    atom,
    classify_level,
)
from .structures import EqTypeEstimate, FiniteDiagram, StructureSpec, as_fact_set, eq_type_of
from .streams import Stream


class PullbackError(ValueError):
    pass


# -- operator kinds -----------------------------------------------------------

@dataclass(frozen=True)
class ExplicitOp:
    """Axiom set of pairs (x, v): emit x when the v-coded set is included."""

    axioms: frozenset[tuple[int, int]]
    name: str = "explicit"

    @staticmethod
    def of(axioms: Iterable[tuple[int, int]], name: str = "explicit") -> "ExplicitOp":
        return ExplicitOp(frozenset(axioms), name)

    @staticmethod
    def from_stream(produce: Iterable[tuple[int, int]], bound: int | None,
                    name: str = "explicit") -> "ExplicitOp":
        """Materialize a streamed axiom set; an explicit bound is mandatory."""
        if bound is None:
            raise ValueError("streamed axiom sets need an explicit bound")
        return ExplicitOp(frozenset(itertools.islice(produce, bound)), name)

    def apply(self, b) -> frozenset[int]:
        facts = as_fact_set(b)
        return frozenset(x for x, v in self.axioms if set_decode(v) <= facts)


@dataclass(frozen=True)
class SVar:
    name: str


@dataclass(frozen=True)
class SPair:
    tag: int
    inner: SVar


STerm = Union[SVar, SPair, int]


@dataclass(frozen=True)
class SAtom:
    rel: str
    args: tuple[STerm, STerm]


@dataclass(frozen=True)
class Template:
    out: SAtom
    inputs: tuple[SAtom, ...]


@dataclass(frozen=True)
class SchematicOp:
    templates: tuple[Template, ...]
    name: str = "schematic"

    def __post_init__(self):
        shapes = set()
        for t in self.templates:
            invars = set()
            for a in t.inputs:
                for arg in a.args:
                    if isinstance(arg, SPair):
                        raise ValueError("input patterns take variables or constants only")
                    if isinstance(arg, SVar):
                        invars.add(arg.name)
            for arg in t.out.args:
                v = arg.name if isinstance(arg, SVar) else arg.inner.name if isinstance(arg, SPair) else None
                if v is not None and v not in invars:
                    raise ValueError(f"output variable {v!r} unbound by any input pattern")
            shapes.update(type(arg).__name__ for arg in t.out.args if not isinstance(arg, int))
        if {"SVar", "SPair"} <= shapes:
            raise ValueError("output terms must use one shape discipline (all plain or all paired)")

    def apply(self, b) -> frozenset[int]:
        facts = as_fact_set(b)
        by_rel: dict[str, list[tuple[int, int]]] = {}
        for f in facts:
            rel, x, y, pos = decode_fact(f)
            if pos:
                by_rel.setdefault(rel, []).append((x, y))
        out: set[int] = set()
        for t in self.templates:
            for env in self._matches(t.inputs, by_rel):
                a, bb = (self._eval(arg, env) for arg in t.out.args)
                out.add(encode_fact(t.out.rel, a, bb))
        return frozenset(out)

    def _matches(self, patterns: Sequence[SAtom], by_rel) -> Iterable[dict[str, int]]:
        def rec(i: int, env: dict[str, int]):
            if i == len(patterns):
                yield dict(env)
                return
            p = patterns[i]
            for x, y in by_rel.get(p.rel, ()):
                e = self._unify_arg(p.args[0], x, env)
                if e is None:
                    continue
                e = self._unify_arg(p.args[1], y, e)
                if e is None:
                    continue
                yield from rec(i + 1, e)

        yield from rec(0, {})

    @staticmethod
    def _unify_arg(argpat: STerm, val: int, env: dict[str, int]) -> dict[str, int] | None:
        if isinstance(argpat, int):
            return env if argpat == val else None
        assert isinstance(argpat, SVar)
        bound = env.get(argpat.name)
        if bound is None:
            e = dict(env)
            e[argpat.name] = val
            return e
        return env if bound == val else None

    @staticmethod
    def _eval(term: STerm, env: dict[str, int]) -> int:
        if isinstance(term, int):
            return term
        if isinstance(term, SVar):
            return env[term.name]
        return pair(term.tag, SchematicOp._eval(term.inner, env))


@dataclass(frozen=True)
class FuncOp:
    """An operator given directly by its action on fact sets."""

    fn: Callable[[frozenset[int]], frozenset[int]] = field(compare=False)
    name: str = "func"

    def apply(self, b) -> frozenset[int]:
        return frozenset(self.fn(as_fact_set(b)))


@dataclass(frozen=True)
class ComposedOp:
    outer: "EnumOperator"
    inner: "EnumOperator"

    @property
    def name(self) -> str:
        return f"{self.outer.name}∘{self.inner.name}"

    def apply(self, b) -> frozenset[int]:
        return self.outer.apply(self.inner.apply(b))


EnumOperator = Union[ExplicitOp, SchematicOp, FuncOp, ComposedOp]


def apply(op: EnumOperator, b) -> frozenset[int]:
    return op.apply(b)


def compose(op1: EnumOperator, op2: EnumOperator) -> ComposedOp:
    """Operator with apply(compose(f,g), B) = apply(f, apply(g, B))."""
    return ComposedOp(op1, op2)


def identity_op(rels: Sequence[str] = ("=", "!=", "~")) -> SchematicOp:
    u, v = SVar("u"), SVar("v")
    templates = tuple(Template(SAtom(r, (u, v)), (SAtom(r, (u, v)),)) for r in rels)
    return SchematicOp(templates, "identity")


# -- limit application ---------------------------------------------------------

@dataclass(frozen=True)
class ApplyLimitTrace:
    stages: tuple[tuple[int, frozenset[int]], ...]
    final_census: EqTypeEstimate | None

    def outputs(self) -> list[frozenset[int]]:
        return [s[1] for s in self.stages]


def apply_limit(op: EnumOperator, spec: StructureSpec, seed: int, horizon: int,
                stage_count: int = 12) -> ApplyLimitTrace:
    """Apply op to growing prefix-ranges of a text; outputs must only grow."""
    stream = Stream(spec, seed, "text")
    stream.prefix(horizon)
    cuts = sorted({min(horizon, k) for k in range(0, horizon + 1, max(1, horizon // stage_count))} | {horizon})
    stages = []
    prev: frozenset[int] = frozenset()
    for k in cuts:
        out = op.apply(frozenset(stream.prefix(k)))
        if not prev <= out:
            raise AssertionError(f"output shrank between stages at prefix {k}")
        stages.append((k, out))
        prev = out
    try:
        census = eq_type_of(prev)
    except ValueError:
        census = None
    return ApplyLimitTrace(tuple(stages), census)


# -- property checks ------------------------------------------------------------

@dataclass(frozen=True)
class MonotoneReport:
    checked: int
    failures: tuple[tuple[frozenset[int], frozenset[int], frozenset[int]], ...]

    @property
    def passed(self) -> bool:
        return not self.failures


def check_monotone(op: EnumOperator, samples: Sequence[tuple]) -> MonotoneReport:
    """Verify apply(A) ⊆ apply(B) on flagged nested pairs."""
    failures = []
    for a, b in samples:
        fa, fb = as_fact_set(a), as_fact_set(b)
        if not fa <= fb:
            raise ValueError("sample pair is not nested")
        lost = op.apply(fa) - op.apply(fb)
        if lost:
            failures.append((fa, fb, frozenset(lost)))
    return MonotoneReport(len(samples), tuple(failures))


@dataclass(frozen=True)
class CompactWitness:
    elements: frozenset[int]

    @property
    def code(self) -> int:
        return set_code(self.elements)

    def __len__(self):
        return len(self.elements)


def _colex_key(s: frozenset[int]):
    return sorted(s, reverse=True)


def check_compact(op: EnumOperator, a, x: int, exact_limit: int = 100_000) -> CompactWitness:
    """Minimal finite D ⊆ A with x ∈ apply(op, D).

    Ties broken by least set code (colex order).  Exact by cardinality search
    when the search space is small; otherwise a greedy locally minimal witness
    (removing any single element breaks membership).
    """
    fa = as_fact_set(a)
    if x not in op.apply(fa):
        raise ValueError("x is not in the operator output")
    if isinstance(op, ExplicitOp):
        cands = [set_decode(v) for (y, v) in op.axioms if y == x and set_decode(v) <= fa]
        best = min(cands, key=lambda s: (len(s), _colex_key(s)))
        return CompactWitness(frozenset(best))
    # greedy shrink to a locally minimal core
    core = set(fa)
    for e in sorted(fa, reverse=True):
        if e in core and x in op.apply(frozenset(core - {e})):
            core.remove(e)
    k = len(core)
    # exact refinement: least (cardinality, colex) witness if affordable
    universe = sorted(fa)
    total = sum(_ncr(len(universe), j) for j in range(k + 1))
    if total <= exact_limit:
        for j in range(k + 1):
            hits = [frozenset(c) for c in itertools.combinations(universe, j)
                    if x in op.apply(frozenset(c))]
            if hits:
                return CompactWitness(min(hits, key=_colex_key))
    return CompactWitness(frozenset(core))


def _ncr(n: int, r: int) -> int:
    import math

    return math.comb(n, r)


# -- symbolic pullback -----------------------------------------------------------

def _var_age(name: str) -> tuple[int, str]:
    tail = name[1:]
    return (int(tail), name) if tail.isdigit() else (10**9, name)


class _Uf:
    def __init__(self):
        self.parent: dict[str, str] = {}

    def find(self, v: str) -> str:
        self.parent.setdefault(v, v)
        while self.parent[v] != v:
            self.parent[v] = self.parent[self.parent[v]]
            v = self.parent[v]
        return v

    def union(self, a: str, b: str):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # earliest-created variable wins, so guard variables keep their
            # names when later block unifications join their classes
            lo, hi = sorted((ra, rb), key=_var_age)
            self.parent[hi] = lo

    def snapshot(self) -> "_Uf":
        u = _Uf()
        u.parent = dict(self.parent)
        return u


# representation of a formula variable: ("plain", var) or ("pair", tag, var)
_Rep = tuple


def _unify_reps(r1: _Rep, r2: _Rep, uf: _Uf) -> bool:
    if r1[0] != r2[0]:
        return False
    if r1[0] == "plain":
        uf.union(r1[1], r2[1])
        return True
    if r1[1] != r2[1]:
        return False
    uf.union(r1[2], r2[2])
    return True


def _term_rep(term: STerm, rename: dict[str, str]) -> _Rep:
    if isinstance(term, SVar):
        return ("plain", rename[term.name])
    if isinstance(term, SPair):
        return ("pair", term.tag, rename[term.inner.name])
    raise PullbackError("constant output terms are not supported in pullback")


class _Fresh:
    def __init__(self):
        self.n = 0

    def var(self) -> str:
        self.n += 1
        return f"u{self.n}"


def _atom_choices(a: Atom, op: SchematicOp, reps: dict[str, _Rep], uf: _Uf,
                  fresh: _Fresh, in_block: bool):
    """All template translations of one formula atom.

    Yields (reps', uf', in_atoms) triples; unification failures are dropped
    (that shape combination denotes no element).
    """
    for t in op.templates:
        if t.out.rel != a.rel:
            continue
        if in_block and not t.inputs:
            raise PullbackError(
                f"template for {a.rel!r} has an empty premise set inside a block")
        rename = {}
        for s in t.inputs + (t.out,):
            for arg in s.args:
                for v in ([arg.name] if isinstance(arg, SVar) else
                          [arg.inner.name] if isinstance(arg, SPair) else []):
                    if v not in rename:
                        rename[v] = fresh.var()
        uf2 = uf.snapshot()
        reps2 = dict(reps)
        ok = True
        for formula_var, out_term in zip(a.args, t.out.args):
            if not isinstance(formula_var, str):
                raise PullbackError("pullback needs variable-only atoms")
            r = _term_rep(out_term, rename)
            if formula_var in reps2:
                if not _unify_reps(reps2[formula_var], r, uf2):
                    ok = False
                    break
            else:
                reps2[formula_var] = r
        if not ok:
            continue
        in_atoms = [Atom(s.rel, tuple(
            rename[arg.name] if isinstance(arg, SVar) else arg for arg in s.args))
            for s in t.inputs]
        yield reps2, uf2, in_atoms


def _subst_atoms(atoms: Sequence[Atom], uf: _Uf) -> tuple[Atom, ...]:
    out = []
    for a in atoms:
        args = tuple(uf.find(x) if isinstance(x, str) else x for x in a.args)
        na = Atom(a.rel, args)
        if na not in out:
            out.append(na)
    return tuple(out)


def pullback_sigma2p(op: SchematicOp, phi: Sigma2pNormal, block_bound: int = 16) -> Sigma2pNormal:
    """Sentence about inputs equivalent to phi about the operator's outputs.

    Every output atom is replaced by the template translations producing it;
    guard products become extra existentials, block products extra universals.
    """
    if not isinstance(op, SchematicOp):
        raise PullbackError("pullback needs a schematic operator")
    fresh = _Fresh()
    new_disjuncts: list[Disjunct] = []
    for d in phi.disjuncts:
        blocks, more = d.expand_blocks(block_bound)
        if more:
            raise PullbackError("block family exceeds the pullback bound")
        guard_states = [({}, _Uf(), [])]
        for a in d.guard:
            nxt = []
            for reps, uf, acc in guard_states:
                for reps2, uf2, in_atoms in _atom_choices(a, op, reps, uf, fresh, False):
                    nxt.append((reps2, uf2, acc + in_atoms))
            guard_states = nxt
        for reps, uf, acc in guard_states:
            guard_atoms = list(_subst_atoms(acc, uf))
            gvars = sorted({v for a in guard_atoms for v in a.variables()})
            for v in gvars:
                if Atom("=", (v, v)) not in guard_atoms:
                    guard_atoms.append(Atom("=", (v, v)))
            new_blocks: list[Block] = []
            for blk in blocks:
                states = [(dict(reps), uf.snapshot(), [])]
                for a in blk.atoms:
                    nxt = []
                    for r, u, acc2 in states:
                        for r2, u2, in_atoms in _atom_choices(a, op, r, u, fresh, True):
                            nxt.append((r2, u2, acc2 + in_atoms))
                    states = nxt
                for r, u, acc2 in states:
                    batoms = _subst_atoms(acc2, u)
                    yvars = tuple(sorted(
                        {v for a in batoms for v in a.variables()} - set(gvars)))
                    new_blocks.append(Block(yvars, batoms))
            new_disjuncts.append(Disjunct(tuple(gvars), tuple(guard_atoms), tuple(new_blocks)))
    result = Sigma2pNormal(tuple(new_disjuncts))
    level, pol = classify_level(result.to_tree())
    if (level, pol) not in ((0, "Sigma"), (1, "Sigma"), (2, "Sigma"), (0, "Pi"), (1, "Pi")):
        raise PullbackError(f"pullback left the level-2 fragment: {(level, pol)}")
    return result

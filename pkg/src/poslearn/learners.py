"""Learners, sessions, locking sequences, and the two refutation procedures.

A learner is a total deterministic map from finite fact sequences to a
hypothesis (an index or "?").  Sessions evaluate a learner on every prefix of
a stream and report a finite-horizon convergence surrogate: converged means no
mind change inside the final stability window, never a claim about the true
limit; a limit of "?" counts as non-convergence.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

from .coding import decode_fact, encode_fact, is_positive, pair, seq_code
from .formulas import Block, Disjunct, Sigma2pNormal
from .structures import (
    FiniteDiagram,
    OMEGA,
    StructureSpec,
    as_fact_set,
    eq_type_of,
    is_omega,
    realize,
)
from .streams import Stream

UNKNOWN = "?"
Hypothesis = Union[int, str]


class AlphabetMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Learner:
    """Total deterministic map from fact sequences to hypotheses."""

    fn: Callable[[Sequence[int]], Hypothesis] = field(compare=False)
    alphabet: str = "positive"  # "positive" | "full"
    name: str = "learner"
    session_factory: Optional[Callable[[], "SessionState"]] = field(default=None, compare=False)

    def __call__(self, sigma: Sequence[int]) -> Hypothesis:
        return self.fn(sigma)


class SessionState:
    """Incremental learner protocol: feed facts one by one."""

    def feed(self, code: int) -> Hypothesis:  # pragma: no cover - interface
        raise NotImplementedError


@dataclass(frozen=True)
class SessionTrace:
    hypotheses: tuple[Hypothesis, ...]
    last_change: int
    converged: bool
    limit: Optional[int]
    params: dict = field(default_factory=dict, compare=False)

    def mind_changes(self) -> int:
        return sum(1 for a, b in zip(self.hypotheses, self.hypotheses[1:]) if a != b)

    def to_json(self) -> dict:
        return {
            "hypotheses": list(self.hypotheses),
            "last_change": self.last_change,
            "converged": self.converged,
            "limit": self.limit,
            "params": dict(sorted(self.params.items())),
        }


def run_session(learner: Learner, stream: Sequence[int], horizon: int,
                stability_window: int | None = None) -> SessionTrace:
    """Evaluate the learner on every prefix up to the horizon."""
    if horizon > len(stream):
        raise ValueError("horizon exceeds the provided stream")
    window = stability_window if stability_window is not None else max(1, horizon // 4)
    if learner.alphabet == "positive":
        for c in stream[:horizon]:
            if not is_positive(c):
                raise AlphabetMismatch("positive-alphabet learner fed a negative fact")
    hyps: list[Hypothesis] = []
    if learner.session_factory is not None:
        state = learner.session_factory()
        hyps.append(learner.fn([]))
        for c in stream[:horizon]:
            hyps.append(state.feed(c))
    else:
        for k in range(horizon + 1):
            hyps.append(learner.fn(stream[:k]))
    last_change = 0
    for k in range(1, len(hyps)):
        if hyps[k] != hyps[k - 1]:
            last_change = k
    stable = last_change <= horizon - window
    limit_val = hyps[-1]
    converged = stable and isinstance(limit_val, int)
    return SessionTrace(
        tuple(hyps),
        last_change,
        converged,
        limit_val if converged else None,
        {"horizon": horizon, "window": window, "learner": learner.name},
    )


# -- generic learner from a sentence family -----------------------------------

def _single_disjuncts(family: Sequence[Sigma2pNormal]) -> list[Disjunct]:
    out = []
    for phi in family:
        if len(phi.disjuncts) != 1:
            raise ValueError("the generic learner wants single-disjunct normal forms")
        out.append(phi.disjuncts[0])
    return out


def _blocks_of(d: Disjunct, support_size: int) -> list[Block]:
    # block-enumeration bound during learning: the current support size
    blocks, _ = d.expand_blocks(max(1, support_size))
    return blocks


def generic_hypothesis(family: Sequence[Sigma2pNormal], sigma: Sequence[int]) -> Hypothesis:
    """Reference evaluation: least (index, witness) with guard shown, unrefuted."""
    disjuncts = _single_disjuncts(family)
    shown = {c for c in sigma if is_positive(c)}
    support = sorted({x for c in shown for x in decode_fact(c)[1:3]})
    best: tuple[int, int] | None = None  # (paircode, index)
    for i, d in enumerate(disjuncts):
        blocks = _blocks_of(d, len(support))
        for xs in itertools.product(support, repeat=len(d.xvars)):
            pc = pair(i, seq_code(xs))
            if best is not None and pc >= best[0]:
                continue
            env = dict(zip(d.xvars, xs))
            if not all(a.subst(env).code() in shown for a in d.guard):
                continue
            if _refuted(blocks, env, support, shown):
                continue
            best = (pc, i)
    return best[1] if best is not None else UNKNOWN


def _refuted(blocks: Iterable[Block], env: dict, support: Sequence[int], shown: set[int]) -> bool:
    for blk in blocks:
        for ys in itertools.product(support, repeat=len(blk.yvars)):
            e = dict(env)
            e.update(zip(blk.yvars, ys))
            if all(a.subst(e).code() in shown for a in blk.atoms):
                return True
    return False


class _GenericSession(SessionState):
    """Incremental evaluation of the generic learner.

    Keeps guard-complete candidate witnesses in a priority queue by (index,
    witness-code) pairing order; refutation status is checked incrementally on
    the current minimum and cached once true (block presence is monotone).
    """

    def __init__(self, family: Sequence[Sigma2pNormal]):
        self.disjuncts = _single_disjuncts(family)
        self.shown: set[int] = set()
        self.support: list[int] = []
        self.support_set: set[int] = set()
        self.candidates: dict[tuple[int, tuple[int, ...]], int] = {}  # key -> paircode
        self.refuted: set[tuple[int, tuple[int, ...]]] = set()
        self.best: tuple[int, int, tuple[int, ...]] | None = None  # (pc, i, xs)

    def feed(self, code: int) -> Hypothesis:
        if code in self.shown or not is_positive(code):
            return self._hypothesis()
        self.shown.add(code)
        _, a, b, _ = decode_fact(code)
        for e in (a, b):
            if e not in self.support_set:
                self.support_set.add(e)
                self.support.append(e)
        self._new_completions(code)
        if self.best is not None and self._fact_refutes(self.best, code):
            self.refuted.add((self.best[1], self.best[2]))
            self.candidates.pop((self.best[1], self.best[2]), None)
            self.best = None
        self._select_best()
        return self._hypothesis()

    def _hypothesis(self) -> Hypothesis:
        return self.best[1] if self.best is not None else UNKNOWN

    def _new_completions(self, code: int):
        rel, a, b, _ = decode_fact(code)
        for i, d in enumerate(self.disjuncts):
            arity = len(d.xvars)
            var_index = {v: k for k, v in enumerate(d.xvars)}
            for atom_ in d.guard:
                if atom_.rel != rel:
                    continue
                u, v = atom_.args
                partial: dict[int, int] = {}
                ju, jv = var_index[u], var_index[v]
                if ju == jv and a != b:
                    continue
                partial[ju] = a
                if jv in partial and partial[jv] != b:
                    continue
                partial[jv] = b
                free = [k for k in range(arity) if k not in partial]
                for combo in itertools.product(self.support, repeat=len(free)):
                    xs = [0] * arity
                    for k, val in partial.items():
                        xs[k] = val
                    for k, val in zip(free, combo):
                        xs[k] = val
                    key = (i, tuple(xs))
                    if key in self.candidates or key in self.refuted:
                        continue
                    env = dict(zip(d.xvars, xs))
                    if all(g.subst(env).code() in self.shown for g in d.guard):
                        self.candidates[key] = pair(i, seq_code(tuple(xs)))

    def _fact_refutes(self, best: tuple[int, int, tuple[int, ...]], code: int) -> bool:
        _, i, xs = best
        d = self.disjuncts[i]
        env = dict(zip(d.xvars, xs))
        rel, a, b, _ = decode_fact(code)
        for blk in _blocks_of(d, len(self.support)):
            hit = any(atom_.rel == rel for atom_ in blk.atoms)
            if not hit:
                continue
            for ys in itertools.product(self.support, repeat=len(blk.yvars)):
                e = dict(env)
                e.update(zip(blk.yvars, ys))
                if all(atom_.subst(e).code() in self.shown for atom_ in blk.atoms):
                    return True
        return False

    def _refuted_full(self, i: int, xs: tuple[int, ...]) -> bool:
        d = self.disjuncts[i]
        env = dict(zip(d.xvars, xs))
        return _refuted(_blocks_of(d, len(self.support)), env, self.support, self.shown)

    def _select_best(self):
        if self.best is not None:
            best_pc = self.best[0]
            challenger = min(self.candidates.items(), key=lambda kv: kv[1], default=None)
            if challenger is None or challenger[1] >= best_pc:
                return
            self.best = None
        while self.candidates:
            (i, xs), pc = min(self.candidates.items(), key=lambda kv: kv[1])
            if self._refuted_full(i, xs):
                self.refuted.add((i, xs))
                del self.candidates[(i, xs)]
                continue
            self.best = (pc, i, xs)
            return
        self.best = None


def generic_sigma2p_learner(family: Sequence[Sigma2pNormal], name: str = "generic") -> Learner:
    fam = tuple(family)
    if not fam:
        raise ValueError("family must be nonempty")
    _single_disjuncts(fam)  # validate
    return Learner(
        fn=lambda sigma: generic_hypothesis(fam, sigma),
        alphabet="positive",
        name=name,
        session_factory=lambda: _GenericSession(fam),
    )


# -- other built-in learners ----------------------------------------------------

def _census_components(codes: Iterable[int]) -> dict[int, set[int]]:
    parent: dict[int, int] = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    for c in codes:
        rel, a, b, pos = decode_fact(c)
        if not pos:
            continue
        find(a), find(b)
        if rel in ("~", "="):
            union(a, b)
    comps: dict[int, set[int]] = {}
    for x in parent:
        comps.setdefault(find(x), set()).add(x)
    return comps


class _CensusSession(SessionState):
    """Incremental union-find census shared by the census-style learners."""

    def __init__(self):
        self.parent: dict[int, int] = {}
        self.size: dict[int, int] = {}
        self.components = 0
        self.anchor: int | None = None

    def _find(self, x: int) -> int:
        if x not in self.parent:
            self.parent[x] = x
            self.size[x] = 1
            self.components += 1
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def _union(self, a: int, b: int):
        ra, rb = self._find(a), self._find(b)
        if ra != rb:
            lo, hi = min(ra, rb), max(ra, rb)
            self.parent[hi] = lo
            self.size[lo] += self.size[hi]
            self.components -= 1

    def absorb(self, code: int):
        rel, a, b, positive = decode_fact(code)
        if not positive:
            return
        if self.anchor is None:
            self.anchor = min(a, b)
        self._find(a), self._find(b)
        if rel in ("~", "="):
            self._union(a, b)

    def anchor_size(self) -> int | None:
        if self.anchor is None:
            return None
        return self.size[self._find(self.anchor)]


class _AnchorSession(_CensusSession):
    def feed(self, code: int) -> Hypothesis:
        self.absorb(code)
        s = self.anchor_size()
        return UNKNOWN if s is None else s - 1


class _ComponentCountSession(_CensusSession):
    def feed(self, code: int) -> Hypothesis:
        self.absorb(code)
        return 1 if self.components >= 2 else 0


def anchor_census_learner() -> Learner:
    """Conjectures (certified class size of the first fact's least element) - 1."""

    def fn(sigma: Sequence[int]) -> Hypothesis:
        if not sigma:
            return UNKNOWN
        _, a, b, _ = decode_fact(sigma[0])
        anchor = min(a, b)
        comps = _census_components(sigma)
        for comp in comps.values():
            if anchor in comp:
                return len(comp) - 1
        return UNKNOWN

    return Learner(fn=fn, alphabet="positive", name="anchor-census",
                   session_factory=_AnchorSession)


def component_count_learner() -> Learner:
    """Conjectures index 1 when two classes are certified, else 0."""

    def fn(sigma: Sequence[int]) -> Hypothesis:
        if not sigma:
            return 0
        return 1 if len(_census_components(sigma)) >= 2 else 0

    return Learner(fn=fn, alphabet="positive", name="component-count",
                   session_factory=_ComponentCountSession)


def infex_two_class_learner() -> Learner:
    """Over the full alphabet: index 1 once a negative "~" fact shows up."""

    def fn(sigma: Sequence[int]) -> Hypothesis:
        for c in sigma:
            rel, _, _, positive = decode_fact(c)
            if rel == "~" and not positive:
                return 1
        return 0

    return Learner(fn=fn, alphabet="full", name="infex-two-class")


def constant_learner(value: Hypothesis, alphabet: str = "positive") -> Learner:
    return Learner(fn=lambda sigma: value, alphabet=alphabet, name=f"constant-{value}")


def parity_learner() -> Learner:
    """Deliberately oscillating: flips with the sequence length parity."""
    return Learner(fn=lambda sigma: len(sigma) % 2, alphabet="positive", name="parity")


# -- locking sequences ------------------------------------------------------------

@dataclass(frozen=True)
class LockBounds:
    level: int = 2
    max_len: int = 2
    ext_depth: int = 2


def find_locking_sequence(learner: Learner, spec: StructureSpec,
                          bounds: LockBounds = LockBounds()) -> Optional[tuple[list[int], Hypothesis]]:
    """Bounded search for a prefix no bounded extension can change.

    Returns the least (length, lexicographic) sequence sigma' over the
    truncation's facts such that every extension within the bounds keeps the
    learner's value, or None.  NotFound is a bounded-search verdict, never a
    theorem.
    """
    pool = sorted(realize(spec, bounds.level).facts)

    def extensions(base: list[int]):
        for d in range(1, bounds.ext_depth + 1):
            for suffix in itertools.product(pool, repeat=d):
                yield base + list(suffix)

    for length in range(0, bounds.max_len + 1):
        for cand in itertools.product(pool, repeat=length):
            sigma = list(cand)
            val = learner(sigma)
            if all(learner(t) == val for t in extensions(sigma)):
                return sigma, val
    return None


# -- the two-class adversary -------------------------------------------------------

@dataclass(frozen=True)
class FailureWitness:
    kind: str  # wrong_limit | non_convergence | divergence | survived
    prefix: tuple[int, ...]
    trace: SessionTrace
    claimed_spec: StructureSpec
    mind_changes: int

    @property
    def defeated(self) -> bool:
        return self.kind != "survived"


def _two_class_copy_facts(class0: Sequence[int], class1: Sequence[int]) -> list[int]:
    """Positive diagram of the two-class equivalence copy on given elements."""
    facts = []
    for members in (class0, class1):
        for x in members:
            facts.append(encode_fact("=", x, x))
            facts.append(encode_fact("~", x, x))
        for x, y in itertools.combinations(members, 2):
            facts.append(encode_fact("~", x, y))
            facts.append(encode_fact("~", y, x))
    for x in list(class0) + list(class1):
        for y in list(class0) + list(class1):
            if x != y:
                facts.append(encode_fact("!=", x, y))
    return sorted(set(facts))


def adversary_two_classes(learner: Learner, bounds: LockBounds = LockBounds(),
                          horizon: int = 3000, seed: int = 0) -> FailureWitness:
    """Defeat a candidate learner for the one-vs-two infinite-class pair.

    Hypothesis space: 0 denotes the single-class structure, 1 the two-class
    one.  Searches for a locking sequence on the single-class diagram; a lock
    at the wrong value is punished on a single-class text, a lock at 0 by
    hiding the lock's support inside one class of a two-class copy.  With no
    lock found, a divergence-forcing text is built by alternating extension
    search.
    """
    if learner.alphabet != "positive":
        raise AlphabetMismatch("the adversary feeds texts, a positive-alphabet learner is required")
    one = StructureSpec.eq([(OMEGA, 1)])
    lock = find_locking_sequence(learner, one, bounds)
    witnesses = []
    if lock is not None:
        w = _adversary_lock_branch(learner, lock, horizon, seed)
        if w.defeated:
            return w
        witnesses.append(w)
    w = _adversary_divergence_branch(learner, bounds, horizon, seed)
    if w.defeated or not witnesses:
        return w
    return witnesses[0]


def _adversary_lock_branch(learner: Learner, lock, horizon: int, seed: int) -> FailureWitness:
    one = StructureSpec.eq([(OMEGA, 1)])
    rng = random.Random(seed)
    sigma, value = lock
    if value == 0:
        # bury the locking support inside one class of a two-class copy
        support = sorted({x for c in sigma for x in decode_fact(c)[1:3]})
        n = 1
        while (2 * (len(support) + n)) ** 2 < 2 * horizon:
            n += 1
        fresh = itertools.count(max(support, default=-1) + 1)
        class0 = support + [next(fresh) for _ in range(n)]
        class1 = [next(fresh) for _ in range(len(class0))]
        rest = _two_class_copy_facts(class0, class1)
        rng.shuffle(rest)
        text = (list(sigma) + rest)[:horizon]
        while len(text) < horizon:
            text.append(rest[len(text) % len(rest)])
        claimed = StructureSpec.eq([(OMEGA, 2)])
        correct = 1
    else:
        # locked at a wrong value for the single-class structure
        stream = Stream(one, seed, "text")
        text = (list(sigma) + stream.prefix(horizon))[:horizon]
        claimed = one
        correct = 0
    trace = run_session(learner, text, horizon)
    if trace.converged and trace.limit == correct:
        kind = "survived"
    elif trace.converged:
        kind = "wrong_limit"
    else:
        kind = "non_convergence"
    return FailureWitness(kind, tuple(text), trace, claimed, trace.mind_changes())


def _adversary_divergence_branch(learner: Learner, bounds: LockBounds,
                                 horizon: int, seed: int,
                                 change_target: int = 10) -> FailureWitness:
    """Alternating extension search: flip the verdict as often as the bounds allow."""
    one = StructureSpec.eq([(OMEGA, 1)])
    level = max(bounds.level, 2)
    pool = sorted(realize(one, level).facts)
    cover = iter(Stream(one, seed, "text").prefix(horizon))
    text: list[int] = []
    changes = 0
    while len(text) < horizon and changes < change_target:
        base_val = learner(text)
        found = None
        for d in range(1, bounds.ext_depth + 1):
            for suffix in itertools.product(pool, repeat=d):
                if learner(text + list(suffix)) != base_val:
                    found = list(suffix)
                    break
            if found:
                break
        if found is None:
            if level >= bounds.level + 6:
                break
            level += 1
            pool = sorted(realize(one, level).facts)
            continue
        text.extend(found)
        changes += 1
        nxt = next(cover, None)
        if nxt is not None:
            text.append(nxt)
    while len(text) < horizon:
        text.append(next(cover, pool[len(text) % len(pool)]))
    text = text[:horizon]
    trace = run_session(learner, text, horizon)
    kind = "survived" if trace.converged and trace.limit == 0 else "divergence"
    return FailureWitness(kind, tuple(text), trace, one, trace.mind_changes())


# -- refutation of claimed continuous embeddings -------------------------------------

@dataclass(frozen=True)
class RefuteBounds:
    screen_level: int = 4
    deep_level: int = 6
    support: int = 10


@dataclass(frozen=True)
class RefutationResult:
    kind: str  # contradiction | indistinguishable | structural | not_found
    detail: dict = field(default_factory=dict, compare=False)

    @property
    def found(self) -> bool:
        return self.kind in ("contradiction", "indistinguishable")


def _census_compatible(census: dict[int, int], spec: StructureSpec) -> bool:
    """Can the observed lower-bound census come from a truncation of the spec?"""
    comps = sorted((s for s, c in census.items() for _ in range(c)), reverse=True)
    slots: list[tuple] = []
    for size, count in spec.classes:
        slots.append((size, count))

    def assign(i: int, used: dict[int, int]) -> bool:
        if i == len(comps):
            return True
        for j, (size, count) in enumerate(slots):
            if comps[i] > size:
                continue
            if not is_omega(count) and used.get(j, 0) >= count:
                continue
            used[j] = used.get(j, 0) + 1
            if assign(i + 1, used):
                return True
            used[j] -= 1
        return False

    return assign(0, {})


def _split_two_classes(support: Sequence[int], inside: Sequence[int]) -> FiniteDiagram:
    """Two-class partition of a one-class copy's support, `inside` kept together."""
    inside_set = set(inside)
    rest = [x for x in support if x not in inside_set]
    half = max(1, len(rest) // 2)
    class0 = sorted(inside_set | set(rest[:half]))
    class1 = rest[half:]
    if not class1:
        raise ValueError("not enough support to split off a second class")
    return FiniteDiagram.of(_two_class_copy_facts(class0, class1))


def refute_scott_embedding(op, source_pair: str, target_pair: str,
                           bounds: RefuteBounds = RefuteBounds()) -> RefutationResult:
    """Execute the monotonicity argument against a claimed continuous embedding.

    Supported cases: "pair->augmented" (single/two infinite classes into
    omega-plus-tail structures) and "augmented->finite" (omega-plus-tail into
    all-classes-of-one-size structures).
    """
    if (source_pair, target_pair) == ("pair", "augmented"):
        return _refute_pair_to_augmented(op, bounds)
    if (source_pair, target_pair) == ("augmented", "finite"):
        return _refute_augmented_to_finite(op, bounds)
    raise ValueError(f"unsupported case {(source_pair, target_pair)!r}")


def _eq_census_or_none(facts: frozenset[int]):
    try:
        return eq_type_of(facts)
    except ValueError:
        return None


def _refute_pair_to_augmented(op, bounds: RefuteBounds) -> RefutationResult:
    one = StructureSpec.eq([(OMEGA, 1)])
    two = StructureSpec.eq([(OMEGA, 2)])
    tgt_one = StructureSpec.eq([(OMEGA, 1), (1, 1)])
    tgt_two = StructureSpec.eq([(OMEGA, 1), (2, 1)])

    a_small = realize(one, bounds.screen_level)
    out_small = op.apply(a_small)
    census = _eq_census_or_none(out_small)
    if census is None:
        return RefutationResult("structural", {"reason": "output is not an equivalence diagram"})
    two_small = realize(two, bounds.screen_level)
    out_two = op.apply(two_small)
    if out_small == out_two:
        return RefutationResult(
            "indistinguishable",
            {"reason": "equal outputs on non-isomorphic inputs cannot reflect isomorphism"},
        )
    if not _census_compatible(census.census, tgt_one):
        return RefutationResult("structural", {"reason": "output census incompatible with the claimed type",
                                               "census": census.census})
    singles = [c for c in census.components if len(c) == 1]
    if not singles:
        return RefutationResult("structural", {"reason": "no singleton class in the claimed image"})
    b0 = singles[0][0]

    from .operators import check_compact

    b0_fact = next(f for f in sorted(out_small) if set(decode_fact(f)[1:3]) == {b0})
    alpha = check_compact(op, a_small, b0_fact).elements
    alpha_support = sorted({x for f in alpha for x in decode_fact(f)[1:3]})
    if len(alpha_support) > bounds.support:
        return RefutationResult("not_found", {"reason": "compactness witness exceeds the support bound"})

    a_big = realize(one, bounds.deep_level)
    split = _split_two_classes(sorted(a_big.support), alpha_support)
    if not split.facts <= a_big.facts:
        return RefutationResult("not_found", {"reason": "split is not a sub-diagram"})
    out_split = op.apply(split)
    partner = None
    for f in sorted(out_split):
        rel, x, y, _ = decode_fact(f)
        if rel == "~" and ((x == b0 and y != b0) or (y == b0 and x != b0)):
            partner = y if x == b0 else x
            break
    if partner is None:
        return RefutationResult("not_found", {"reason": "no forced partner appeared within bounds"})
    out_big = op.apply(a_big)
    if not out_split <= out_big:
        return RefutationResult("contradiction", {
            "reason": "monotonicity violated outright on a sub-diagram",
            "alpha": sorted(alpha)})
    return RefutationResult("contradiction", {
        "reason": "forced partner joins a class claimed to stay a singleton",
        "alpha": sorted(alpha), "b0": b0, "partner": partner,
        "census_small": census.census,
        "census_split": _eq_census_or_none(out_split).census if _eq_census_or_none(out_split) else None,
    })


def _refute_augmented_to_finite(op, bounds: RefuteBounds) -> RefutationResult:
    src_one = StructureSpec.eq([(OMEGA, 1), (1, 1)])
    tgt_one = StructureSpec.eq([(1, OMEGA)])

    b_small = realize(src_one, bounds.screen_level)
    out_small = op.apply(b_small)
    census = _eq_census_or_none(out_small)
    if census is None:
        return RefutationResult("structural", {"reason": "output is not an equivalence diagram"})
    if not _census_compatible(census.census, tgt_one):
        return RefutationResult("structural", {"reason": "output census incompatible with the claimed type",
                                               "census": census.census})

    b_big = realize(src_one, bounds.deep_level)
    # substructure of the omega-plus-singleton copy with a two-class tail:
    # drop the singleton, carve a pair out of the omega class
    omega_members = max(eq_type_of(b_big.facts).components, key=len)
    w1, w2 = omega_members[0], omega_members[1]
    rest = [x for x in omega_members if x not in (w1, w2)]
    sub = FiniteDiagram.of(_two_class_copy_facts(rest, [w1, w2]))
    if not sub.facts <= b_big.facts:
        return RefutationResult("not_found", {"reason": "substructure construction failed"})
    out_sub = op.apply(sub)
    linked = None
    for f in sorted(out_sub):
        rel, x, y, _ = decode_fact(f)
        if rel == "~" and x != y:
            linked = (x, y)
            break
    if linked is None:
        return RefutationResult("not_found", {"reason": "no two-element class appeared within bounds"})
    out_big = op.apply(b_big)
    if not out_sub <= out_big:
        return RefutationResult("contradiction", {
            "reason": "monotonicity violated outright on a sub-diagram", "pair": linked})
    return RefutationResult("contradiction", {
        "reason": "linked pair lands inside an image claimed to be all singletons",
        "pair": linked, "census_small": census.census,
    })

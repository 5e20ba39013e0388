"""Fair, seeded, reproducible texts and informants for canonical structures.

A text enumerates exactly the positive diagram of the canonical copy; an
informant also emits the negative facts.  Fairness is level-major: every fact
of the level-n truncation appears before any fact that first shows up at
level n+1, shuffled within a level by the seed.  Streams repeat earlier facts
now and then (period derived from the seed) to exercise learners against
repetition.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .coding import decode_fact, encode_fact
from .structures import FiniteDiagram, StructureSpec, realize


def negative_facts(spec: StructureSpec, level: int) -> frozenset[int]:
    """Negations of every false atom on the truncated support."""
    diagram = realize(spec, level)
    support = sorted(diagram.support)
    rels = {"=", "!=", "~"} if spec.kind == "eq" else {"=", "!=", "<"} | {
        f"P{j}" for j in range(level)
    }
    out = set()
    for rel in sorted(rels):
        unary = rel.startswith("P")
        for a in support:
            if unary:
                if encode_fact(rel, a) not in diagram.facts:
                    out.add(encode_fact(rel, a, positive=False))
                continue
            for b in support:
                if encode_fact(rel, a, b) not in diagram.facts:
                    out.add(encode_fact(rel, a, b, positive=False))
    return frozenset(out)


@dataclass
class Stream:
    """Deterministic enumeration of a canonical copy's facts.

    Value-like: all state is derived from (spec, seed, kind); instances cache
    the emitted prefix and can be advanced independently.
    """

    spec: StructureSpec
    seed: int
    kind: str = "text"  # "text" | "informant"
    _emitted: list[int] = field(default_factory=list, repr=False)
    _emitted_set: set[int] = field(default_factory=set, repr=False)
    _level: int = field(default=0, repr=False)
    _coverage: dict[int, int] = field(default_factory=dict, repr=False)
    _rng: random.Random = field(default=None, repr=False)
    _repeat_period: int = field(default=0, repr=False)
    _since_repeat: int = field(default=0, repr=False)

    def __post_init__(self):
        if self.kind not in ("text", "informant"):
            raise ValueError("kind must be text or informant")
        self._rng = random.Random((self.seed, self.kind, self.spec.dumps()).__repr__())
        self._repeat_period = 4 + self.seed % 5

    def _level_facts(self, level: int) -> frozenset[int]:
        facts = realize(self.spec, level).facts
        if self.kind == "informant":
            facts = facts | negative_facts(self.spec, level)
        return facts

    def _extend_level(self):
        self._level += 1
        new = sorted(self._level_facts(self._level) - frozenset(self._emitted_set))
        self._rng.shuffle(new)
        if not new:
            # finite structure exhausted: the enumeration goes on by repetition
            self._emitted.append(self._rng.choice(self._emitted))
            self._coverage[self._level] = len(self._emitted)
            return
        for f in new:
            self._since_repeat += 1
            if self._since_repeat >= self._repeat_period and self._emitted:
                self._emitted.append(self._rng.choice(self._emitted))
                self._since_repeat = 0
            self._emitted.append(f)
            self._emitted_set.add(f)
        self._coverage[self._level] = len(self._emitted)

    def prefix(self, k: int) -> list[int]:
        """First k emitted facts."""
        if k < 0:
            raise ValueError("negative prefix length")
        while len(self._emitted) < k:
            self._extend_level()
        return self._emitted[:k]

    def coverage_prefix(self, level: int) -> int:
        """Prefix length by which the level truncation is fully emitted."""
        while self._level < level:
            self._extend_level()
        return self._coverage[level]

    def alphabet(self) -> str:
        return "positive" if self.kind == "text" else "full"


def text_stream(spec: StructureSpec, seed: int, horizon: int) -> list[int]:
    """Length-`horizon` prefix of the seeded text for the canonical copy."""
    return Stream(spec, seed, "text").prefix(horizon)


def informant_stream(spec: StructureSpec, seed: int, horizon: int) -> list[int]:
    return Stream(spec, seed, "informant").prefix(horizon)


def prefix(stream: list[int], k: int) -> list[int]:
    if k < 0 or k > len(stream):
        raise ValueError("prefix length out of range")
    return stream[:k]


def prefix_diagram(stream: list[int], k: int) -> FiniteDiagram:
    """Positive facts in the first k items (negatives filtered out)."""
    return FiniteDiagram.of(c for c in prefix(stream, k) if decode_fact(c)[3])

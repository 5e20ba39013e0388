import random

import pytest

from poslearn.coding import encode_fact, set_code, set_decode
from poslearn.formulas import TRUE, FALSE, eval_exact, exact_size_sentence
from poslearn.operators import (
    ApplyLimitTrace,
    CompactWitness,
    ExplicitOp,
    FuncOp,
    PullbackError,
    SAtom,
    SchematicOp,
    SPair,
    SVar,
    Template,
    apply,
    apply_limit,
    check_compact,
    check_monotone,
    compose,
    identity_op,
    pullback_sigma2p,
)
from poslearn.structures import OMEGA, StructureSpec

W = OMEGA


def spec_eq(*classes):
    return StructureSpec.eq(classes)


def brute_apply(axioms, b):
    # independent transcription of the defining comprehension
    return frozenset(x for (x, v) in axioms if set_decode(v) <= set(b))


def test_empty_witness_axiom():
    op = ExplicitOp.of([(7, set_code([]))])
    assert apply(op, frozenset()) == {7}


def test_single_axiom_membership():
    op = ExplicitOp.of([(5, set_code([2]))])
    assert apply(op, {2, 3}) == {5}
    assert apply(op, {3}) == frozenset()


def test_apply_matches_brute_force_on_random_instances():
    rng = random.Random(12345)
    for _ in range(200):
        axioms = set()
        for _ in range(rng.randrange(0, 40)):
            x = rng.randrange(0, 60)
            witness = frozenset(rng.sample(range(12), rng.randrange(0, 5)))
            axioms.add((x, set_code(witness)))
        op = ExplicitOp.of(axioms)
        b = frozenset(rng.sample(range(12), rng.randrange(0, 13)))
        assert apply(op, b) == brute_apply(axioms, b)


def transitivity_op():
    a, b, c = SVar("a"), SVar("b"), SVar("c")
    return SchematicOp(
        (Template(SAtom("~", (a, b)), (SAtom("~", (a, c)), SAtom("~", (c, b)))),),
        "trans",
    )


def test_schematic_transitivity():
    op = transitivity_op()
    d = {encode_fact("~", 0, 1), encode_fact("~", 1, 2)}
    out = apply(op, d)
    assert encode_fact("~", 0, 2) in out
    # instantiations only ever chain existing links
    assert out <= {encode_fact("~", x, y) for x in range(3) for y in range(3)}


def test_schematic_rejects_bad_templates():
    u, v = SVar("u"), SVar("v")
    with pytest.raises(ValueError):
        SchematicOp((Template(SAtom("~", (u, v)), ()),))  # unbound out vars
    with pytest.raises(ValueError):
        SchematicOp((Template(SAtom("~", (u, u)), (SAtom("~", (SPair(0, u), u)),)),))
    with pytest.raises(ValueError):
        SchematicOp((
            Template(SAtom("~", (u, u)), (SAtom("~", (u, u)),)),
            Template(SAtom("~", (SPair(0, u), SPair(0, u))), (SAtom("~", (u, u)),)),
        ))


def test_streamed_axioms_need_bound():
    gen = ((x, set_code([x])) for x in range(10**6))
    with pytest.raises(ValueError):
        ExplicitOp.from_stream(gen, None)
    op = ExplicitOp.from_stream(((x, set_code([x])) for x in range(10**6)), 50)
    assert len(op.axioms) == 50


def test_apply_limit_constant_operator():
    const = ExplicitOp.of([(9, set_code([]))], "const")
    trace = apply_limit(const, spec_eq((W, 1)), seed=3, horizon=60)
    outs = trace.outputs()
    assert all(o == {9} for o in outs)


def test_apply_limit_monotone_growth_identity():
    trace = apply_limit(identity_op(), spec_eq((W, 2)), seed=5, horizon=120)
    outs = trace.outputs()
    for earlier, later in zip(outs, outs[1:]):
        assert earlier <= later
    assert trace.final_census is not None


def seeded_nested_pairs(n, seed, spec=None, max_level=3):
    from poslearn.streams import Stream

    rng = random.Random(seed)
    spec = spec or spec_eq((W, W), (2, W))
    out = []
    stream = Stream(spec, seed)
    for _ in range(n):
        k = rng.randrange(4, 40)
        big = frozenset(stream.prefix(k))
        small = frozenset(x for x in big if rng.random() < 0.6)
        out.append((small, big))
    return out


def test_check_monotone_identity_and_explicit():
    pairs = seeded_nested_pairs(30, 7)
    assert check_monotone(identity_op(), pairs).passed
    op = ExplicitOp.of([(1, set_code([0])), (2, set_code([0, 3]))])
    sets = [(frozenset({0}), frozenset({0, 3})), (frozenset(), frozenset({0}))]
    assert check_monotone(op, sets).passed


def test_check_monotone_catches_broken_operator():
    broken = FuncOp(lambda s: frozenset({1}) if len(s) <= 1 else frozenset(), "broken")
    rep = check_monotone(broken, [(frozenset({5}), frozenset({5, 6}))])
    assert not rep.passed
    (a, b, lost) = rep.failures[0]
    assert lost == {1}


def test_check_monotone_rejects_non_nested():
    with pytest.raises(ValueError):
        check_monotone(identity_op(), [(frozenset({1}), frozenset({2}))])


def test_check_compact_empty_witness():
    op = ExplicitOp.of([(7, set_code([]))])
    w = check_compact(op, {1, 2, 3}, 7)
    assert w.elements == frozenset()
    assert w.code == 0


def test_check_compact_explicit_minimal():
    op = ExplicitOp.of([(5, set_code([2])), (5, set_code([2, 3]))])
    w = check_compact(op, {2, 3}, 5)
    assert w.elements == {2}


def test_check_compact_transitivity_premises():
    op = transitivity_op()
    d = frozenset({encode_fact("~", 0, 1), encode_fact("~", 1, 2), encode_fact("=", 5, 5)})
    w = check_compact(op, d, encode_fact("~", 0, 2))
    assert w.elements == {encode_fact("~", 0, 1), encode_fact("~", 1, 2)}
    # genuinely minimal: removing any element breaks membership
    for e in w.elements:
        assert encode_fact("~", 0, 2) not in apply(op, w.elements - {e})


def test_check_compact_requires_membership():
    with pytest.raises(ValueError):
        check_compact(identity_op(), frozenset(), 3)


def test_compose_identity_and_assoc():
    ident = identity_op()
    samples = [frozenset(p[1]) for p in seeded_nested_pairs(10, 11)]
    two = compose(ident, ident)
    three_a = compose(compose(ident, transitivity_op()), ident)
    three_b = compose(ident, compose(transitivity_op(), ident))
    for s in samples:
        assert apply(two, s) == apply(ident, s)
        assert apply(three_a, s) == apply(three_b, s)


def test_compose_agrees_with_sequential():
    t = transitivity_op()
    for s in [frozenset(p[1]) for p in seeded_nested_pairs(20, 13)]:
        assert apply(compose(t, identity_op()), s) == apply(t, apply(identity_op(), s))


def test_pullback_identity_is_semantically_invariant():
    ident = identity_op()
    for i in range(3):
        phi = exact_size_sentence(i)
        pb = pullback_sigma2p(ident, phi)
        for spec in (spec_eq((W, 1)), spec_eq((2, 1)), spec_eq((W, W), (i + 1, W)), spec_eq((3, 2))):
            assert eval_exact(pb, spec) == eval_exact(phi, spec)


def test_pullback_atom_for_atom_renaming():
    # operator emitting (a~b) from {a~b} only: pullback substitutes atom-for-atom
    u, v = SVar("u"), SVar("v")
    op = SchematicOp(
        tuple(Template(SAtom(r, (u, v)), (SAtom(r, (u, v)),)) for r in ("=", "~", "!=")),
        "rename",
    )
    phi = exact_size_sentence(0)
    pb = pullback_sigma2p(op, phi)
    (d,) = pb.disjuncts
    assert len(d.xvars) == 1
    assert len(d.blocks) == 1
    assert eval_exact(pb, spec_eq((1, 1))) == TRUE
    assert eval_exact(pb, spec_eq((2, 1))) == FALSE


def test_pullback_empty_premise_in_block_reported():
    u, v = SVar("u"), SVar("v")
    op = SchematicOp(
        (
            Template(SAtom("=", (u, v)), (SAtom("=", (u, v)),)),
            Template(SAtom("~", (3, 3)), ()),  # ground, premise-free
            Template(SAtom("~", (u, v)), (SAtom("~", (u, v)),)),
            Template(SAtom("!=", (u, v)), (SAtom("!=", (u, v)),)),
        ),
        "oracle-ish",
    )
    with pytest.raises(PullbackError):
        pullback_sigma2p(op, exact_size_sentence(0))


def test_pullback_requires_schematic():
    with pytest.raises(PullbackError):
        pullback_sigma2p(ExplicitOp.of([]), exact_size_sentence(0))  # type: ignore[arg-type]

import itertools

import pytest

from poslearn.formulas import (
    FALSE,
    INCONCLUSIVE,
    TRUE,
    Atom,
    Block,
    Disjunct,
    FAtom,
    FForall,
    FNot,
    FOr,
    GeneratedBlocks,
    MalformedFormula,
    Sigma2pNormal,
    atom,
    classify_level,
    eval_at_stage,
    eval_exact,
    exact_size_sentence,
    format_formula,
    normal_from_tree,
    parse_formula,
)
from poslearn.structures import OMEGA, StructureSpec, realize_eq_spec

W = OMEGA


def spec_eq(*classes):
    return StructureSpec.eq(classes)


# -- independent truth oracle: enumerate every witness tuple and block instance
# over the complete diagram of a fully finite structure.

def brute_truth(phi: Sigma2pNormal, spec: StructureSpec) -> bool:
    d = realize_eq_spec(spec, 1)  # finite sizes/counts realize completely
    facts, support = d.facts, sorted(d.support)
    for dj in phi.disjuncts:
        blocks, more = dj.expand_blocks(999)
        assert not more, "oracle needs finitely many blocks"
        for xs in itertools.product(support, repeat=len(dj.xvars)):
            env = dict(zip(dj.xvars, xs))
            if not all(a.subst(env).code() in facts for a in dj.guard):
                continue
            violated = False
            for b in blocks:
                for ys in itertools.product(support, repeat=len(b.yvars)):
                    e = dict(env)
                    e.update(zip(b.yvars, ys))
                    if all(a.subst(e).code() in facts for a in b.atoms):
                        violated = True
                        break
                if violated:
                    break
            if not violated:
                return True
    return False


FINITE_SPECS = [
    spec_eq((1, 1)),
    spec_eq((2, 1)),
    spec_eq((3, 1)),
    spec_eq((4, 1)),
    spec_eq((1, 2)),
    spec_eq((2, 2)),
    spec_eq((1, 3)),
    spec_eq((2, 3)),
    spec_eq((1, 1), (2, 1)),
    spec_eq((1, 1), (3, 1)),
    spec_eq((2, 1), (3, 1)),
    spec_eq((3, 2)),
]


@pytest.mark.parametrize("i", range(4))
@pytest.mark.parametrize("spec", FINITE_SPECS, ids=lambda s: s.notation())
def test_eval_exact_agrees_with_brute_force(i, spec):
    phi = exact_size_sentence(i)
    want = TRUE if brute_truth(phi, spec) else FALSE
    assert eval_exact(phi, spec) == want


def _has_exact_size(spec, size):
    return any(s == size for s, _ in spec.classes)


CATALOG_SIZES_LE_4 = FINITE_SPECS + [
    spec_eq((W, 1)),
    spec_eq((W, 2)),
    spec_eq((W, 1), (2, 1)),
    spec_eq((W, 1), (4, 1)),
    spec_eq((W, W), (1, W)),
    spec_eq((W, W), (2, W)),
    spec_eq((W, W), (3, W)),
    spec_eq((W, W), (4, W)),
    spec_eq((4, W)),
]


@pytest.mark.parametrize("i", range(4))
def test_size_sentence_characterization(i):
    # true exactly on specs carrying a class of size i+1 (census shortcut)
    phi = exact_size_sentence(i)
    for spec in CATALOG_SIZES_LE_4:
        want = TRUE if _has_exact_size(spec, i + 1) else FALSE
        assert eval_exact(phi, spec) == want, spec.notation()


def test_paper_style_distinguishing_row():
    for i in range(4):
        phi = exact_size_sentence(i)
        assert eval_exact(phi, spec_eq((W, W), (i + 1, W)), level=i + 2) == TRUE
        for m in range(4):
            if m != i:
                assert eval_exact(phi, spec_eq((W, W), (m + 1, W))) == FALSE
    assert eval_exact(exact_size_sentence(0), spec_eq((1, 1))) == TRUE


def test_sentence_zero_shape():
    phi = exact_size_sentence(0)
    (d,) = phi.disjuncts
    assert d.xvars == ("x0",)
    assert d.guard == (atom("=", "x0", "x0"),)
    (blk,) = d.blocks
    assert blk.yvars == ("y",)
    assert blk.atoms == (atom("~", "y", "x0"), atom("!=", "y", "x0"))


def test_eval_at_stage_examples():
    phi = exact_size_sentence(0)
    # {0=0, 0~0}: witness 0 present, nothing refutes it
    v = eval_at_stage(phi, {0, 3})
    assert v.satisfied and v.witness == (0,)
    # complete two-element class: both candidates refuted
    v2 = eval_at_stage(phi, realize_eq_spec(spec_eq((2, 1)), 2))
    assert not v2.satisfied
    assert not eval_at_stage(phi, frozenset()).satisfied


def test_eval_at_stage_witness_persists():
    phi = exact_size_sentence(0)
    d = {0, 3}
    v = eval_at_stage(phi, d)
    assert v.witness == (0,)
    # growth that adds no block instance for the witness keeps it qualifying
    from poslearn.coding import encode_fact

    bigger = set(d) | {encode_fact("=", 9, 9)}
    v2 = eval_at_stage(phi, bigger)
    assert v2.satisfied and v2.witness == (0,)


def test_classify_level_examples():
    assert classify_level(FAtom(atom("~", "x", "y"))) == (0, "Sigma")
    blk = FForall(("y",), FOr((FNot(FAtom(atom("~", "y", "x"))), FNot(FAtom(atom("!=", "y", "x"))))))
    assert classify_level(blk) == (1, "Pi")
    for i in range(3):
        assert classify_level(exact_size_sentence(i).to_tree()) == (2, "Sigma")


def test_classify_rejects_negation_off_atoms():
    bad = FNot(FOr((FAtom(atom("~", "x", "y")),)))
    with pytest.raises(MalformedFormula):
        classify_level(bad)


def test_parse_format_roundtrip():
    phi = exact_size_sentence(1)
    text = format_formula(phi.to_tree())
    back = normal_from_tree(parse_formula(text))
    assert back == phi


def test_parse_unary_atom_and_errors():
    f = parse_formula("(atom P2 5)")
    assert f == FAtom(Atom("P2", (5, 5)))
    with pytest.raises(MalformedFormula):
        parse_formula("(zap x)")
    with pytest.raises(MalformedFormula):
        parse_formula("(atom = x y) (atom = x y)")


def test_normal_form_requires_presence_conjuncts():
    with pytest.raises(MalformedFormula):
        Sigma2pNormal((Disjunct(("x",), (atom("~", "x", "x"),), ()),))


def test_generated_blocks_inconclusive_then_true():
    unending = GeneratedBlocks(lambda j: Block((), (atom("!=", "x0", "x0"),)), count=None)
    phi = Sigma2pNormal((Disjunct(("x0",), (atom("=", "x0", "x0"),), unending),))
    assert eval_exact(phi, spec_eq((2, 1)), block_bound=4) == INCONCLUSIVE
    finite = GeneratedBlocks(lambda j: Block((), (atom("!=", "x0", "x0"),)), count=3)
    phi2 = Sigma2pNormal((Disjunct(("x0",), (atom("=", "x0", "x0"),), finite),))
    assert eval_exact(phi2, spec_eq((2, 1)), block_bound=4) == TRUE


def test_eval_exact_non_eq_spec_inconclusive():
    assert eval_exact(exact_size_sentence(0), StructureSpec.kst(1)) == INCONCLUSIVE


def test_closed_block_sentence():
    # "two inequivalent elements exist": true with two classes, false with one
    two_class = Sigma2pNormal((
        Disjunct(
            ("x", "y"),
            (atom("=", "x", "x"), atom("=", "y", "y"), atom("!=", "x", "y")),
            (Block((), (atom("~", "x", "y"),)),),
        ),
    ))
    assert eval_exact(two_class, spec_eq((W, 2))) == TRUE
    assert eval_exact(two_class, spec_eq((W, 1))) == FALSE
    assert eval_exact(two_class, spec_eq((2, 2))) == TRUE

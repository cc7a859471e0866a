import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modalred.corpus import qbf_corpus
from modalred.formula import FALSUM, TOP, And, Or, Box, Diamond, FormulaSyntaxError, Implies, Not, Var, box_upto, parse, size, variables
from modalred.kripke import FrameClass, is_in_class, model_check
from modalred.qbf import (
    Qbf,
    QbfError,
    eval_prop,
    eval_qbf,
    eval_qbf_table,
    ladner_translate,
    negated_translate,
    parse_qbf,
    quantifier_tree,
    to_text,
    tree_nodes,
    witness_model,
)

p1, p2, p3 = Var(1), Var(2), Var(3)


def test_parse_examples():
    theta = parse_qbf("E p1 . p1")
    assert theta == Qbf((("E", 1),), p1)
    theta = parse_qbf("A p1 E p2 . (p1 -> p2) & (p2 -> p1)")
    assert theta.prefix == (("A", 1), ("E", 2))
    assert parse_qbf(to_text(theta)) == theta


@pytest.mark.parametrize(
    "text, error",
    [
        ("E p2 . p2", QbfError),
        ("E p1 . p2", QbfError),
        ("E p1 . []p1", QbfError),
        (". p1", QbfError),
        ("E p1 p1", FormulaSyntaxError),
        ("E . p1", FormulaSyntaxError),
        ("X p1 . p1", FormulaSyntaxError),
        ("E p1 . p1 &", FormulaSyntaxError),
    ],
)
def test_parse_errors(text, error):
    with pytest.raises(error):
        parse_qbf(text)


@pytest.mark.parametrize(
    "text, value",
    [
        ("E p1 . p1", True),
        ("A p1 . p1", False),
        ("A p1 E p2 . (p1 -> p2) & (p2 -> p1)", True),
        ("E p1 A p2 . (p1 -> p2) & (p2 -> p1)", False),
        ("E p1 . true", True),
    ],
)
def test_eval(text, value):
    assert eval_qbf(parse_qbf(text)) is value


def propositional(nvars):
    atoms = st.one_of(st.integers(1, nvars).map(Var), st.just(FALSUM), st.just(TOP))

    def extend(children):
        pair = st.tuples(children, children)
        return st.one_of(children.map(Not), pair.map(lambda ab: Implies(*ab)), pair.map(And), pair.map(Or))

    return st.recursive(atoms, extend, max_leaves=10)


@st.composite
def qbfs(draw, max_m=3):
    m = draw(st.integers(1, max_m))
    matrix = draw(propositional(m))
    prefix = tuple((draw(st.sampled_from("EA")), i) for i in range(1, m + 1))
    return Qbf(prefix, matrix)


@given(qbfs())
@settings(max_examples=300, deadline=None)
def test_eval_matches_table(theta):
    assert eval_qbf(theta) == eval_qbf_table(theta)


def test_translation_structure_single_exists():
    q0, q1 = p2, p3
    expected = And(
        (
            q0,
            box_upto(1, And((Implies(q0, Not(q1)), Implies(q1, Not(q0))))),
            Implies(q0, Diamond(q1)),
            TOP,
            TOP,
            Box(Implies(q1, p1)),
        )
    )
    assert ladner_translate(parse_qbf("E p1 . p1")) == expected
    assert negated_translate(parse_qbf("E p1 . p1")) == Not(expected)


def test_translation_empty_ranges():
    f = ladner_translate(parse_qbf("A p1 . p1"))
    assert f.args[2] == TOP  # no existential level
    assert f.args[4] == TOP  # m = 1
    assert f.args[3] != TOP


@pytest.mark.parametrize("m", range(1, 9))
def test_translation_size_and_vars(m):
    prefix = " ".join(f"{'AE'[i % 2]} p{i}" for i in range(1, m + 1))
    matrix = " | ".join(f"p{i}" for i in range(1, m + 1))
    theta = parse_qbf(f"{prefix} . {matrix}")
    f = ladner_translate(theta)
    assert size(f) <= 40 * m**3 * size(theta.matrix)
    assert variables(f) == set(range(1, 2 * m + 2))
    assert variables(negated_translate(theta)) == set(range(1, 2 * m + 2))


def test_quantifier_tree_examples():
    root = quantifier_tree(parse_qbf("E p1 . p1"))
    assert [n.assignment for n in root.children] == [(True,)]
    root = quantifier_tree(parse_qbf("E p1 . true"))
    assert [n.assignment for n in root.children] == [(False,)]
    root = quantifier_tree(parse_qbf("A p1 E p2 . (p1 -> p2) & (p2 -> p1)"))
    assert [n.assignment for n in root.children] == [(False,), (True,)]
    assert [c.children[0].assignment for c in root.children] == [(False, False), (True, True)]
    with pytest.raises(QbfError):
        quantifier_tree(parse_qbf("A p1 . p1"))


@pytest.mark.parametrize("theta", [t for t in qbf_corpus() if eval_qbf(t)], ids=str)
def test_quantifier_tree_invariants(theta):
    nodes = tree_nodes(quantifier_tree(theta))
    for node in nodes:
        assert len(node.assignment) == node.level
        if node.level == theta.m:
            assert not node.children
            assert eval_prop(theta.matrix, dict(enumerate(node.assignment, start=1)))
        else:
            expected = 1 if theta.quantifier(node.level + 1) == "E" else 2
            assert len(node.children) == expected


def test_witness_model_example():
    theta = parse_qbf("E p1 . p1")
    model, root = witness_model(theta)
    assert model.world_count == 2 and root == 0
    assert is_in_class(model.frame, FrameClass.KTB)
    assert model_check(model, root, ladner_translate(theta))


def test_corpus_shape():
    corpus = qbf_corpus()
    assert len(corpus) >= 50
    texts = {to_text(t) for t in corpus}
    for needed in ("E p1 . p1", "A p1 . p1", "A p1 E p2 . (p1 -> p2) & (p2 -> p1)", "E p1 A p2 . (p1 -> p2) & (p2 -> p1)"):
        assert to_text(parse_qbf(needed)) in texts
    assert {eval_qbf(t) for t in corpus} == {True, False}


@given(qbfs(max_m=3))
@settings(max_examples=60, deadline=None)
def test_witness_model_satisfies_translation(theta):
    if eval_qbf(theta):
        model, root = witness_model(theta)
        assert is_in_class(model.frame, FrameClass.KTB)
        assert model_check(model, root, ladner_translate(theta))

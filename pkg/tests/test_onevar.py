import pytest
from hypothesis import given, settings

from modalred import onevar
from modalred.corpus import random_corpus
from modalred.decide import Sat, sat_bruteforce
from modalred.formula import (
    FALSUM,
    TOP,
    And,
    Box,
    Diamond,
    Implies,
    Not,
    Var,
    box_plus,
    diamond_pow,
    parse,
    size,
    substitute,
    variables,
)
from modalred.kripke import Frame, FrameClass, Model, is_in_class, model_check

from conftest import formulas

p1, p2 = Var(1), Var(2)
Ctx = onevar.EmbeddingContext


def test_relativize_examples():
    assert onevar.relativize(Box(p1), Ctx(1)) == Box(Implies(p2, p1))
    assert onevar.relativize(Implies(p1, FALSUM), Ctx(1)) == Implies(p1, FALSUM)
    assert onevar.relativize(Box(Box(p1)), Ctx(1)) == Box(Implies(p2, Box(Implies(p2, p1))))
    with pytest.raises(ValueError):
        onevar.relativize(p2, Ctx(1))


def test_hat_examples():
    assert onevar.hat(Box(p1)) == And((p2, Box(Implies(p2, p1))))
    assert onevar.hat(FALSUM) == And((p1, FALSUM))


def test_formula_family_examples():
    eps1 = And((And((Not(p1), Box(Not(p1)))), Diamond(Diamond(p1))))
    assert onevar.epsilon(0) == And((Not(p1), Diamond(p1)))
    assert onevar.epsilon(1) == eps1
    assert onevar.delta() == And((p1, Box(p1)))
    assert onevar.delta_i_k(1, 1) == And((eps1, diamond_pow(3, box_plus(p1))))
    assert onevar.beta(1) == And((Not(p1), Diamond(And((p1, diamond_pow(2, onevar.delta_i_k(1, 1)))))))
    for bad in [(0, 1), (2, 1)]:
        with pytest.raises(ValueError):
            onevar.delta_i_k(*bad)
    with pytest.raises(ValueError):
        onevar.epsilon(-1)


def test_star_examples():
    assert variables(onevar.star(Box(p1))) == {1}
    assert onevar.star(p1) == And((onevar.beta(2), onevar.beta(1)))


def test_embed_examples():
    e = onevar.embed(TOP)
    assert isinstance(e, Not) and e.body.args[0] == onevar.beta(1)
    # both sides are refuted everywhere, so e(true) holds on any model
    m = onevar.build_chain(1).model
    assert all(model_check(m, w, e) for w in m.frame.worlds)
    assert all(not model_check(m, w, onevar.star(FALSUM)) for w in m.frame.worlds)


@given(formulas(nvars=3, max_leaves=8))
@settings(max_examples=100, deadline=None)
def test_single_variable_outputs(phi):
    assert variables(onevar.star(phi)) <= {1}
    assert variables(onevar.embed(phi)) <= {1}
    assert size(onevar.embed(phi)) == size(onevar.star(Not(phi))) + 1
    ctx = Ctx.of(phi)
    assert onevar.star(phi) == substitute(onevar.hat(phi, ctx), onevar.sigma(ctx))


def test_chain_examples():
    c1 = onevar.build_chain(1)
    assert c1.model.world_count == 7
    assert c1.model.holds(1) == {0, 4, 5, 6}
    assert c1.c_world(1) == 2
    c2 = onevar.build_chain(2)
    assert c2.model.world_count == 13 and c2.c_world(2) == 7
    for k in range(1, 11):
        chain = onevar.build_chain(k)
        assert chain.model.world_count == k * k + 3 * k + 3
        assert is_in_class(chain.model.frame, FrameClass.KTB)
    with pytest.raises(ValueError):
        onevar.build_chain(0)
    with pytest.raises(ValueError):
        c1.c_world(2)


@pytest.mark.parametrize("k", range(1, 6))
def test_epsilon_pins_c_worlds(k):
    chain = onevar.build_chain(k)
    for i in range(1, k + 1):
        hits = [x for x in onevar.chain_segment(chain, i) if model_check(chain.model, x, onevar.epsilon(i))]
        assert hits == [chain.c_world(i)]


def test_attach_example(one_reflexive_world):
    attached = onevar.attach(one_reflexive_world, Ctx(1), FrameClass.KTB)
    assert attached.world_count == 1 + 7 + 13
    r1, r2 = onevar.chain_roots(1, Ctx(1))
    assert (r1, r2) == (1, 8)
    assert {(0, r1), (r1, 0), (0, r2), (r2, 0)} <= attached.frame.relation
    assert 0 not in attached.holds(1) and set(attached.valuation) == {1}
    assert is_in_class(attached.frame, FrameClass.KTB)
    assert model_check(attached, 0, onevar.star(p1))


def test_attach_preconditions(one_reflexive_world):
    with pytest.raises(ValueError):
        onevar.attach(one_reflexive_world, Ctx(2), FrameClass.KTB)  # p3 missing
    with pytest.raises(ValueError):
        onevar.attach(one_reflexive_world, Ctx(1), FrameClass.T)
    not_reflexive = Model(Frame(1, frozenset()), {1: {0}, 2: {0}})
    with pytest.raises(ValueError):
        onevar.attach(not_reflexive, Ctx(1), FrameClass.KTB)
    with pytest.raises(ValueError):
        onevar.star_witness(one_reflexive_world, 0, Not(p1), FrameClass.KTB)


def test_star_witness_examples(one_reflexive_world):
    attached, w0 = onevar.star_witness(Model(one_reflexive_world.frame, {1: {0}}), 0, p1, FrameClass.KTB)
    assert model_check(attached, w0, onevar.star(p1))

    two = Model(Frame(2, frozenset({(0, 1)})), {1: {1}})
    phi = Diamond(p1)
    attached, w0 = onevar.star_witness(two, 0, phi, FrameClass.K)
    assert model_check(attached, w0, onevar.star(phi))

    single = Model(Frame(1, frozenset()), {})
    attached, w0 = onevar.star_witness(single, 0, TOP, FrameClass.K)
    assert attached.world_count == 1 + 7
    assert model_check(attached, w0, onevar.star(TOP))
    assert model_check(attached, w0, onevar.beta(1))


def _witnesses(count=40):
    for c in onevar.EMBEDDING_CLASSES:
        for phi in random_corpus(count=count, seed=3):
            res = sat_bruteforce(phi, c, 2)
            if isinstance(res, Sat):
                yield c, phi, res


def test_epsilon_on_attached_chains():
    checked = 0
    for c, phi, res in _witnesses():
        attached, _ = onevar.star_witness(res.model, res.world, phi, c)
        ctx = Ctx.of(phi)
        for k, r in enumerate(onevar.chain_roots(res.model.world_count, ctx), start=1):
            for i in range(1, k + 1):
                target = r + onevar.build_chain(k).c_world(i)
                hits = [x for x in range(r, target + 1) if model_check(attached, x, onevar.epsilon(i))]
                assert hits == [target]
                checked += 1
    assert checked > 0


def test_diamond_alpha_marks_linked_worlds():
    for c, phi, res in _witnesses():
        attached, _ = onevar.star_witness(res.model, res.world, phi, c)
        n = res.model.world_count
        roots = onevar.chain_roots(n, Ctx.of(phi))
        for k, r in enumerate(roots, start=1):
            linked = {x for x in range(n) if (x, r) in attached.frame.relation}
            assert onevar.diamond_alpha_worlds(attached, n, k) == linked


def test_substitution_with_top_is_faithful_on_example():
    phi = parse("[]<>p1 -> <>p2")
    unguarded = substitute(onevar.hat(phi), {3: TOP})
    m = Model(Frame(3, frozenset({(0, 1), (1, 2), (2, 2)})), {1: {2}, 2: {1}})
    for w in range(3):
        assert model_check(m, w, unguarded) == model_check(m, w, phi)

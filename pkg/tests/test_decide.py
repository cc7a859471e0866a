import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modalred.corpus import random_corpus
from modalred.decide import (
    Budget,
    Inconclusive,
    Sat,
    Unsat,
    completeness_bound,
    filtration_bound,
    sat_bruteforce,
    sat_decide,
    sat_tableau,
    sat_types,
    valid,
)
from modalred.formula import FALSUM, TOP, Not, parse
from modalred.kripke import FrameClass, is_in_class, model_check

from conftest import formulas

K, KD, T, KB, KDB, KTB = (FrameClass[n] for n in ("K", "KD", "T", "KB", "KDB", "KTB"))

# c1 below c2 means every c2-frame is a c1-frame
WEAKER = [(K, KD), (KD, T), (KD, KDB), (K, KB), (KB, KDB), (KDB, KTB), (T, KTB)]


def test_bruteforce_examples():
    phi = parse("p1 & []~p1")
    assert filtration_bound(phi) == 16
    assert sat_bruteforce(phi, T, 16) == Unsat("bound-exhausted-complete")
    assert isinstance(sat_bruteforce(phi, T, 2), Unsat)

    res = sat_bruteforce(parse("p1 & <>[]~p1"), K, 2)
    assert isinstance(res, Sat)
    assert res.model.world_count == 2 and res.world == 0
    assert res.model.frame.relation == {(0, 1)} and res.model.holds(1) == {0}

    res = sat_bruteforce(TOP, K, 1)
    assert isinstance(res, Sat) and res.model.world_count == 1 and not res.model.frame.relation


def test_bruteforce_inconclusive_below_bound():
    phi = parse("<>p1 & <>~p1 & [](<>p2 & <>~p2)")
    res = sat_bruteforce(phi, K, 1)
    assert res == Inconclusive(1, completeness_bound(phi, K))
    with pytest.raises(ValueError):
        sat_bruteforce(phi, K, 0)


@pytest.mark.parametrize(
    "text, c, sat",
    [
        ("[]false & <>true", K, False),
        ("p1 & <>[]~p1", KB, False),
        ("p1 & <>[]~p1", K, True),
        ("[]false", KD, False),
        ("[]false", KB, True),
        ("p1 & []~p1", T, False),
        ("<>p1 & []<>~p1", KTB, True),
        ("p1 & []<>[]~p1", KB, True),
        ("p1 & <>[]~p1", KTB, False),
    ],
)
def test_decide_examples(text, c, sat):
    res = sat_decide(parse(text), c)
    assert isinstance(res, Sat) is sat
    assert isinstance(res, (Sat, Unsat))


@pytest.mark.parametrize("c", list(FrameClass))
def test_falsum_unsat_everywhere(c):
    assert isinstance(sat_decide(FALSUM, c), Unsat)


@pytest.mark.parametrize(
    "text, c, status",
    [("[](p1 -> p1)", K, "valid"), ("p1 -> []<>p1", KB, "valid"), ("p1 -> []p1", K, "invalid"), ("[]p1 -> p1", T, "valid")],
)
def test_valid_examples(text, c, status):
    res = valid(parse(text), c)
    assert res.status == status
    if status == "invalid":
        assert res.countermodel.world_count == 2
        assert not model_check(res.countermodel, res.world, parse(text))


@given(formulas(max_leaves=8), st.sampled_from(list(FrameClass)))
@settings(max_examples=300, deadline=None)
def test_witness_soundness(phi, c):
    res = sat_decide(phi, c)
    if isinstance(res, Sat):
        assert is_in_class(res.model.frame, c)
        assert model_check(res.model, res.world, phi)


@given(formulas(max_leaves=8), st.sampled_from(list(FrameClass)))
@settings(max_examples=300, deadline=None)
def test_valid_is_dual_of_sat(phi, c):
    v = valid(phi, c)
    s = sat_decide(Not(phi), c)
    assert (v.status == "valid") == isinstance(s, Unsat)
    assert (v.status == "invalid") == isinstance(s, Sat)


def test_class_monotonicity_on_corpus():
    for phi in random_corpus(seed=1):
        sat = {c: isinstance(sat_decide(phi, c), Sat) for c in FrameClass}
        for weak, strong in WEAKER:
            if sat[strong]:
                assert sat[weak], (str(phi), weak, strong)


@given(formulas(max_leaves=8), st.sampled_from([K, KD, T]))
@settings(max_examples=300, deadline=None)
def test_type_elimination_agrees_with_tableau(phi, c):
    a = sat_tableau(phi, c)
    b = sat_types(phi, c)
    if isinstance(a, (Sat, Unsat)) and isinstance(b, (Sat, Unsat)):
        assert isinstance(a, Sat) == isinstance(b, Sat)


@given(formulas(max_leaves=6), st.sampled_from(list(FrameClass)))
@settings(max_examples=150, deadline=None)
def test_small_bruteforce_agrees(phi, c):
    b = sat_bruteforce(phi, c, min(completeness_bound(phi, c), 2))
    d = sat_decide(phi, c)
    if isinstance(b, Sat):
        assert isinstance(d, Sat)
    if isinstance(b, Unsat):
        assert isinstance(d, Unsat)


def test_budget_exhaustion_is_inconclusive():
    phi = parse("<>p1 & <>~p1 & [](<>p2 & <>~p2) & [][](<>p3 & <>~p3)")
    assert isinstance(sat_tableau(phi, K, Budget(max_nodes=2)), Inconclusive)
    assert isinstance(sat_types(phi, KB, Budget(max_worlds=4)), Inconclusive)
    with pytest.raises(ValueError):
        Budget(seconds=0)


def test_deterministic_witness():
    phi = parse("<>p1 & <>~p1 & []<>p2")
    for c in FrameClass:
        assert sat_decide(phi, c) == sat_decide(phi, c)
        assert sat_bruteforce(phi, c, 3) == sat_bruteforce(phi, c, 3)

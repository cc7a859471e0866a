import pytest
from hypothesis import strategies as st

from modalred.formula import FALSUM, TOP, And, Box, Diamond, Implies, Not, Or, Var
from modalred.kripke import Frame, Model


def formulas(nvars: int = 2, max_leaves: int = 12):
    atoms = st.one_of(st.integers(1, nvars).map(Var), st.just(FALSUM), st.just(TOP))

    def extend(children):
        pair = st.tuples(children, children)
        return st.one_of(
            children.map(Not),
            children.map(Box),
            children.map(Diamond),
            pair.map(lambda ab: Implies(*ab)),
            pair.map(lambda ab: And(ab)),
            pair.map(lambda ab: Or(ab)),
        )

    return st.recursive(atoms, extend, max_leaves=max_leaves)


@st.composite
def models(draw, max_worlds: int = 4, nvars: int = 2):
    n = draw(st.integers(1, max_worlds))
    pairs = [(a, b) for a in range(n) for b in range(n)]
    rel = draw(st.sets(st.sampled_from(pairs)))
    val = {v: draw(st.sets(st.integers(0, n - 1))) for v in range(1, nvars + 1)}
    return Model(Frame(n, frozenset(rel)), val)


@pytest.fixture
def one_reflexive_world():
    return Model(Frame(1, frozenset({(0, 0)})), {1: {0}, 2: {0}})

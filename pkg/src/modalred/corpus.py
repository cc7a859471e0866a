"""Seeded and exhaustive formula corpora for the verification suites."""

from __future__ import annotations

import random
from functools import lru_cache

from .formula import FALSUM, And, Box, Diamond, Formula, Implies, Not, Or, Var, iff, parse
from .qbf import Qbf, parse_qbf

QBF_MATRICES_1 = ["p1", "~p1", "p1 | ~p1", "p1 & ~p1", "p1 -> p1"]
QBF_MATRICES_2 = [
    "(p1 -> p2) & (p2 -> p1)",
    "~((p1 -> p2) & (p2 -> p1))",
    "p1 & p2",
    "p1 | p2",
    "p1 -> p2",
    "p2 -> p1",
    "~p1 & p2",
    "p1 & ~p2",
    "~p1 | ~p2",
    "p2",
    "~p2",
    "p1 & (p2 | ~p2)",
]


def qbf_corpus(max_m: int = 2) -> list[Qbf]:
    """Every prefix with m <= max_m (m in {1, 2}) over a fixed matrix template set."""
    out = []
    for q in "EA":
        out.extend(parse_qbf(f"{q} p1 . {mat}") for mat in QBF_MATRICES_1)
    if max_m >= 2:
        for q1 in "EA":
            for q2 in "EA":
                out.extend(parse_qbf(f"{q1} p1 {q2} p2 . {mat}") for mat in QBF_MATRICES_2)
    return out


def random_formula(rng: random.Random, size: int, nvars: int = 2) -> Formula:
    """A uniformly shaped random term with exactly ``size`` nodes."""
    if size <= 1:
        pick = rng.randrange(nvars + 2)
        if pick < nvars:
            return Var(pick + 1)
        return FALSUM if pick == nvars else And(())
    if size == 2 or rng.random() < 0.45:
        op = rng.choice((Not, Box, Diamond))
        return op(random_formula(rng, size - 1, nvars))
    left = rng.randint(1, size - 2)
    a = random_formula(rng, left, nvars)
    b = random_formula(rng, size - 1 - left, nvars)
    kind = rng.randrange(3)
    if kind == 0:
        return Implies(a, b)
    return And((a, b)) if kind == 1 else Or((a, b))


def random_corpus(count: int = 200, max_size: int = 8, nvars: int = 2, seed: int = 0) -> list[Formula]:
    rng = random.Random(seed)
    return [random_formula(rng, rng.randint(1, max_size), nvars) for _ in range(count)]


@lru_cache(maxsize=None)
def _by_size(size: int, nvars: int) -> tuple[Formula, ...]:
    if size == 1:
        return tuple(Var(i) for i in range(1, nvars + 1)) + (FALSUM,)
    out: list[Formula] = []
    for sub in _by_size(size - 1, nvars):
        out.extend((Not(sub), Box(sub), Diamond(sub)))
    for left in range(1, size - 1):
        for a in _by_size(left, nvars):
            for b in _by_size(size - 1 - left, nvars):
                out.append(Implies(a, b))
                out.append(And((a, b)))
    return tuple(out)


def all_formulas(max_size: int, nvars: int = 2) -> list[Formula]:
    """Every term up to ``max_size`` nodes over p1..p_nvars, false, ~, [], <>, ->, &."""
    return [f for s in range(1, max_size + 1) for f in _by_size(s, nvars)]


SPOT_FORMULAS = [parse(t) for t in ("p1 & <>[]~p1", "[]false & <>true", "p1 -> []<>p1", "<>p1 & []~p1")]

__all__ = ["all_formulas", "iff", "qbf_corpus", "random_corpus", "random_formula", "SPOT_FORMULAS"]

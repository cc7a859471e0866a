"""Embedding of K, KB and KTB into their single-variable fragments.

A formula over p_1..p_n is first relativised to a fresh variable p_{n+1}
(``hat``), then every p_i is replaced by ``beta(i)``, a formula over the
single variable p_1 that picks out the worlds adjacent to the root of the
chain model ``build_chain(i)``.  ``attach`` glues those chains onto a model
of the original formula, giving a model of the single-variable image.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .formula import (
    And,
    Box,
    Falsum,
    Formula,
    Implies,
    Not,
    Var,
    box_plus,
    box_upto,
    diamond_pow,
    max_var,
    substitute,
    to_core,
    variables,
)
from .kripke import (
    Frame,
    FrameClass,
    Model,
    disjoint_union,
    is_in_class,
    model_check,
    reflexive_closure,
    symmetric_closure,
    truth_sets,
)

P = Var(1)
EMBEDDING_CLASSES = (FrameClass.K, FrameClass.KB, FrameClass.KTB)


@dataclass(frozen=True)
class EmbeddingContext:
    n: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("n must be non-negative")

    @property
    def fresh(self) -> int:
        return self.n + 1

    @classmethod
    def of(cls, phi: Formula) -> "EmbeddingContext":
        return cls(max_var(phi))


def _check_ctx(phi: Formula, ctx: EmbeddingContext) -> None:
    too_big = [v for v in variables(phi) if v > ctx.n]
    if too_big:
        raise ValueError(f"p{min(too_big)} collides with the fresh variable range (n = {ctx.n})")


# --- relativisation ---------------------------------------------------------------


def relativize(phi: Formula, ctx: EmbeddingContext | None = None) -> Formula:
    """Guard every box with the fresh variable: ``([]a)' = [](p_{n+1} -> a')``."""
    ctx = ctx or EmbeddingContext.of(phi)
    _check_ctx(phi, ctx)
    guard = Var(ctx.fresh)
    memo: dict[int, Formula] = {}

    def go(f: Formula) -> Formula:
        key = id(f)
        if key in memo:
            return memo[key]
        if isinstance(f, (Var, Falsum)):
            out = f
        elif isinstance(f, Implies):
            out = Implies(go(f.left), go(f.right))
        elif isinstance(f, Box):
            out = Box(Implies(guard, go(f.body)))
        else:
            raise TypeError(f"unexpected node after core expansion: {f!r}")
        memo[key] = out
        return out

    return go(to_core(phi))


def hat(phi: Formula, ctx: EmbeddingContext | None = None) -> Formula:
    ctx = ctx or EmbeddingContext.of(phi)
    return And((Var(ctx.fresh), relativize(phi, ctx)))


# --- the single-variable formula family ------------------------------------------


@lru_cache(maxsize=None)
def epsilon(i: int) -> Formula:
    """Holds, along a chain, exactly at the middle of the i-th run of non-p worlds."""
    if i < 0:
        raise ValueError("i must be non-negative")
    return And((box_upto(i, Not(P)), diamond_pow(i + 1, P)))


@lru_cache(maxsize=None)
def delta() -> Formula:
    return box_plus(P)


@lru_cache(maxsize=None)
def delta_i_k(i: int, k: int) -> Formula:
    if not 1 <= i <= k:
        raise ValueError(f"need 1 <= i <= k, got i={i}, k={k}")
    if i == k:
        return And((epsilon(k), diamond_pow(k + 2, delta())))
    return And((epsilon(i), diamond_pow(2 * i + 3, delta_i_k(i + 1, k))))


@lru_cache(maxsize=None)
def alpha(k: int) -> Formula:
    if k < 1:
        raise ValueError("k must be at least 1")
    return And((P, diamond_pow(2, delta_i_k(1, k))))


@lru_cache(maxsize=None)
def beta(k: int) -> Formula:
    if k < 1:
        raise ValueError("k must be at least 1")
    return And((Not(P), diamond_pow(1, alpha(k))))


def sigma(ctx: EmbeddingContext) -> dict[int, Formula]:
    return {i: beta(i) for i in range(1, ctx.n + 2)}


def star(phi: Formula, ctx: EmbeddingContext | None = None) -> Formula:
    ctx = ctx or EmbeddingContext.of(phi)
    return substitute(hat(phi, ctx), sigma(ctx))


def embed(phi: Formula) -> Formula:
    """Validity-preserving translation into the single-variable fragment."""
    return Not(star(Not(phi)))


# --- chain models -------------------------------------------------------------------


@dataclass(frozen=True)
class ChainModel:
    model: Model
    k: int
    root: int
    c_worlds: tuple[int, ...]  # c_worlds[i-1] is c_i^k

    def c_world(self, i: int) -> int:
        if not 1 <= i <= self.k:
            raise ValueError(f"need 1 <= i <= {self.k}")
        return self.c_worlds[i - 1]


def chain_pattern(k: int) -> list[bool]:
    """p / not-p labels along the chain, root first."""
    if k < 1:
        raise ValueError("k must be at least 1")
    labels = [True]
    for i in range(1, k + 1):
        if i > 1:
            labels.append(True)
        labels.extend([False] * (2 * i + 1))
    labels.extend([True] * 3)
    return labels


@lru_cache(maxsize=None)
def build_chain(k: int) -> ChainModel:
    labels = chain_pattern(k)
    n = len(labels)
    line = Frame(n, frozenset((w, w + 1) for w in range(n - 1)))
    frame = reflexive_closure(symmetric_closure(line))
    model = Model(frame, {1: {w for w, lab in enumerate(labels) if lab}})
    centres = tuple(i * i + 2 * i - 1 for i in range(1, k + 1))
    return ChainModel(model, k, 0, centres)


def chain_segment(chain: ChainModel, i: int) -> range:
    """Worlds from the root up to and including c_i."""
    return range(chain.root, chain.c_world(i) + 1)


# --- attaching chains ---------------------------------------------------------------


def chain_roots(original_worlds: int, ctx: EmbeddingContext) -> tuple[int, ...]:
    """World ids of r_1..r_{n+1} in a model produced by :func:`attach`."""
    roots = []
    offset = original_worlds
    for k in range(1, ctx.n + 2):
        roots.append(offset)
        offset += k * k + 3 * k + 3
    return tuple(roots)


def attach(model: Model, ctx: EmbeddingContext, c: FrameClass = FrameClass.K) -> Model:
    """Glue M_1..M_{n+1} onto ``model``: x <-> r_m exactly where p_m holds at x."""
    if c not in EMBEDDING_CLASSES:
        raise ValueError(f"attachment is only defined for {', '.join(k.value for k in EMBEDDING_CLASSES)}")
    if not is_in_class(model.frame, c):
        raise ValueError(f"the input frame is not in class {c.value}")
    everywhere = frozenset(model.frame.worlds)
    if model.holds(ctx.fresh) != everywhere:
        raise ValueError(f"p{ctx.fresh} must hold at every world of the input model")
    chains = [build_chain(k).model for k in range(1, ctx.n + 2)]
    bare = Model(model.frame, {})
    union, offsets = disjoint_union([bare, *chains])
    rel = set(union.frame.relation)
    for m in range(1, ctx.n + 2):
        r = offsets[m]
        for x in sorted(model.holds(m)):
            rel.add((x, r))
            rel.add((r, x))
    glued = Model(Frame(union.world_count, frozenset(rel)), {1: union.holds(1)})
    if not is_in_class(glued.frame, c):
        raise AssertionError("attachment left the frame class")
    return glued


def star_witness(model: Model, w0: int, phi: Formula, c: FrameClass = FrameClass.K) -> tuple[Model, int]:
    """Turn a model of ``phi`` at ``w0`` into a model of ``star(phi)`` at ``w0``."""
    if not model_check(model, w0, phi):
        raise ValueError("the model does not satisfy the formula at the given world")
    ctx = EmbeddingContext.of(phi)
    val = dict(model.valuation)
    val[ctx.fresh] = frozenset(model.frame.worlds)
    return attach(Model(model.frame, val), ctx, c), w0


def diamond_alpha_worlds(attached: Model, original_worlds: int, k: int) -> frozenset[int]:
    """Original worlds of an attached model where ``<>alpha(k)`` holds."""
    row = truth_sets(attached, [diamond_pow(1, alpha(k))])[0]
    return frozenset(x for x in range(original_worlds) if row[x])

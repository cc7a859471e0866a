"""Prenex QBFs, their evaluation, and the reduction of TQBF to modal satisfiability.

``ladner_translate(theta)`` is a modal formula that is KTB-satisfiable when
``theta`` is true and not even K-satisfiable when it is false.  The
auxiliary level markers q_0..q_m are realised as ``p_{m+1}..p_{2m+1}``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Literal, Mapping

from .formula import (
    And,
    Box,
    Diamond,
    Falsum,
    Formula,
    FormulaSyntaxError,
    Implies,
    Not,
    Or,
    Var,
    _Parser,
    box_pow,
    box_upto,
    conj,
    modal_depth,
    tokenize,
    variables,
)
from .kripke import Frame, Model, reflexive_closure, symmetric_closure

Quantifier = Literal["E", "A"]


class QbfError(ValueError):
    pass


@dataclass(frozen=True)
class Qbf:
    prefix: tuple[tuple[Quantifier, int], ...]
    matrix: Formula

    def __post_init__(self) -> None:
        if not self.prefix:
            raise QbfError("a QBF needs at least one quantifier")
        for pos, (q, v) in enumerate(self.prefix, start=1):
            if q not in ("E", "A"):
                raise QbfError(f"unknown quantifier {q!r}")
            if v != pos:
                raise QbfError(f"quantified variables must be p1..pm in order; position {pos} binds p{v}")
        if modal_depth(self.matrix) != 0:
            raise QbfError("the matrix must be propositional")
        extra = variables(self.matrix) - set(range(1, self.m + 1))
        if extra:
            raise QbfError(f"free variables in matrix: {sorted(extra)}")

    @property
    def m(self) -> int:
        return len(self.prefix)

    def quantifier(self, i: int) -> Quantifier:
        return self.prefix[i - 1][0]

    def q(self, i: int) -> Var:
        """The level marker q_i."""
        return Var(self.m + 1 + i)

    def __str__(self) -> str:
        return to_text(self)


def parse_qbf(text: str) -> Qbf:
    """Parse ``E p1 A p2 . <propositional formula>``."""
    toks = tokenize(text)
    prefix: list[tuple[Quantifier, int]] = []
    i = 0
    while True:
        kind, v, pos = toks[i]
        if kind == "op" and v == ".":
            i += 1
            break
        if kind == "end":
            raise FormulaSyntaxError("missing '.' after the quantifier prefix", text, pos)
        if kind != "quant":
            raise FormulaSyntaxError(f"expected quantifier E or A, got {v!r}", text, pos)
        kind2, v2, pos2 = toks[i + 1]
        if kind2 != "var":
            raise FormulaSyntaxError("expected a variable after the quantifier", text, pos2)
        prefix.append((v, int(v2[1:])))  # type: ignore[arg-type]
        i += 2
    parser = _Parser(text, toks, start=i)
    matrix = parser.parse_imp()
    if parser.peek()[0] != "end":
        raise parser.error(f"unexpected token {parser.peek()[1]!r}")
    return Qbf(tuple(prefix), matrix)


def to_text(theta: Qbf) -> str:
    from .formula import to_text as formula_text

    head = " ".join(f"{q} p{v}" for q, v in theta.prefix)
    return f"{head} . {formula_text(theta.matrix)}"


# --- evaluation --------------------------------------------------------------


def eval_prop(phi: Formula, assignment: Mapping[int, bool]) -> bool:
    if isinstance(phi, Var):
        return bool(assignment.get(phi.index, False))
    if isinstance(phi, Falsum):
        return False
    if isinstance(phi, Implies):
        return (not eval_prop(phi.left, assignment)) or eval_prop(phi.right, assignment)
    if isinstance(phi, Not):
        return not eval_prop(phi.body, assignment)
    if isinstance(phi, And):
        return all(eval_prop(a, assignment) for a in phi.args)
    if isinstance(phi, Or):
        return any(eval_prop(a, assignment) for a in phi.args)
    raise QbfError(f"modal operator in propositional context: {phi}")


def eval_qbf(theta: Qbf) -> bool:
    def go(i: int, assignment: dict[int, bool]) -> bool:
        if i > theta.m:
            return eval_prop(theta.matrix, assignment)
        branches = (go(i + 1, {**assignment, i: b}) for b in (False, True))
        return any(branches) if theta.quantifier(i) == "E" else all(branches)

    return go(1, {})


def eval_qbf_table(theta: Qbf) -> bool:
    """Evaluate by tabulating the matrix over all 2^m assignments, then folding the prefix."""
    m = theta.m
    values = [
        eval_prop(theta.matrix, {i + 1: bits[i] for i in range(m)})
        for bits in itertools.product((False, True), repeat=m)
    ]
    for i in range(m, 0, -1):
        op = any if theta.quantifier(i) == "E" else all
        values = [op(values[j : j + 2]) for j in range(0, len(values), 2)]
    return values[0]


# --- the translation -----------------------------------------------------------


def ladner_translate(theta: Qbf) -> Formula:
    m = theta.m
    q = theta.q
    p = Var
    parts: list[Formula] = [q(0)]

    # exactly one level marker holds
    exclusive = conj(
        *(Implies(q(i), conj(*(Not(q(j)) for j in range(m + 1) if j != i))) for i in range(m + 1))
    )
    parts.append(box_upto(m, exclusive))

    exists = [Implies(q(i - 1), Diamond(q(i))) for i in range(1, m + 1) if theta.quantifier(i) == "E"]
    parts.append(box_upto(m - 1, conj(*exists)) if exists else And(()))

    forall = [
        Implies(q(i - 1), And((Diamond(And((q(i), p(i)))), Diamond(And((q(i), Not(p(i))))))))
        for i in range(1, m + 1)
        if theta.quantifier(i) == "A"
    ]
    parts.append(box_upto(m - 1, conj(*forall)) if forall else And(()))

    # values chosen at level i are passed down to level i+1
    inherit = []
    for i in range(1, m):
        keep_true = [Implies(p(j), Box(Implies(q(i + 1), p(j)))) for j in range(1, i + 1)]
        keep_false = [Implies(Not(p(j)), Box(Implies(q(i + 1), Not(p(j))))) for j in range(1, i + 1)]
        inherit.append(Implies(q(i), And((conj(*keep_true), conj(*keep_false)))))
    parts.append(box_upto(m - 1, conj(*inherit)) if inherit else And(()))

    parts.append(box_pow(m, Implies(q(m), theta.matrix)))
    return And(tuple(parts))


def negated_translate(theta: Qbf) -> Formula:
    return Not(ladner_translate(theta))


# --- quantifier trees and the witness model ------------------------------------


@dataclass(eq=False)
class TreeNode:
    level: int
    assignment: tuple[bool, ...]  # values of p_1..p_level
    children: list["TreeNode"] = field(default_factory=list)


def quantifier_tree(theta: Qbf) -> TreeNode:
    """A tree of partial assignments witnessing the truth of ``theta``.

    Existential levels pick ``False`` when both values work.
    """
    if not eval_qbf(theta):
        raise QbfError("the QBF is false; no quantifier tree exists")

    def true_from(i: int, assignment: tuple[bool, ...]) -> bool:
        def go(k: int, a: tuple[bool, ...]) -> bool:
            if k > theta.m:
                return eval_prop(theta.matrix, dict(enumerate(a, start=1)))
            br = (go(k + 1, a + (b,)) for b in (False, True))
            return any(br) if theta.quantifier(k) == "E" else all(br)

        return go(i, assignment)

    def build(level: int, assignment: tuple[bool, ...]) -> TreeNode:
        node = TreeNode(level, assignment)
        if level == theta.m:
            return node
        i = level + 1
        if theta.quantifier(i) == "A":
            values: tuple[bool, ...] = (False, True)
        else:
            values = (False,) if true_from(i + 1, assignment + (False,)) else (True,)
        node.children = [build(i, assignment + (b,)) for b in values]
        return node

    return build(0, ())


def tree_nodes(root: TreeNode) -> list[TreeNode]:
    """Nodes in pre-order (the world numbering of :func:`witness_model`)."""
    out: list[TreeNode] = []
    stack = [root]
    while stack:
        node = stack.pop()
        out.append(node)
        stack.extend(reversed(node.children))
    return out


def witness_model(theta: Qbf) -> tuple[Model, int]:
    """KTB model of ``ladner_translate(theta)`` built from the quantifier tree; returns (model, root)."""
    root = quantifier_tree(theta)
    nodes = tree_nodes(root)
    index = {id(nd): i for i, nd in enumerate(nodes)}
    daughter = {(index[id(nd)], index[id(ch)]) for nd in nodes for ch in nd.children}
    frame = reflexive_closure(symmetric_closure(Frame(len(nodes), frozenset(daughter))))
    val: dict[int, set[int]] = {}
    for w, nd in enumerate(nodes):
        val.setdefault(theta.m + 1 + nd.level, set()).add(w)
        # p_i is read off the branch once level i is reached, and false above it
        for i, b in enumerate(nd.assignment, start=1):
            if b:
                val.setdefault(i, set()).add(w)
    return Model(frame, val), index[id(root)]

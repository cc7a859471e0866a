"""Satisfiability and validity of modal formulas over a frame class.

Three procedures live here:

* ``sat_bruteforce``: enumerate every model up to a world cap.  Slow, but
  shares nothing with the other two, so it serves as their oracle.
* a labelled tableau (classes K, KD, T), terminating by modal depth;
* Hintikka-type elimination (all classes; used for KB, KDB, KTB).  Worlds
  are truth assignments to the subformulas, so the search space is exactly
  the ``2**|sub(phi)|`` filtration bound.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field
from typing import Iterator, Literal, Union

import numpy as np

from . import _kernels
from .formula import (
    And,
    Box,
    Diamond,
    Falsum,
    Formula,
    Implies,
    Not,
    Or,
    Var,
    modal_depth,
    subformulas,
    variables,
)
from .kripke import Frame, FrameClass, Model, is_in_class, model_check

UnsatMethod = Literal["tableau-closed", "bound-exhausted-complete"]


@dataclass(frozen=True)
class Sat:
    model: Model
    world: int


@dataclass(frozen=True)
class Unsat:
    method: UnsatMethod


@dataclass(frozen=True)
class Inconclusive:
    worlds_searched: int
    complete_bound: int


SatResult = Union[Sat, Unsat, Inconclusive]


@dataclass(frozen=True)
class Budget:
    max_worlds: int = 4096  # candidate worlds (types) for type elimination
    max_nodes: int = 500_000  # tableau expansions
    seconds: float = 60.0

    def __post_init__(self) -> None:
        if self.max_worlds <= 0 or self.max_nodes <= 0 or self.seconds <= 0:
            raise ValueError("budget limits must be positive")


@dataclass(frozen=True)
class Validity:
    status: Literal["valid", "invalid", "inconclusive"]
    countermodel: Model | None = None
    world: int | None = None


class BudgetExceeded(Exception):
    pass


class WitnessError(AssertionError):
    """A procedure produced a witness that does not re-verify (a bug)."""


# --- bounds ------------------------------------------------------------------


def filtration_bound(phi: Formula) -> int:
    return 2 ** len(subformulas(phi))


def tree_bound(phi: Formula) -> int:
    """Worlds in a tree of depth md(phi) branching once per modal subformula."""
    d = modal_depth(phi)
    b = sum(1 for f in subformulas(phi) if isinstance(f, (Box, Diamond)))
    return sum(b**i for i in range(d + 1))


def completeness_bound(phi: Formula, c: FrameClass) -> int:
    """World count beyond which exhaustive search cannot find new witnesses.

    Filtration gives ``2**|sub|`` for every class.  Without symmetry the
    tree-model property gives a usually much smaller bound.
    """
    bound = filtration_bound(phi)
    if not c.symmetric:
        bound = min(bound, tree_bound(phi))
    return bound


# --- brute force -------------------------------------------------------------

_CHUNK = 4096


def frames_of_class(n: int, c: FrameClass) -> Iterator[np.ndarray]:
    """Successor-mask arrays ``(F, n)`` of all ``n``-world frames in ``c``, in code order."""
    total = 1 << (n * n)
    ar = np.arange(n, dtype=np.uint64)
    one = np.uint64(1)
    for start in range(0, total, _CHUNK):
        codes = np.arange(start, min(start + _CHUNK, total), dtype=np.uint64)
        succ = _kernels.relation_codes_to_succ(codes, n)
        keep = np.ones(len(codes), dtype=bool)
        if c.reflexive:
            keep &= (((succ >> ar[None, :]) & one) == one).all(axis=1)
        if c.serial:
            keep &= (succ != 0).all(axis=1)
        if c.symmetric:
            for i in range(n):
                for j in range(i + 1, n):
                    bij = (succ[:, i] >> np.uint64(j)) & one
                    bji = (succ[:, j] >> np.uint64(i)) & one
                    keep &= bij == bji
        if keep.any():
            yield succ[keep]


def _decode_model(n: int, succ_row: np.ndarray, val_row: np.ndarray, var_list: list[int]) -> Model:
    rel = {(a, b) for a in range(n) for b in range(n) if (int(succ_row[a]) >> b) & 1}
    val = {v: {w for w in range(n) if (int(val_row[s]) >> w) & 1} for s, v in enumerate(var_list)}
    return Model(Frame(n, frozenset(rel)), val)


def sat_bruteforce(phi: Formula, c: FrameClass, max_worlds: int) -> SatResult:
    """Search every model of ``c`` with 1..max_worlds worlds for one satisfying ``phi``."""
    if max_worlds < 1:
        raise ValueError("max_worlds must be at least 1")
    bound = completeness_bound(phi, c)
    var_list = sorted(variables(phi))
    prog = _kernels.compile_formulas([phi], var_indices=var_list)
    for n in range(1, max_worlds + 1):
        vals = _kernels.valuation_table(n, len(var_list))
        for succ in frames_of_class(n, c):
            res = _kernels.eval_batch(prog, n, succ, vals)[:, :, 0]
            hits = np.argwhere(res != 0)
            if len(hits):
                f, v = hits[0]
                mask = int(res[f, v])
                world = (mask & -mask).bit_length() - 1
                model = _decode_model(n, succ[f], vals[v], var_list)
                return _verified(Sat(model, world), phi, c)
        if n >= bound:
            return Unsat("bound-exhausted-complete")
    return Inconclusive(max_worlds, bound)


def _verified(res: Sat, phi: Formula, c: FrameClass) -> Sat:
    if not is_in_class(res.model.frame, c):
        raise WitnessError(f"witness frame not in class {c.value}")
    if not model_check(res.model, res.world, phi):
        raise WitnessError("witness does not satisfy the formula")
    return res


# --- negation normal form ----------------------------------------------------


class _NNF:
    """Interned negation normal form; nodes are small tuples addressed by int."""

    TRUE = 0
    FALSE = 1

    def __init__(self) -> None:
        self.nodes: list[tuple] = [("T",), ("F",)]
        self.ids: dict[tuple, int] = {("T",): 0, ("F",): 1}
        self.memo: dict[tuple[int, bool], int] = {}
        # memo keys use id(); keep the formulas alive so ids are not recycled
        self._keep: list[Formula] = []

    def intern(self, node: tuple) -> int:
        i = self.ids.get(node)
        if i is None:
            i = len(self.nodes)
            self.nodes.append(node)
            self.ids[node] = i
        return i

    def _junction(self, kind: str, items: list[int]) -> int:
        unit, zero = (self.TRUE, self.FALSE) if kind == "and" else (self.FALSE, self.TRUE)
        flat: list[int] = []
        for i in items:
            if i == zero:
                return zero
            if i == unit:
                continue
            node = self.nodes[i]
            flat.extend(node[1] if node[0] == kind else (i,))
        flat = sorted(set(flat))
        if not flat:
            return unit
        if len(flat) == 1:
            return flat[0]
        return self.intern((kind, tuple(flat)))

    def convert(self, f: Formula, pos: bool = True) -> int:
        key = (id(f), pos)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if isinstance(f, Var):
            out = self.intern(("lit", f.index, pos))
        elif isinstance(f, Falsum):
            out = self.FALSE if pos else self.TRUE
        elif isinstance(f, Implies):
            a, b = self.convert(f.left, not pos), self.convert(f.right, pos)
            out = self._junction("or" if pos else "and", [a, b])
        elif isinstance(f, Not):
            out = self.convert(f.body, not pos)
        elif isinstance(f, And):
            kids = [self.convert(x, pos) for x in f.args]
            out = self._junction("and" if pos else "or", kids)
        elif isinstance(f, Or):
            kids = [self.convert(x, pos) for x in f.args]
            out = self._junction("or" if pos else "and", kids)
        elif isinstance(f, (Box, Diamond)):
            body = self.convert(f.body, pos)
            universal = isinstance(f, Box) == pos
            out = self.intern(("box" if universal else "dia", body))
        else:
            raise TypeError(f"not a formula: {f!r}")
        self.memo[key] = out
        self._keep.append(f)
        return out


# --- tableau (K, KD, T) --------------------------------------------------------


@dataclass(eq=False)
class _World:
    lits: frozenset[tuple[int, bool]]
    children: list["_World"] = field(default_factory=list)
    loop: bool = False


class _Clash(Exception):
    pass


_FAILED = object()


class _Tableau:
    def __init__(self, c: FrameClass, budget: Budget):
        if c.symmetric:
            raise ValueError("the tableau handles K, KD and T only")
        self.c = c
        self.budget = budget
        self.nnf = _NNF()
        self.memo: dict[frozenset[int], object] = {}
        self.nodes = 0
        self.deadline = time.monotonic() + budget.seconds

    def _tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            raise BudgetExceeded("tableau node budget exhausted")
        if self.nodes % 256 == 0 and time.monotonic() > self.deadline:
            raise BudgetExceeded("tableau time budget exhausted")

    def _dead(self, i: int, S: set[int]) -> bool:
        node = self.nnf.nodes[i]
        if node[0] == "F":
            return True
        if node[0] == "lit":
            return self.nnf.ids.get(("lit", node[1], not node[2]), -1) in S
        return False

    def _saturate(self, S: set[int], todo: list[int], pending: list[int]) -> None:
        nodes = self.nnf.nodes
        while True:
            while todo:
                i = todo.pop()
                if i in S:
                    continue
                node = nodes[i]
                kind = node[0]
                if kind == "F":
                    raise _Clash
                if kind == "T":
                    continue
                S.add(i)
                if kind == "lit":
                    if self.nnf.ids.get(("lit", node[1], not node[2]), -1) in S:
                        raise _Clash
                elif kind == "and":
                    todo.extend(node[1])
                elif kind == "or":
                    pending.append(i)
                elif kind == "box" and self.c.reflexive:
                    todo.append(node[1])
            # unit propagation over the open disjunctions
            still: list[int] = []
            for i in pending:
                args = nodes[i][1]
                if any(a in S for a in args):
                    continue
                alive = [a for a in args if not self._dead(a, S)]
                if not alive:
                    raise _Clash
                if len(alive) == 1:
                    todo.append(alive[0])
                else:
                    still.append(i)
            pending[:] = still
            if not todo:
                return

    def sat(self, label: frozenset[int]) -> _World | None:
        hit = self.memo.get(label)
        if hit is not None:
            return None if hit is _FAILED else hit  # type: ignore[return-value]
        self._tick()
        world = self._search(set(), list(label), [])
        self.memo[label] = _FAILED if world is None else world
        return world

    def _search(self, S: set[int], todo: list[int], pending: list[int]) -> _World | None:
        S = set(S)
        pending = list(pending)
        try:
            self._saturate(S, todo, pending)
        except _Clash:
            return None
        if pending:
            self._tick()
            nodes = self.nnf.nodes
            choice = min(pending)
            rest = [p for p in pending if p != choice]
            for d in nodes[choice][1]:
                if self._dead(d, S):
                    continue
                found = self._search(S, [d], rest)
                if found is not None:
                    return found
            return None
        return self._modal_step(S)

    def _modal_step(self, S: set[int]) -> _World | None:
        nodes = self.nnf.nodes
        boxes = sorted(nodes[i][1] for i in S if nodes[i][0] == "box")
        dias = sorted(nodes[i][1] for i in S if nodes[i][0] == "dia")
        lits = frozenset((nodes[i][1], nodes[i][2]) for i in S if nodes[i][0] == "lit")
        world = _World(lits, loop=self.c.reflexive)
        for d in dias:
            child = self.sat(frozenset([d, *boxes]))
            if child is None:
                return None
            world.children.append(child)
        if self.c.serial and not dias:
            if boxes:
                child = self.sat(frozenset(boxes))
                if child is None:
                    return None
                world.children.append(child)
            else:
                world.loop = True
        return world


def _tableau_model(root: _World) -> Model:
    order: dict[int, int] = {}
    worlds: list[_World] = []
    stack = [root]
    while stack:
        w = stack.pop()
        if id(w) in order:
            continue
        order[id(w)] = len(worlds)
        worlds.append(w)
        stack.extend(reversed(w.children))
    rel: set[tuple[int, int]] = set()
    val: dict[int, set[int]] = {}
    for idx, w in enumerate(worlds):
        if w.loop:
            rel.add((idx, idx))
        for ch in w.children:
            rel.add((idx, order[id(ch)]))
        for var, pos in w.lits:
            if pos:
                val.setdefault(var, set()).add(idx)
    return Model(Frame(len(worlds), frozenset(rel)), val)


def sat_tableau(phi: Formula, c: FrameClass, budget: Budget | None = None) -> SatResult:
    budget = budget or Budget()
    tab = _Tableau(c, budget)
    root_id = tab.nnf.convert(phi)
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 20000))
    try:
        root = tab.sat(frozenset([root_id]))
    except BudgetExceeded:
        return Inconclusive(0, completeness_bound(phi, c))
    finally:
        sys.setrecursionlimit(old_limit)
    if root is None:
        return Unsat("tableau-closed")
    return _verified(Sat(_tableau_model(root), 0), phi, c)


# --- type elimination ----------------------------------------------------------


def _topological_subformulas(phi: Formula) -> list[Formula]:
    order: list[Formula] = []
    seen: set[Formula] = set()

    def go(f: Formula) -> None:
        if f in seen:
            return
        for ch in f.children():
            go(ch)
        seen.add(f)
        order.append(f)

    go(phi)
    return order


def sat_types(phi: Formula, c: FrameClass, budget: Budget | None = None) -> SatResult:
    """Type elimination: the greatest set of mutually supporting Hintikka types."""
    budget = budget or Budget()
    subs = _topological_subformulas(phi)
    index = {f: i for i, f in enumerate(subs)}
    free = [i for i, f in enumerate(subs) if isinstance(f, (Var, Box, Diamond))]
    bound = completeness_bound(phi, c)
    ntypes = 1 << len(free)
    if ntypes > budget.max_worlds:
        return Inconclusive(0, bound)
    deadline = time.monotonic() + budget.seconds

    codes = np.arange(ntypes, dtype=np.int64)
    cols = np.zeros((ntypes, len(subs)), dtype=bool)
    for bit, i in enumerate(free):
        cols[:, i] = (codes >> bit) & 1 == 1
    for i, f in enumerate(subs):
        if isinstance(f, Falsum):
            cols[:, i] = False
        elif isinstance(f, Implies):
            cols[:, i] = ~cols[:, index[f.left]] | cols[:, index[f.right]]
        elif isinstance(f, Not):
            cols[:, i] = ~cols[:, index[f.body]]
        elif isinstance(f, And):
            cols[:, i] = np.logical_and.reduce([cols[:, index[a]] for a in f.args]) if f.args else True
        elif isinstance(f, Or):
            cols[:, i] = np.logical_or.reduce([cols[:, index[a]] for a in f.args]) if f.args else False

    boxes = [(i, index[f.body]) for i, f in enumerate(subs) if isinstance(f, Box)]
    dias = [(i, index[f.body]) for i, f in enumerate(subs) if isinstance(f, Diamond)]
    box_true = cols[:, [i for i, _ in boxes]].astype(np.int32)
    body_false = (~cols[:, [j for _, j in boxes]]).astype(np.int32)
    dia_false = (~cols[:, [i for i, _ in dias]]).astype(np.int32)
    body_true = cols[:, [j for _, j in dias]].astype(np.int32)
    # succ_ok[s, t]: t may be an R-successor of s
    succ_ok = ~((box_true @ body_false.T > 0) | (dia_false @ body_true.T > 0))
    rel = succ_ok & succ_ok.T if c.symmetric else succ_ok
    alive = np.ones(ntypes, dtype=bool)
    if c.reflexive:
        alive &= np.diagonal(succ_ok).copy()
    # demands: a false box needs a successor refuting its body; a true diamond one verifying it
    demand = np.concatenate([~cols[:, [i for i, _ in boxes]], cols[:, [i for i, _ in dias]]], axis=1)
    target = np.concatenate([~cols[:, [j for _, j in boxes]], cols[:, [j for _, j in dias]]], axis=1).astype(np.int32)
    while True:
        if time.monotonic() > deadline:
            return Inconclusive(0, bound)
        live_rel = (rel & alive[None, :]).astype(np.int32)
        supported = (live_rel @ target) > 0
        bad = (demand & ~supported).any(axis=1)
        if c.serial:
            bad |= ~live_rel.any(axis=1)
        new_alive = alive & ~bad
        if (new_alive == alive).all():
            break
        alive = new_alive

    root = index[phi]
    candidates = np.flatnonzero(alive & cols[:, root])
    if len(candidates) == 0:
        return Unsat("bound-exhausted-complete")
    start = int(candidates[0])
    # generated submodel of the surviving types, breadth first
    order = [start]
    pos = {start: 0}
    for s in order:
        for t in np.flatnonzero(rel[s] & alive).tolist():
            if t not in pos:
                pos[t] = len(order)
                order.append(t)
    edges = {(pos[s], pos[t]) for s in order for t in np.flatnonzero(rel[s] & alive).tolist()}
    val = {
        f.index: {pos[s] for s in order if cols[s, i]}
        for i, f in enumerate(subs)
        if isinstance(f, Var)
    }
    model = Model(Frame(len(order), frozenset(edges)), val)
    return _verified(Sat(model, 0), phi, c)


# --- front ends ------------------------------------------------------------------


def sat_decide(phi: Formula, c: FrameClass, budget: Budget | None = None) -> SatResult:
    """Sound always; complete unless the budget runs out (then Inconclusive)."""
    budget = budget or Budget()
    if isinstance(phi, Falsum):
        return Unsat("tableau-closed")
    if c.symmetric:
        return sat_types(phi, c, budget)
    return sat_tableau(phi, c, budget)


def valid(phi: Formula, c: FrameClass, budget: Budget | None = None) -> Validity:
    res = sat_decide(Not(phi), c, budget)
    if isinstance(res, Unsat):
        return Validity("valid")
    if isinstance(res, Sat):
        return Validity("invalid", res.model, res.world)
    return Validity("inconclusive")

"""Compiled formula evaluation.

A formula (or several sharing subterms) is flattened into a straight-line
program over truth sets.  Two evaluators run it:

* ``eval_dense``: one model of any size, truth sets as numpy bool rows.
* ``eval_batch``: many small models (<= 64 worlds) at once, truth sets as
  uint64 world bitmasks.  This is the hot loop of brute-force search; it is
  jitted with numba unless ``MODALRED_DISABLE_NUMBA`` is set to a non-empty
  value other than ``0``, in which case a vectorised numpy version runs.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .formula import And, Box, Diamond, Falsum, Formula, Implies, Not, Or, Var, fold

OP_VAR, OP_FALSE, OP_TRUE, OP_NOT, OP_AND, OP_OR, OP_IMP, OP_BOX, OP_DIA = range(9)

MAX_BATCH_WORLDS = 64


def _numba_requested() -> bool:
    flag = os.environ.get("MODALRED_DISABLE_NUMBA", "")
    return flag in ("", "0")


try:
    if not _numba_requested():
        raise ImportError("numba disabled by MODALRED_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


@dataclass(frozen=True)
class Program:
    ops: np.ndarray  # int8
    arg0: np.ndarray  # int32: operand node, or variable slot for OP_VAR
    arg1: np.ndarray  # int32
    roots: np.ndarray  # int32 node index per compiled formula
    var_indices: tuple[int, ...]  # variable index for each slot

    def __len__(self) -> int:
        return len(self.ops)


def compile_formulas(formulas: Sequence[Formula], var_indices: Sequence[int] | None = None) -> Program:
    """Flatten ``formulas`` into one program, sharing identical subterms."""
    ops: list[int] = []
    a0: list[int] = []
    a1: list[int] = []
    table: dict[tuple, int] = {}
    slots: dict[int, int] = {}
    if var_indices is not None:
        for v in var_indices:
            slots.setdefault(v, len(slots))

    def emit(op: int, x: int = -1, y: int = -1) -> int:
        key = (op, x, y)
        node = table.get(key)
        if node is None:
            node = len(ops)
            ops.append(op)
            a0.append(x)
            a1.append(y)
            table[key] = node
        return node

    def chain(op: int, items: list[int], empty: int) -> int:
        if not items:
            return emit(empty)
        acc = items[0]
        for it in items[1:]:
            acc = emit(op, acc, it)
        return acc

    def step(f: Formula, kids: list[int]) -> int:
        if isinstance(f, Var):
            if f.index not in slots:
                if var_indices is not None:
                    return emit(OP_FALSE)
                slots[f.index] = len(slots)
            return emit(OP_VAR, slots[f.index])
        if isinstance(f, Falsum):
            return emit(OP_FALSE)
        if isinstance(f, Implies):
            return emit(OP_IMP, kids[0], kids[1])
        if isinstance(f, Box):
            return emit(OP_BOX, kids[0])
        if isinstance(f, Diamond):
            return emit(OP_DIA, kids[0])
        if isinstance(f, Not):
            return emit(OP_NOT, kids[0])
        if isinstance(f, And):
            return chain(OP_AND, kids, OP_TRUE)
        if isinstance(f, Or):
            return chain(OP_OR, kids, OP_FALSE)
        raise TypeError(f"not a formula: {f!r}")

    roots = [fold(f, step) for f in formulas]
    var_list = [0] * len(slots)
    for v, s in slots.items():
        var_list[s] = v
    return Program(
        ops=np.asarray(ops, dtype=np.int8),
        arg0=np.asarray(a0, dtype=np.int32),
        arg1=np.asarray(a1, dtype=np.int32),
        roots=np.asarray(roots, dtype=np.int32),
        var_indices=tuple(var_list),
    )


# --- dense evaluator (single model, any size) --------------------------------


def eval_dense(prog: Program, adj: np.ndarray, val: np.ndarray) -> np.ndarray:
    """Truth table of every root: bool array ``(len(roots), n)``.

    ``adj[w, v]`` is the accessibility relation, ``val[slot, w]`` the
    valuation of each program variable slot.
    """
    n = adj.shape[0]
    adj = adj.astype(bool, copy=False)
    out: list[np.ndarray] = []
    for op, x, y in zip(prog.ops.tolist(), prog.arg0.tolist(), prog.arg1.tolist()):
        if op == OP_VAR:
            r = val[x]
        elif op == OP_FALSE:
            r = np.zeros(n, dtype=bool)
        elif op == OP_TRUE:
            r = np.ones(n, dtype=bool)
        elif op == OP_NOT:
            r = ~out[x]
        elif op == OP_AND:
            r = out[x] & out[y]
        elif op == OP_OR:
            r = out[x] | out[y]
        elif op == OP_IMP:
            r = ~out[x] | out[y]
        elif op == OP_BOX:
            r = ~(adj & ~out[x]).any(axis=1)
        elif op == OP_DIA:
            r = (adj & out[x]).any(axis=1)
        else:
            raise ValueError(f"bad opcode {op}")
        out.append(r)
    return np.stack([out[r] for r in prog.roots.tolist()]) if len(prog.roots) else np.zeros((0, n), bool)


# --- batch evaluator (many models, <= 64 worlds) -----------------------------


def _eval_batch_numpy(ops, arg0, arg1, roots, n, succ, val):
    """succ: (F, n) uint64 successor masks; val: (V, slots) uint64 masks."""
    F = succ.shape[0]
    V = val.shape[0]
    full = np.uint64((1 << n) - 1) if n < 64 else np.uint64(0xFFFFFFFFFFFFFFFF)
    shape = (F, V)
    zero = np.zeros(shape, dtype=np.uint64)
    s = succ[:, None, :]  # (F, 1, n)
    regs: list[np.ndarray] = []
    for op, x, y in zip(ops.tolist(), arg0.tolist(), arg1.tolist()):
        if op == OP_VAR:
            r = np.broadcast_to(val[None, :, x], shape)
        elif op == OP_FALSE:
            r = zero
        elif op == OP_TRUE:
            r = np.full(shape, full, dtype=np.uint64)
        elif op == OP_NOT:
            r = ~regs[x] & full
        elif op == OP_AND:
            r = regs[x] & regs[y]
        elif op == OP_OR:
            r = regs[x] | regs[y]
        elif op == OP_IMP:
            r = (~regs[x] & full) | regs[y]
        elif op in (OP_BOX, OP_DIA):
            body = regs[x][:, :, None]
            if op == OP_BOX:
                ok = (s & ~body) == 0
            else:
                ok = (s & body) != 0
            weights = np.left_shift(np.uint64(1), np.arange(n, dtype=np.uint64))
            r = np.bitwise_or.reduce(np.where(ok, weights, np.uint64(0)), axis=2)
        else:
            raise ValueError(f"bad opcode {op}")
        regs.append(r)
    out = np.empty((F, V, len(roots)), dtype=np.uint64)
    for k, root in enumerate(roots.tolist()):
        out[:, :, k] = regs[root]
    return out


if HAVE_NUMBA:

    @njit(cache=True)
    def _eval_batch_numba(ops, arg0, arg1, roots, n, succ, val):
        F = succ.shape[0]
        V = val.shape[0]
        m = ops.shape[0]
        one = np.uint64(1)
        if n < 64:
            full = (one << np.uint64(n)) - one
        else:
            full = np.uint64(0xFFFFFFFFFFFFFFFF)
        out = np.empty((F, V, roots.shape[0]), dtype=np.uint64)
        regs = np.empty(m, dtype=np.uint64)
        for f in range(F):
            for v in range(V):
                for k in range(m):
                    op = ops[k]
                    if op == 0:
                        regs[k] = val[v, arg0[k]]
                    elif op == 1:
                        regs[k] = np.uint64(0)
                    elif op == 2:
                        regs[k] = full
                    elif op == 3:
                        regs[k] = ~regs[arg0[k]] & full
                    elif op == 4:
                        regs[k] = regs[arg0[k]] & regs[arg1[k]]
                    elif op == 5:
                        regs[k] = regs[arg0[k]] | regs[arg1[k]]
                    elif op == 6:
                        regs[k] = (~regs[arg0[k]] & full) | regs[arg1[k]]
                    else:
                        body = regs[arg0[k]]
                        r = np.uint64(0)
                        for w in range(n):
                            sw = succ[f, w]
                            if op == 7:
                                hit = (sw & ~body) == 0
                            else:
                                hit = (sw & body) != 0
                            if hit:
                                r |= one << np.uint64(w)
                        regs[k] = r
                for j in range(roots.shape[0]):
                    out[f, v, j] = regs[roots[j]]
        return out


def eval_batch(prog: Program, n: int, succ: np.ndarray, val: np.ndarray, use_numba: bool | None = None) -> np.ndarray:
    """Truth sets ``(F, V, len(roots))`` of every root on every (frame, valuation) pair."""
    if n > MAX_BATCH_WORLDS:
        raise ValueError(f"batch evaluation supports at most {MAX_BATCH_WORLDS} worlds")
    if use_numba is None:
        use_numba = HAVE_NUMBA
    if use_numba and not HAVE_NUMBA:
        raise RuntimeError("numba is not available")
    succ = np.ascontiguousarray(succ, dtype=np.uint64)
    val = np.ascontiguousarray(val, dtype=np.uint64)
    if val.ndim != 2:
        raise ValueError("val must be 2-dimensional")
    if val.shape[1] == 0:
        # numba wants a non-degenerate column axis
        val = np.zeros((val.shape[0], 1), dtype=np.uint64)
    fn = _eval_batch_numba if use_numba else _eval_batch_numpy
    return fn(prog.ops, prog.arg0, prog.arg1, prog.roots, n, succ, val)


# --- enumeration helpers ------------------------------------------------------


def relation_codes_to_succ(codes: np.ndarray, n: int) -> np.ndarray:
    """Decode relation bitmasks (bit ``i*n + j`` is the pair (i, j)) to successor masks."""
    codes = np.asarray(codes, dtype=np.uint64)
    mask = np.uint64((1 << n) - 1)
    shifts = (np.arange(n, dtype=np.uint64) * np.uint64(n))[None, :]
    return (codes[:, None] >> shifts) & mask


def valuation_table(n: int, nslots: int) -> np.ndarray:
    """All valuations of ``nslots`` variables over ``n`` worlds, in ascending code order.

    Code bit ``slot*n + w`` says the slot's variable holds at ``w``.
    """
    total = n * nslots
    if total > 24:
        raise ValueError("too many valuations to tabulate")
    codes = np.arange(1 << total, dtype=np.uint64)
    mask = np.uint64((1 << n) - 1)
    shifts = (np.arange(nslots, dtype=np.uint64) * np.uint64(n))[None, :]
    return (codes[:, None] >> shifts) & mask

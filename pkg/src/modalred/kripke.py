"""Finite Kripke frames and models, frame classes, and model checking."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .formula import Formula, variables


class FrameClass(enum.Enum):
    K = "K"
    KD = "KD"
    T = "T"
    KB = "KB"
    KDB = "KDB"
    KTB = "KTB"

    @property
    def reflexive(self) -> bool:
        return self in (FrameClass.T, FrameClass.KTB)

    @property
    def symmetric(self) -> bool:
        return self in (FrameClass.KB, FrameClass.KDB, FrameClass.KTB)

    @property
    def serial(self) -> bool:
        # reflexive frames are serial too
        return self in (FrameClass.KD, FrameClass.KDB, FrameClass.T, FrameClass.KTB)

    @classmethod
    def parse(cls, name: str) -> "FrameClass":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown frame class {name!r}; expected one of {', '.join(c.value for c in cls)}") from None


@dataclass(frozen=True)
class Frame:
    world_count: int
    relation: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self) -> None:
        if self.world_count < 1:
            raise ValueError("a frame needs at least one world")
        rel = frozenset((int(a), int(b)) for a, b in self.relation)
        for a, b in rel:
            if not (0 <= a < self.world_count and 0 <= b < self.world_count):
                raise ValueError(f"pair ({a}, {b}) out of range for {self.world_count} worlds")
        object.__setattr__(self, "relation", rel)

    @property
    def worlds(self) -> range:
        return range(self.world_count)

    def successors(self, w: int) -> list[int]:
        return sorted(b for a, b in self.relation if a == w)

    def adjacency(self) -> np.ndarray:
        adj = np.zeros((self.world_count, self.world_count), dtype=bool)
        if self.relation:
            idx = np.array(sorted(self.relation))
            adj[idx[:, 0], idx[:, 1]] = True
        return adj


@dataclass(frozen=True)
class Model:
    frame: Frame
    valuation: Mapping[int, frozenset[int]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        norm: dict[int, frozenset[int]] = {}
        for var, worlds in sorted(self.valuation.items()):
            if var < 1:
                raise ValueError(f"variable index must be >= 1, got {var}")
            ws = frozenset(int(w) for w in worlds)
            for w in ws:
                if not 0 <= w < self.frame.world_count:
                    raise ValueError(f"valuation of p{var} mentions world {w} out of range")
            if ws:
                norm[var] = ws
        object.__setattr__(self, "valuation", norm)

    @property
    def world_count(self) -> int:
        return self.frame.world_count

    def holds(self, var: int) -> frozenset[int]:
        return self.valuation.get(var, frozenset())

    def with_valuation(self, valuation: Mapping[int, Iterable[int]]) -> "Model":
        return Model(self.frame, {k: frozenset(v) for k, v in valuation.items()})


# --- frame classes -----------------------------------------------------------


def is_reflexive(frame: Frame) -> bool:
    return all((w, w) in frame.relation for w in frame.worlds)


def is_symmetric(frame: Frame) -> bool:
    return all((b, a) in frame.relation for a, b in frame.relation)


def is_serial(frame: Frame) -> bool:
    sources = {a for a, _ in frame.relation}
    return len(sources) == frame.world_count


def is_in_class(frame: Frame, c: FrameClass) -> bool:
    if c.reflexive and not is_reflexive(frame):
        return False
    if c.serial and not is_serial(frame):
        return False
    if c.symmetric and not is_symmetric(frame):
        return False
    return True


def reflexive_closure(frame: Frame) -> Frame:
    return Frame(frame.world_count, frame.relation | {(w, w) for w in frame.worlds})


def symmetric_closure(frame: Frame) -> Frame:
    return Frame(frame.world_count, frame.relation | {(b, a) for a, b in frame.relation})


def close_for(frame: Frame, c: FrameClass) -> Frame:
    """Smallest extension of ``frame`` in class ``c`` (seriality added as loops on dead ends)."""
    if c.symmetric:
        frame = symmetric_closure(frame)
    if c.reflexive:
        frame = reflexive_closure(frame)
    if c.serial and not is_serial(frame):
        sources = {a for a, _ in frame.relation}
        frame = Frame(frame.world_count, frame.relation | {(w, w) for w in frame.worlds if w not in sources})
    return frame


def induced_submodel(model: Model, worlds: Iterable[int]) -> tuple[Model, dict[int, int]]:
    """Restrict ``model`` to ``worlds`` (renumbered in ascending order)."""
    keep = sorted(set(worlds))
    if not keep:
        raise ValueError("submodel needs at least one world")
    index = {w: i for i, w in enumerate(keep)}
    rel = {(index[a], index[b]) for a, b in model.frame.relation if a in index and b in index}
    val = {p: {index[w] for w in ws if w in index} for p, ws in model.valuation.items()}
    return Model(Frame(len(keep), frozenset(rel)), val), index


def disjoint_union(models: Sequence[Model]) -> tuple[Model, list[int]]:
    if not models:
        raise ValueError("need at least one model")
    offsets = []
    total = 0
    rel: set[tuple[int, int]] = set()
    val: dict[int, set[int]] = {}
    for m in models:
        offsets.append(total)
        rel.update((a + total, b + total) for a, b in m.frame.relation)
        for p, ws in m.valuation.items():
            val.setdefault(p, set()).update(w + total for w in ws)
        total += m.world_count
    return Model(Frame(total, frozenset(rel)), val), offsets


# --- satisfaction ------------------------------------------------------------


def truth_sets(model: Model, formulas: Sequence[Formula]) -> np.ndarray:
    """Bool array ``(len(formulas), world_count)``: where each formula holds."""
    prog = _kernels.compile_formulas(formulas)
    n = model.world_count
    val = np.zeros((max(len(prog.var_indices), 1), n), dtype=bool)
    for slot, var in enumerate(prog.var_indices):
        ws = model.holds(var)
        if ws:
            val[slot, sorted(ws)] = True
    return _kernels.eval_dense(prog, model.frame.adjacency(), val)


def truth_set(model: Model, phi: Formula) -> frozenset[int]:
    row = truth_sets(model, [phi])[0]
    return frozenset(np.flatnonzero(row).tolist())


def model_check(model: Model, w: int, phi: Formula) -> bool:
    if not 0 <= w < model.world_count:
        raise ValueError(f"world {w} out of range for a {model.world_count}-world model")
    return bool(truth_sets(model, [phi])[0, w])


def model_check_naive(model: Model, w: int, phi: Formula) -> bool:
    """Direct recursive reading of the satisfaction clauses (slow; used as a cross-check)."""
    from .formula import And, Box, Diamond, Falsum, Implies, Not, Or, Var

    if isinstance(phi, Var):
        return w in model.holds(phi.index)
    if isinstance(phi, Falsum):
        return False
    if isinstance(phi, Implies):
        return (not model_check_naive(model, w, phi.left)) or model_check_naive(model, w, phi.right)
    if isinstance(phi, Box):
        return all(model_check_naive(model, v, phi.body) for v in model.frame.successors(w))
    if isinstance(phi, Not):
        return not model_check_naive(model, w, phi.body)
    if isinstance(phi, Diamond):
        return any(model_check_naive(model, v, phi.body) for v in model.frame.successors(w))
    if isinstance(phi, And):
        return all(model_check_naive(model, w, c) for c in phi.args)
    if isinstance(phi, Or):
        return any(model_check_naive(model, w, c) for c in phi.args)
    raise TypeError(f"not a formula: {phi!r}")


def restrict_valuation(model: Model, vars_: Iterable[int]) -> Model:
    keep = set(vars_)
    return Model(model.frame, {p: ws for p, ws in model.valuation.items() if p in keep})


def relevant_valuation(model: Model, phi: Formula) -> Model:
    return restrict_valuation(model, variables(phi))


# --- model file format -------------------------------------------------------


class ModelFormatError(ValueError):
    pass


def dump_model(model: Model, comments: Sequence[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(f"worlds {model.world_count}")
    lines.extend(f"rel {a} {b}" for a, b in sorted(model.frame.relation))
    for p in sorted(model.valuation):
        ws = " ".join(str(w) for w in sorted(model.valuation[p]))
        lines.append(f"val p{p} {ws}")
    return "\n".join(lines) + "\n"


def load_model(text: str) -> Model:
    n = None
    rel: set[tuple[int, int]] = set()
    val: dict[int, set[int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if parts[0] == "worlds" and len(parts) == 2:
                if n is not None:
                    raise ModelFormatError(f"line {lineno}: duplicate 'worlds'")
                n = int(parts[1])
            elif parts[0] == "rel" and len(parts) == 3:
                rel.add((int(parts[1]), int(parts[2])))
            elif parts[0] == "val" and len(parts) >= 2 and parts[1].startswith("p"):
                val.setdefault(int(parts[1][1:]), set()).update(int(x) for x in parts[2:])
            else:
                raise ModelFormatError(f"line {lineno}: cannot parse {raw!r}")
        except ValueError as exc:
            if isinstance(exc, ModelFormatError):
                raise
            raise ModelFormatError(f"line {lineno}: {exc}") from None
    if n is None:
        raise ModelFormatError("missing 'worlds <n>' line")
    try:
        return Model(Frame(n, frozenset(rel)), val)
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from None

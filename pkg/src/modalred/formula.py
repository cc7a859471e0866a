"""Modal formula terms, the usual abbreviations, substitution, parsing and printing.

The core language is ``Var``, ``Falsum``, ``Implies`` and ``Box``.  ``Not``,
``And``, ``Or`` and ``Diamond`` are kept as their own node kinds so that
generated formulas stay readable; ``TOP`` is the empty conjunction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, TypeVar

T = TypeVar("T")


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    def children(self) -> tuple["Formula", ...]:
        return ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, repr=False)
class Var(Formula):
    index: int

    def __post_init__(self) -> None:
        if not isinstance(self.index, int) or self.index < 1:
            raise ValueError(f"variable index must be a positive integer, got {self.index!r}")

    def __repr__(self) -> str:
        return f"Var({self.index})"


@dataclass(frozen=True, repr=False)
class Falsum(Formula):
    def __repr__(self) -> str:
        return "Falsum()"


@dataclass(frozen=True, repr=False)
class Implies(Formula):
    left: Formula
    right: Formula

    def children(self) -> tuple[Formula, ...]:
        return (self.left, self.right)

    def __repr__(self) -> str:
        return f"Implies({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Box(Formula):
    body: Formula

    def children(self) -> tuple[Formula, ...]:
        return (self.body,)

    def __repr__(self) -> str:
        return f"Box({self.body!r})"


@dataclass(frozen=True, repr=False)
class Not(Formula):
    body: Formula

    def children(self) -> tuple[Formula, ...]:
        return (self.body,)

    def __repr__(self) -> str:
        return f"Not({self.body!r})"


@dataclass(frozen=True, repr=False)
class Diamond(Formula):
    body: Formula

    def children(self) -> tuple[Formula, ...]:
        return (self.body,)

    def __repr__(self) -> str:
        return f"Diamond({self.body!r})"


@dataclass(frozen=True, repr=False)
class And(Formula):
    args: tuple[Formula, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) == 1:
            raise ValueError("And needs zero or at least two conjuncts; use conj()")

    def children(self) -> tuple[Formula, ...]:
        return self.args

    def __repr__(self) -> str:
        return "And(" + ", ".join(map(repr, self.args)) + ")"


@dataclass(frozen=True, repr=False)
class Or(Formula):
    args: tuple[Formula, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) == 1:
            raise ValueError("Or needs zero or at least two disjuncts; use disj()")

    def children(self) -> tuple[Formula, ...]:
        return self.args

    def __repr__(self) -> str:
        return "Or(" + ", ".join(map(repr, self.args)) + ")"


def _cached_hash(self: Formula) -> int:
    # deep terms get hashed a lot (subformula sets, memo tables)
    h = self.__dict__.get("_hash")
    if h is None:
        h = hash((type(self).__name__,) + tuple(getattr(self, f) for f in self.__dataclass_fields__))
        object.__setattr__(self, "_hash", h)
    return h


for _cls in (Var, Falsum, Implies, Box, Not, Diamond, And, Or):
    _cls.__hash__ = _cached_hash  # type: ignore[method-assign]

FALSUM = Falsum()
TOP = And(())


def conj(*args: Formula) -> Formula:
    """Conjunction that collapses the 0- and 1-ary cases to ``TOP`` / the item."""
    if len(args) == 1:
        return args[0]
    return And(args)


def disj(*args: Formula) -> Formula:
    if not args:
        return FALSUM
    if len(args) == 1:
        return args[0]
    return Or(args)


def iff(a: Formula, b: Formula) -> Formula:
    return And((Implies(a, b), Implies(b, a)))


# --- abbreviations -----------------------------------------------------------


def box_pow(n: int, phi: Formula) -> Formula:
    if n < 0:
        raise ValueError("n must be non-negative")
    for _ in range(n):
        phi = Box(phi)
    return phi


def diamond_pow(n: int, phi: Formula) -> Formula:
    """n nested diamonds; semantically the same as ``~ box_pow(n, ~phi)``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    for _ in range(n):
        phi = Diamond(phi)
    return phi


def box_upto(n: int, phi: Formula) -> Formula:
    """``phi & []phi & ... & []^n phi``, associated to the left."""
    if n < 0:
        raise ValueError("n must be non-negative")
    out = phi
    for i in range(1, n + 1):
        out = And((out, box_pow(i, phi)))
    return out


def box_plus(phi: Formula) -> Formula:
    return And((phi, Box(phi)))


# --- traversal ---------------------------------------------------------------


def iter_nodes(phi: Formula) -> Iterator[Formula]:
    """Pre-order walk over every node occurrence."""
    stack = [phi]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children()))


def fold(phi: Formula, fn: Callable[[Formula, list], T]) -> T:
    """Bottom-up ``fn(node, child_results)`` over shared nodes, without recursion."""
    memo: dict[int, T] = {}
    stack: list[tuple[Formula, bool]] = [(phi, False)]
    while stack:
        f, expanded = stack.pop()
        key = id(f)
        if key in memo:
            continue
        kids = f.children()
        if expanded or not kids:
            memo[key] = fn(f, [memo[id(c)] for c in kids])
        else:
            stack.append((f, True))
            stack.extend((c, False) for c in reversed(kids) if id(c) not in memo)
    return memo[id(phi)]


def size(phi: Formula) -> int:
    return fold(phi, lambda f, rs: 1 + sum(rs))


def modal_depth(phi: Formula) -> int:
    def step(f: Formula, rs: list[int]) -> int:
        d = max(rs, default=0)
        return d + 1 if isinstance(f, (Box, Diamond)) else d

    return fold(phi, step)


def subformulas(phi: Formula) -> set[Formula]:
    seen_ids: set[int] = set()
    out: set[Formula] = set()
    stack = [phi]
    while stack:
        f = stack.pop()
        if id(f) in seen_ids:
            continue
        seen_ids.add(id(f))
        out.add(f)
        stack.extend(f.children())
    return out


def variables(phi: Formula) -> set[int]:
    return {f.index for f in subformulas(phi) if isinstance(f, Var)}


def max_var(phi: Formula) -> int:
    return max(variables(phi), default=0)


def substitute(phi: Formula, s: Mapping[int, Formula]) -> Formula:
    """Simultaneously replace every ``Var(i)`` with ``s[i]`` (identity outside ``s``)."""

    def step(f: Formula, rs: list[Formula]) -> Formula:
        if isinstance(f, Var):
            return s.get(f.index, f)
        return _rebuild(f, rs)

    return fold(phi, step)


def _rebuild(f: Formula, kids: list[Formula]) -> Formula:
    if isinstance(f, (Var, Falsum)):
        return f
    if isinstance(f, Implies):
        return Implies(kids[0], kids[1])
    if isinstance(f, Box):
        return Box(kids[0])
    if isinstance(f, Not):
        return Not(kids[0])
    if isinstance(f, Diamond):
        return Diamond(kids[0])
    if isinstance(f, And):
        return And(tuple(kids))
    if isinstance(f, Or):
        return Or(tuple(kids))
    raise TypeError(f"not a formula: {f!r}")


def to_core(phi: Formula) -> Formula:
    """Expand every sugar node into ``Var``/``Falsum``/``Implies``/``Box``."""

    def neg(f: Formula) -> Formula:
        return Implies(f, FALSUM)

    def step(f: Formula, rs: list[Formula]) -> Formula:
        if isinstance(f, Not):
            return neg(rs[0])
        if isinstance(f, Diamond):
            return neg(Box(neg(rs[0])))
        if isinstance(f, And):
            if not rs:
                return neg(FALSUM)
            out = rs[0]
            for c in rs[1:]:
                out = neg(Implies(out, neg(c)))  # a & b == ~(a -> ~b)
            return out
        if isinstance(f, Or):
            if not rs:
                return FALSUM
            out = rs[0]
            for c in rs[1:]:
                out = Implies(neg(out), c)
            return out
        return _rebuild(f, rs)

    return fold(phi, step)


# --- text syntax -------------------------------------------------------------


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(p\d+)|(false|true)|(->|\[\]|<>|[~&|().])|([EA])\b|(\S))")

_LEVEL_IMP, _LEVEL_OR, _LEVEL_AND, _LEVEL_PREFIX, _LEVEL_ATOM = range(1, 6)


def tokenize(text: str) -> list[tuple[str, str, int]]:
    """Return ``(kind, value, pos)`` tokens; kinds are var, const, op, quant, end."""
    toks = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(1):
            toks.append(("var", m.group(1), m.start(1)))
        elif m.group(2):
            toks.append(("const", m.group(2), m.start(2)))
        elif m.group(3):
            toks.append(("op", m.group(3), m.start(3)))
        elif m.group(4):
            toks.append(("quant", m.group(4), m.start(4)))
        else:
            raise FormulaSyntaxError(f"unexpected character {m.group(5)!r}", text, m.start(5))
        pos = m.end()
    if text[pos:].strip():
        raise FormulaSyntaxError("unexpected input", text, pos)
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, toks: list[tuple[str, str, int]], start: int = 0):
        self.text = text
        self.toks = toks
        self.i = start

    def peek(self) -> tuple[str, str, int]:
        return self.toks[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, msg: str) -> FormulaSyntaxError:
        return FormulaSyntaxError(msg, self.text, self.peek()[2])

    def expect(self, value: str) -> None:
        kind, v, _ = self.peek()
        if kind != "op" or v != value:
            raise self.error(f"expected {value!r}")
        self.take()

    def parse_imp(self) -> Formula:
        left = self.parse_or()
        kind, v, _ = self.peek()
        if kind == "op" and v == "->":
            self.take()
            return Implies(left, self.parse_imp())
        return left

    def _nary(self, op: str, sub, cls) -> Formula:
        items = [sub()]
        while self.peek()[0] == "op" and self.peek()[1] == op:
            self.take()
            items.append(sub())
        return items[0] if len(items) == 1 else cls(tuple(items))

    def parse_or(self) -> Formula:
        return self._nary("|", self.parse_and, Or)

    def parse_and(self) -> Formula:
        return self._nary("&", self.parse_prefix, And)

    def parse_prefix(self) -> Formula:
        kind, v, pos = self.peek()
        if kind == "op" and v in ("~", "[]", "<>"):
            self.take()
            body = self.parse_prefix()
            return {"~": Not, "[]": Box, "<>": Diamond}[v](body)
        return self.parse_atom()

    def parse_atom(self) -> Formula:
        kind, v, pos = self.peek()
        if kind == "var":
            index = int(v[1:])
            if index < 1:
                raise FormulaSyntaxError("variable index must be at least 1", self.text, pos)
            self.take()
            return Var(index)
        if kind == "const":
            self.take()
            return FALSUM if v == "false" else TOP
        if kind == "op" and v == "(":
            self.take()
            inner = self.parse_imp()
            self.expect(")")
            return inner
        if kind == "end":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected token {v!r}")


def parse(text: str) -> Formula:
    """Parse the ASCII formula syntax (``p1``, ``false``, ``true``, ``~ [] <> & | ->``)."""
    p = _Parser(text, tokenize(text))
    phi = p.parse_imp()
    if p.peek()[0] != "end":
        raise p.error(f"unexpected token {p.peek()[1]!r}")
    return phi


def _level(f: Formula) -> int:
    if isinstance(f, Implies):
        return _LEVEL_IMP
    if isinstance(f, Or) and f.args:
        return _LEVEL_OR
    if isinstance(f, And) and f.args:
        return _LEVEL_AND
    if isinstance(f, (Not, Box, Diamond)):
        return _LEVEL_PREFIX
    return _LEVEL_ATOM


def to_text(phi: Formula) -> str:
    """Print ``phi`` so that :func:`parse` gives back an equal term.

    The only exception is the empty disjunction, printed as ``false``.
    """

    def step(f: Formula, rs: list[str]) -> str:
        def wrap(i: int, min_level: int) -> str:
            return rs[i] if _level(f.children()[i]) >= min_level else f"({rs[i]})"

        if isinstance(f, Var):
            return f"p{f.index}"
        if isinstance(f, Falsum):
            return "false"
        if isinstance(f, And) and not f.args:
            return "true"
        if isinstance(f, Or) and not f.args:
            return "false"
        if isinstance(f, Not):
            return "~" + wrap(0, _LEVEL_PREFIX)
        if isinstance(f, Box):
            return "[]" + wrap(0, _LEVEL_PREFIX)
        if isinstance(f, Diamond):
            return "<>" + wrap(0, _LEVEL_PREFIX)
        if isinstance(f, And):
            # nested conjunctions keep their parentheses so structure survives
            return " & ".join(wrap(i, _LEVEL_AND + 1) for i in range(len(rs)))
        if isinstance(f, Or):
            return " | ".join(wrap(i, _LEVEL_OR + 1) for i in range(len(rs)))
        if isinstance(f, Implies):
            return f"{wrap(0, _LEVEL_IMP + 1)} -> {wrap(1, _LEVEL_IMP)}"
        raise TypeError(f"not a formula: {f!r}")

    return fold(phi, step)


def parse_many(lines: Iterable[str]) -> list[Formula]:
    """Parse one formula per non-blank, non-comment line."""
    return [parse(ln) for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]

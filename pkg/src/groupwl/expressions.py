"""Subset selectors, group expressions and set-level closure operations.

A selector maps a colored group to a subset of its elements. A group
expression pairs t selectors with relator words in t variables; its
solutions are the t-tuples drawn from the selectors on which every relator
evaluates to the identity.

Variables and coordinates are 0-based in the API. The text syntax for words
uses 1-based names: ``x1 x2^-1 x1``, ``x1^3``, or ``[x1,x2]`` for a
commutator.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ArityTooLarge, ParseError, ValidationError
from .group import ColoredGroup, ElementSet, Group, as_colored, is_pi_number

MAX_ARITY = 4


@dataclass(frozen=True)
class Word:
    """Literals (variable, sign) with sign in {+1, -1}; empty means the identity."""

    literals: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        for v, s in self.literals:
            if v < 0 or s not in (1, -1):
                raise ValidationError(f"bad literal ({v}, {s})")

    @property
    def arity(self) -> int:
        return 1 + max((v for v, _ in self.literals), default=-1)

    def inverse(self) -> "Word":
        return Word(tuple((v, -s) for v, s in reversed(self.literals)))

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.literals + other.literals)

    def __str__(self) -> str:
        if not self.literals:
            return "1"
        return " ".join(f"x{v + 1}" + ("" if s == 1 else "^-1") for v, s in self.literals)


def var(i: int, exponent: int = 1) -> Word:
    sign = 1 if exponent >= 0 else -1
    return Word(((i, sign),) * abs(exponent))


def commutator_word(a: Word, b: Word) -> Word:
    """a b a^-1 b^-1."""
    return a * b * a.inverse() * b.inverse()


_LITERAL = re.compile(r"x(\d+)(?:\^(-?\d+))?")
_COMM = re.compile(r"\[\s*(x\d+(?:\^-?\d+)?)\s*,\s*(x\d+(?:\^-?\d+)?)\s*\]")


def _literal(token: str, column: int) -> Word:
    m = _LITERAL.fullmatch(token)
    if not m:
        raise ParseError(f"bad literal {token!r}", line=1, column=column)
    idx = int(m.group(1))
    if idx < 1:
        raise ParseError("variables are numbered from x1", line=1, column=column)
    return var(idx - 1, int(m.group(2)) if m.group(2) is not None else 1)


def parse_word(text: str) -> Word:
    """Parse whitespace-separated literals, e.g. ``x1 x2^-1 x1`` or ``[x1,x2] x3^2``."""
    out = Word()
    pos = 0
    text = text.strip()
    if text in ("", "1", "e"):
        return out
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _COMM.match(text, pos)
        if m:
            out = out * commutator_word(_literal(m.group(1), pos + 1), _literal(m.group(2), pos + 1))
            pos = m.end()
            continue
        end = pos
        while end < len(text) and not text[end].isspace():
            end += 1
        out = out * _literal(text[pos:end], pos + 1)
        pos = end
    return out


def eval_word(group: Group, w: Word, assignment: Sequence[int]) -> int:
    x = 0
    for v, s in w.literals:
        a = assignment[v]
        x = group.mul(x, a if s == 1 else group.inv(a))
    return x


def _eval_many(group: Group, w: Word, tuples: np.ndarray) -> np.ndarray:
    t = group.table
    inv = group.inverses
    out = np.zeros(len(tuples), dtype=np.int64)
    for v, s in w.literals:
        col = tuples[:, v]
        out = t[out, col if s == 1 else inv[col]]
    return out


@dataclass(frozen=True)
class SubsetSelector:
    name: str
    fn: Callable[[ColoredGroup], Iterable[int]] = field(compare=False)

    def __call__(self, cg: Group | ColoredGroup) -> ElementSet:
        cg = as_colored(cg)
        out = frozenset(int(x) for x in self.fn(cg))
        if any(not 0 <= x < cg.order for x in out):
            raise ValidationError(f"selector {self.name} returned elements outside the group")
        return out

    def __or__(self, other: "SubsetSelector") -> "SubsetSelector":
        return union(self, other)

    def __and__(self, other: "SubsetSelector") -> "SubsetSelector":
        return intersection(self, other)

    def __invert__(self) -> "SubsetSelector":
        return complement(self)


def selector(name: str) -> Callable[[Callable], SubsetSelector]:
    return lambda fn: SubsetSelector(name, fn)


IDENTITY = SubsetSelector("Id", lambda cg: range(cg.order))
CENTER = SubsetSelector("center", lambda cg: cg.group.center())
DERIVED = SubsetSelector("derived", lambda cg: cg.group.derived_subgroup())
TRIVIAL = SubsetSelector("one", lambda cg: (0,))


def pi_elements(primes: Iterable[int]) -> SubsetSelector:
    pi = frozenset(primes)
    return SubsetSelector(f"pi{sorted(pi)}", lambda cg: (
        x for x in range(cg.order) if is_pi_number(int(cg.group.element_orders[x]), pi)))


def order_elements(d: int) -> SubsetSelector:
    return SubsetSelector(f"order{d}", lambda cg: np.flatnonzero(cg.group.element_orders == d))


def color_class(values: Iterable[int], colors: Callable[[ColoredGroup], np.ndarray] | None = None,
                name: str | None = None) -> SubsetSelector:
    """Elements whose color lies in ``values``.

    ``colors`` computes an element coloring (for instance stable WL element
    colors); by default the group's own coloring is used.
    """
    vals = frozenset(values)

    def fn(cg: ColoredGroup):
        col = cg.colors if colors is None else colors(cg)
        return (x for x in range(cg.order) if int(col[x]) in vals)

    return SubsetSelector(name or f"color{sorted(vals)}", fn)


def fixed(elements: Iterable[int], name: str = "fixed") -> SubsetSelector:
    s = frozenset(elements)
    return SubsetSelector(name, lambda cg: s)


def complement(s: SubsetSelector) -> SubsetSelector:
    return SubsetSelector(f"~{s.name}", lambda cg: frozenset(range(cg.order)) - s(cg))


def union(a: SubsetSelector, b: SubsetSelector) -> SubsetSelector:
    return SubsetSelector(f"({a.name}|{b.name})", lambda cg: a(cg) | b(cg))


def intersection(a: SubsetSelector, b: SubsetSelector) -> SubsetSelector:
    return SubsetSelector(f"({a.name}&{b.name})", lambda cg: a(cg) & b(cg))


def lift(name: str, op: Callable[..., ElementSet], *parts: SubsetSelector, **kw) -> SubsetSelector:
    """Selector applying a closure operation (below) to the outputs of other selectors."""
    return SubsetSelector(name, lambda cg: op(cg.group, *(p(cg) for p in parts), **kw))


@dataclass(frozen=True)
class GroupExpression:
    selectors: tuple[SubsetSelector, ...]
    relators: tuple[Word, ...] = ()

    def __init__(self, selectors: Sequence[SubsetSelector], relators: Sequence[Word | str] = ()):
        sel = tuple(selectors)
        rel = tuple(parse_word(r) if isinstance(r, str) else r for r in relators)
        for w in rel:
            if w.arity > len(sel):
                raise ValidationError(f"relator {w} uses a variable beyond x{len(sel)}")
        object.__setattr__(self, "selectors", sel)
        object.__setattr__(self, "relators", rel)

    @property
    def arity(self) -> int:
        return len(self.selectors)


def _solution_array(expr: GroupExpression, cg: ColoredGroup, max_arity: int) -> tuple[np.ndarray, list[ElementSet]]:
    t = expr.arity
    if t > max_arity:
        raise ArityTooLarge(f"expression arity {t} exceeds {max_arity}")
    sets = [s(cg) for s in expr.selectors]
    # relators are checked as soon as their last variable is bound
    ready: list[list[Word]] = [[] for _ in range(t + 1)]
    for w in expr.relators:
        ready[w.arity].append(w)
    cur = np.zeros((1, 0), dtype=np.int64)
    for w in ready[0]:
        if _eval_many(cg.group, w, cur)[0] != 0:
            return np.zeros((0, t), dtype=np.int64), sets
    for i in range(t):
        choice = np.fromiter(sorted(sets[i]), dtype=np.int64)
        cur = np.concatenate([np.repeat(cur, len(choice), axis=0),
                              np.tile(choice, len(cur))[:, None]], axis=1)
        for w in ready[i + 1]:
            cur = cur[_eval_many(cg.group, w, cur) == 0]
    return cur, sets


def solutions(expr: GroupExpression, cg: Group | ColoredGroup, max_arity: int = MAX_ARITY) -> set[tuple[int, ...]]:
    arr, _ = _solution_array(expr, as_colored(cg), max_arity)
    return {tuple(r) for r in arr.tolist()}


def count_solutions(expr: GroupExpression, cg: Group | ColoredGroup, max_arity: int = MAX_ARITY) -> int:
    return len(_solution_array(expr, as_colored(cg), max_arity)[0])


def sol_exists(expr: GroupExpression, j: int, cg: Group | ColoredGroup, max_arity: int = MAX_ARITY) -> ElementSet:
    """Coordinate j of some solution."""
    arr, _ = _solution_array(expr, as_colored(cg), max_arity)
    return frozenset(np.unique(arr[:, j]).tolist())


def sol_forall(expr: GroupExpression, j: int, cg: Group | ColoredGroup, max_arity: int = MAX_ARITY) -> ElementSet:
    """Elements g of S_j such that every choice of the other coordinates from
    their selectors gives a solution with g at position j."""
    cg = as_colored(cg)
    arr, sets = _solution_array(expr, cg, max_arity)
    need = 1
    for i, s in enumerate(sets):
        if i != j:
            need *= len(s)
    counts = np.bincount(arr[:, j], minlength=cg.order)
    return frozenset(x for x in sets[j] if counts[x] == need)


def exists_selector(expr: GroupExpression, j: int) -> SubsetSelector:
    return SubsetSelector(f"exists{j}", lambda cg: sol_exists(expr, j, cg))


def forall_selector(expr: GroupExpression, j: int) -> SubsetSelector:
    return SubsetSelector(f"forall{j}", lambda cg: sol_forall(expr, j, cg))


# set-level closure operations

def powers(group: Group, s: Iterable[int], e: int) -> ElementSet:
    return frozenset(group.power(x, e) for x in s)


def product_set(group: Group, s: Iterable[int], e: int) -> ElementSet:
    """All products s_1 ... s_e of e elements of S (e = 0 gives {1})."""
    s = frozenset(s)
    out: ElementSet = frozenset({0})
    for _ in range(e):
        out = group.product_set(out, s)
    return out


def conjugate_set(group: Group, s: Iterable[int], t: Iterable[int]) -> ElementSet:
    """{ t s t^-1 : s in S, t in T }."""
    return group.conjugates_of(s, by=t)


def commutator_subgroup(group: Group, s: Iterable[int], t: Iterable[int]) -> ElementSet:
    return group.commutator_subgroup(s, t)


def centralizer_in(group: Group, s: Iterable[int], t: Iterable[int]) -> ElementSet:
    return frozenset(s) & group.centralizer(t)


def normalizer_in(group: Group, s: Iterable[int], t: Iterable[int]) -> ElementSet:
    return frozenset(s) & group.normalizer(t)

"""Finite groups given by multiplication tables, and their subgroup machinery.

Elements are the integers ``0..n-1`` and ``0`` is always the identity.
Subsets of a group are plain ``frozenset[int]`` objects over the parent's
indices; a subgroup only becomes a standalone :class:`Group` through
:meth:`Group.as_group`, which relabels.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CapExceeded,
    MissingInverse,
    NoIdentityAtZero,
    NotAssociative,
    NotClosed,
    NotNormal,
    ValidationError,
)

ElementSet = frozenset

DEFAULT_NORMAL_CAP = 100_000
DEFAULT_SUBGROUP_CAP = 20_000


def validate(table, name: str = "", check_associativity: bool = True) -> "Group":
    """Check the group axioms on a raw square table and wrap it as a Group.

    Errors name the first violated cell in row-major order.
    """
    try:
        arr = np.asarray(table)
    except Exception as exc:  # ragged nested lists
        raise NotClosed(f"table is not a rectangular integer array: {exc}") from exc
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise NotClosed(f"table must be a non-empty square matrix, got shape {arr.shape}")
    if arr.dtype.kind not in "iu":
        if arr.dtype.kind == "f" and np.all(np.mod(arr, 1) == 0):
            arr = arr.astype(np.int64)
        else:
            raise NotClosed("table entries must be integers")
    n = arr.shape[0]
    bad = np.argwhere((arr < 0) | (arr >= n))
    if len(bad):
        i, j = map(int, bad[0])
        raise NotClosed(f"entry ({i},{j})={int(arr[i, j])} outside [0,{n})", (i, j))
    arr = arr.astype(np.int32)
    ident = np.arange(n, dtype=np.int32)
    if not np.array_equal(arr[0], ident):
        j = int(np.argmax(arr[0] != ident))
        raise NoIdentityAtZero(f"row 0 must be the identity row; cell (0,{j})", (0, j))
    if not np.array_equal(arr[:, 0], ident):
        i = int(np.argmax(arr[:, 0] != ident))
        raise NoIdentityAtZero(f"column 0 must be the identity column; cell ({i},0)", (i, 0))
    srt = np.sort(arr, axis=1)
    rows_bad = np.flatnonzero(np.any(srt != ident, axis=1))
    if len(rows_bad):
        i = int(rows_bad[0])
        j = _first_repeat(arr[i])
        raise NotClosed(f"row {i} is not a permutation (repeat at column {j})", (i, j))
    srt = np.sort(arr, axis=0)
    cols_bad = np.flatnonzero(np.any(srt != ident[:, None], axis=0))
    if len(cols_bad):
        j = int(cols_bad[0])
        i = _first_repeat(arr[:, j])
        raise NotClosed(f"column {j} is not a permutation (repeat at row {i})", (i, j))
    # Latin rows already guarantee a right inverse; checked explicitly for the error contract.
    has_inv = np.any(arr == 0, axis=1)
    if not np.all(has_inv):
        i = int(np.argmin(has_inv))
        raise MissingInverse(f"element {i} has no inverse", (i,))
    if check_associativity:
        _check_associative(arr)
    return Group(arr, name=name)


def _first_repeat(row: np.ndarray) -> int:
    seen = set()
    for j, v in enumerate(row.tolist()):
        if v in seen:
            return j
        seen.add(v)
    return 0


def _check_associative(arr: np.ndarray, chunk_cells: int = 1 << 22) -> None:
    n = arr.shape[0]
    step = max(1, chunk_cells // (n * n))
    for start in range(0, n, step):
        block = arr[start:start + step]  # (b, n): i*j
        left = arr[block]  # (b, n, n): (i*j)*m
        right = block[:, arr]  # (b, n, n): i*(j*m)
        mism = np.argwhere(left != right)
        if len(mism):
            i, j, m = map(int, mism[0])
            i += start
            raise NotAssociative(f"(g{i}*g{j})*g{m} != g{i}*(g{j}*g{m})", (i, j, m))


class Group:
    """A finite group as an order-n multiplication table with identity 0.

    ``table[i, j]`` is the product of element ``i`` with element ``j``. Use
    :func:`validate` for untrusted input; the constructor trusts its caller.
    """

    def __init__(self, table: np.ndarray, name: str = ""):
        table = np.ascontiguousarray(table, dtype=np.int32)
        table.setflags(write=False)
        self.table = table
        self.name = name
        self._rows: list[list[int]] = table.tolist()

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"<Group{label} order={self.order}>"

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def __len__(self) -> int:
        return self.order

    @property
    def elements(self) -> ElementSet:
        return frozenset(range(self.order))

    # -- element arithmetic -------------------------------------------------

    @cached_property
    def inverses(self) -> np.ndarray:
        inv = np.argmin(self.table, axis=1).astype(np.int32)  # the column holding 0
        inv.setflags(write=False)
        return inv

    @cached_property
    def element_orders(self) -> np.ndarray:
        n = self.order
        orders = np.zeros(n, dtype=np.int64)
        cur = np.arange(n)
        done = np.zeros(n, dtype=bool)
        for e in range(1, n + 1):
            hit = (cur == 0) & ~done
            orders[hit] = e
            done |= hit
            if done.all():
                break
            cur = self.table[cur, np.arange(n)]
        orders.setflags(write=False)
        return orders

    def mul(self, g: int, h: int) -> int:
        return self._rows[g][h]

    def inv(self, g: int) -> int:
        return int(self.inverses[g])

    def power(self, g: int, e: int) -> int:
        if e < 0:
            g, e = self.inv(g), -e
        e %= int(self.element_orders[g])
        result, base = 0, g
        while e:
            if e & 1:
                result = self._rows[result][base]
            base = self._rows[base][base]
            e >>= 1
        return result

    def element_order(self, g: int) -> int:
        return int(self.element_orders[g])

    def commutator(self, g: int, h: int) -> int:
        """[g,h] = g h g^-1 h^-1."""
        r = self._rows
        return r[r[r[g][h]][self.inv(g)]][self.inv(h)]

    def conjugate(self, g: int, h: int) -> int:
        """g^h = h g h^-1."""
        r = self._rows
        return r[r[h][g]][self.inv(h)]

    @cached_property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    # -- subsets and subgroups ----------------------------------------------

    def generated_subgroup(self, gens: Iterable[int]) -> ElementSet:
        return frozenset(self._closure(gens))

    def _closure(self, gens: Iterable[int]) -> list[int]:
        gens = sorted({int(g) for g in gens} - {0})
        rows = self._rows
        elems = [0]
        seen = {0}
        i = 0
        while i < len(elems):
            row = rows[elems[i]]
            for g in gens:
                y = row[g]
                if y not in seen:
                    seen.add(y)
                    elems.append(y)
            i += 1
        return elems

    def is_subgroup(self, subset: Iterable[int]) -> bool:
        s = frozenset(subset)
        if 0 not in s:
            return False
        idx = np.fromiter(s, dtype=np.int64)
        prods = self.table[np.ix_(idx, idx)]
        return bool(np.isin(prods, idx).all())

    def conjugates_of(self, subset: Iterable[int], by: Iterable[int] | None = None) -> ElementSet:
        """{ h m h^-1 : m in subset, h in by } (``by`` defaults to the whole group)."""
        m = np.fromiter(set(subset), dtype=np.int64)
        if len(m) == 0:
            return frozenset()
        h = np.arange(self.order) if by is None else np.fromiter(set(by), dtype=np.int64)
        hm = self.table[np.ix_(h, m)]
        conj = self.table[hm, self.inverses[h][:, None]]
        return frozenset(np.unique(conj).tolist())

    def normal_closure(self, subset: Iterable[int]) -> ElementSet:
        return self.generated_subgroup(self.conjugates_of(subset))

    def is_normal(self, subset: Iterable[int]) -> bool:
        s = frozenset(subset)
        return self.is_subgroup(s) and self.conjugates_of(s) == s

    def centralizer(self, subset: Iterable[int]) -> ElementSet:
        m = np.fromiter(set(subset), dtype=np.int64)
        if len(m) == 0:
            return self.elements
        t = self.table
        ok = np.all(t[:, m] == t[m, :].T, axis=1)
        return frozenset(np.flatnonzero(ok).tolist())

    def normalizer(self, subset: Iterable[int]) -> ElementSet:
        s = frozenset(subset)
        m = np.fromiter(s, dtype=np.int64)
        if len(m) == 0:
            return self.elements
        mask = np.zeros(self.order, dtype=bool)
        mask[m] = True
        h = np.arange(self.order)
        conj = self.table[self.table[np.ix_(h, m)], self.inverses[h][:, None]]
        # h normalizes s iff h s h^-1 lands inside s (finite, hence equality)
        ok = np.all(mask[conj], axis=1)
        return frozenset(np.flatnonzero(ok).tolist())

    def center(self) -> ElementSet:
        return self._center

    @cached_property
    def _center(self) -> ElementSet:
        ok = np.all(self.table == self.table.T, axis=1)
        return frozenset(np.flatnonzero(ok).tolist())

    @cached_property
    def centralizer_orders(self) -> np.ndarray:
        t = self.table
        sizes = (t == t.T).sum(axis=1).astype(np.int64)
        sizes.setflags(write=False)
        return sizes

    def product_set(self, a: Iterable[int], b: Iterable[int]) -> ElementSet:
        ai = np.fromiter(set(a), dtype=np.int64)
        bi = np.fromiter(set(b), dtype=np.int64)
        if len(ai) == 0 or len(bi) == 0:
            return frozenset()
        return frozenset(np.unique(self.table[np.ix_(ai, bi)]).tolist())

    def commutator_subgroup(self, a: Iterable[int], b: Iterable[int]) -> ElementSet:
        """[A, B] = < [x, y] : x in A, y in B >."""
        ai = np.fromiter(set(a), dtype=np.int64)
        bi = np.fromiter(set(b), dtype=np.int64)
        if len(ai) == 0 or len(bi) == 0:
            return frozenset({0})
        t, inv = self.table, self.inverses
        xy = t[np.ix_(ai, bi)]
        comm = t[t[xy, inv[ai][:, None]], inv[bi][None, :]]
        return self.generated_subgroup(np.unique(comm).tolist())

    def derived_subgroup(self) -> ElementSet:
        return self._derived

    @cached_property
    def _derived(self) -> ElementSet:
        return self.commutator_subgroup(range(self.order), range(self.order))

    # -- classes and lattices ------------------------------------------------

    @cached_property
    def conjugation_table(self) -> np.ndarray:
        """conj[h, g] = h g h^-1."""
        t = self.table
        c = t[t, self.inverses[:, None]]
        c.setflags(write=False)
        return c

    def conjugacy_classes(self) -> list[ElementSet]:
        return self._classes

    @cached_property
    def _classes(self) -> list[ElementSet]:
        conj = self.conjugation_table
        seen = np.zeros(self.order, dtype=bool)
        classes = []
        for g in range(self.order):
            if not seen[g]:
                cls = np.unique(conj[:, g])
                seen[cls] = True
                classes.append(frozenset(cls.tolist()))
        return classes

    @cached_property
    def class_sizes(self) -> np.ndarray:
        sizes = np.zeros(self.order, dtype=np.int64)
        for cls in self._classes:
            sizes[list(cls)] = len(cls)
        sizes.setflags(write=False)
        return sizes

    def normal_subgroups(self, cap: int = DEFAULT_NORMAL_CAP) -> list[ElementSet]:
        """Every normal subgroup, sorted by (order, sorted members).

        Normal subgroups are joins of normal closures of single classes, so a
        breadth-first search over joins with those closures finds them all.
        """
        cached = self.__dict__.get("_normal_cache")
        if cached is not None:
            if len(cached) > cap:
                raise CapExceeded(f"{len(cached)} normal subgroups exceed cap {cap}")
            return list(cached)
        n = self.order
        t = self.table
        gens = []
        seen_gen = set()
        for cls in self._classes:
            g = min(cls)
            if g == 0:
                continue
            mask = np.zeros(n, dtype=bool)
            mask[self._closure(cls)] = True
            key = mask.tobytes()
            if key not in seen_gen:
                seen_gen.add(key)
                gens.append(mask)
        trivial = np.zeros(n, dtype=bool)
        trivial[0] = True
        found = {trivial.tobytes(): trivial}
        queue = deque([trivial])
        while queue:
            cur = queue.popleft()
            cur_idx = np.flatnonzero(cur)
            for gm in gens:
                if not np.any(gm & ~cur):
                    continue
                joined = np.zeros(n, dtype=bool)
                joined[t[np.ix_(cur_idx, np.flatnonzero(gm))].ravel()] = True
                key = joined.tobytes()
                if key not in found:
                    found[key] = joined
                    if len(found) > cap:
                        raise CapExceeded(f"more than {cap} normal subgroups")
                    queue.append(joined)
        result = [frozenset(np.flatnonzero(m).tolist()) for m in found.values()]
        result.sort(key=lambda s: (len(s), sorted(s)))
        self.__dict__["_normal_cache"] = tuple(result)
        return result

    def subgroups(self, cap: int = DEFAULT_SUBGROUP_CAP) -> list[ElementSet]:
        """Every subgroup, by joining cyclic subgroups breadth-first.

        Meant for small groups (order up to a few dozen); raises CapExceeded
        rather than running away.
        """
        cached = self.__dict__.get("_subgroup_cache")
        if cached is not None:
            if len(cached) > cap:
                raise CapExceeded(f"{len(cached)} subgroups exceed cap {cap}")
            return list(cached)
        cyclic: dict[ElementSet, int] = {}
        for g in range(self.order):
            c = self.generated_subgroup([g])
            cyclic.setdefault(c, g)
        cyc_gens = list(cyclic.values())
        start = frozenset({0})
        found: dict[ElementSet, tuple[int, ...]] = {start: ()}
        queue = deque([start])
        while queue:
            cur = queue.popleft()
            gens = found[cur]
            for g in cyc_gens:
                if g in cur:
                    continue
                nxt = frozenset(self._closure(gens + (g,)))
                if nxt not in found:
                    found[nxt] = gens + (g,)
                    if len(found) > cap:
                        raise CapExceeded(f"more than {cap} subgroups")
                    queue.append(nxt)
        result = sorted(found, key=lambda s: (len(s), sorted(s)))
        self.__dict__["_subgroup_cache"] = tuple(result)
        return result

    # -- quotients and restrictions -------------------------------------------

    def quotient_group(self, normal: Iterable[int]) -> tuple["Group", np.ndarray]:
        """G/N with the identity coset at index 0, plus the element -> coset map."""
        nset = frozenset(normal)
        if not self.is_normal(nset):
            raise NotNormal("quotient requires a normal subgroup")
        n = self.order
        nidx = np.fromiter(sorted(nset), dtype=np.int64)
        coset_map = np.full(n, -1, dtype=np.int64)
        reps = []
        for g in range(n):
            if coset_map[g] < 0:
                coset_map[self.table[g, nidx]] = len(reps)
                reps.append(g)
        reps_arr = np.asarray(reps)
        qtable = coset_map[self.table[np.ix_(reps_arr, reps_arr)]]
        label = f"{self.name}/N" if self.name else ""
        coset_map.setflags(write=False)
        return Group(qtable, name=label), coset_map

    def as_group(self, subgroup: Iterable[int], name: str = "") -> tuple["Group", np.ndarray]:
        """Relabel a subgroup as a standalone Group; returns (group, new->old index map)."""
        elems = np.fromiter(sorted(set(subgroup)), dtype=np.int64)
        if len(elems) == 0 or elems[0] != 0 or not self.is_subgroup(elems.tolist()):
            raise ValidationError("as_group requires a subgroup")
        pos = np.full(self.order, -1, dtype=np.int64)
        pos[elems] = np.arange(len(elems))
        sub = pos[self.table[np.ix_(elems, elems)]]
        return Group(sub, name=name), elems

    def relabel(self, perm: Sequence[int], name: str | None = None) -> "Group":
        """Isomorphic copy where old element ``perm[i]`` becomes element ``i``.

        ``perm[0]`` must be 0.
        """
        perm = np.asarray(perm, dtype=np.int64)
        if perm[0] != 0 or sorted(perm.tolist()) != list(range(self.order)):
            raise ValidationError("relabel needs a permutation fixing 0")
        pos = np.empty_like(perm)
        pos[perm] = np.arange(len(perm))
        return Group(pos[self.table[np.ix_(perm, perm)]], name=self.name if name is None else name)

    # -- summaries ------------------------------------------------------------

    @cached_property
    def order_spectrum(self) -> tuple[int, ...]:
        return tuple(sorted(self.element_orders.tolist()))

    def prime_divisors(self) -> list[int]:
        return prime_factors(self.order)


def prime_factors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def is_pi_number(n: int, primes: Iterable[int]) -> bool:
    for p in primes:
        while n % p == 0:
            n //= p
    return n == 1


def densify(values: Sequence[int] | np.ndarray) -> np.ndarray:
    """Map values to dense integers 0..c-1, preserving their sorted order."""
    _, inv = np.unique(np.asarray(values), return_inverse=True)
    return inv.astype(np.int32).reshape(-1)


@dataclass(frozen=True, eq=False)
class ColoredGroup:
    """A group with an element coloring; colors are dense non-negative integers."""

    group: Group
    colors: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        n = self.group.order
        if self.colors is None:
            colors = np.zeros(n, dtype=np.int32)
        else:
            colors = np.asarray(self.colors)
            if colors.shape != (n,):
                raise ValidationError(f"need {n} colors, got shape {colors.shape}")
            colors = densify(colors)
        colors.setflags(write=False)
        object.__setattr__(self, "colors", colors)

    @property
    def order(self) -> int:
        return self.group.order

    @property
    def name(self) -> str:
        return self.group.name

    def is_uniform(self) -> bool:
        return bool(np.all(self.colors == 0))


def as_colored(g: Group | ColoredGroup) -> ColoredGroup:
    return g if isinstance(g, ColoredGroup) else ColoredGroup(g)


def as_plain(g: Group | ColoredGroup) -> Group:
    return g.group if isinstance(g, ColoredGroup) else g

"""Exact group-theoretic oracles: series, radicals, socle, composition factors.

Everything here works directly on multiplication tables and never consults
WL colorings, so the results serve as ground truth for detectability checks.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceeded, NotNilpotent
from .group import ElementSet, Group, as_plain, is_pi_number, prime_factors
from .isomorphism import is_isomorphic

CATALOG_MATCH_MAX = 64


@dataclass
class SeriesReport:
    terms: list[ElementSet]
    labels: list[str]  # labels[i] names the quotient between terms i and i+1
    stabilization: int  # index of the first term equal to its successor

    @property
    def last(self) -> ElementSet:
        return self.terms[-1]


@dataclass(frozen=True)
class FactorLabel:
    order: int
    abelian: bool
    spectrum: tuple[int, ...]
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass
class CompositionReport:
    factors: list[FactorLabel]
    series: list[ElementSet]  # G = series[0] > series[1] > ... > {1}, in G's labels

    def multiset(self) -> list[str]:
        return sorted(f.name for f in self.factors)


# ------------------------------------------------------------------ labels --

def _signature(g: Group) -> str:
    prof = sorted(zip(g.element_orders.tolist(), g.class_sizes.tolist(), g.centralizer_orders.tolist()))
    digest = hashlib.blake2b(repr(prof).encode(), digest_size=4).hexdigest()
    return f"G{g.order}#{digest}"


@lru_cache(maxsize=4096)
def _label_cached(table_bytes: bytes, n: int) -> str:
    from . import catalog

    g = Group(np.frombuffer(table_bytes, dtype=np.int32).reshape(n, n))
    if n <= CATALOG_MATCH_MAX:
        for name in catalog.names(max_order=n, min_order=n):
            if is_isomorphic(g, catalog.get(name)):
                return name
    return _signature(g)


def isomorphism_label(g: Group) -> str:
    """Catalog name of the isomorphism type when the catalog has it, else a
    structural signature of the form ``G<order>#<digest>``."""
    g = as_plain(g)
    if g.order == 1:
        return "C1"
    return _label_cached(np.ascontiguousarray(g.table, dtype=np.int32).tobytes(), g.order)


def quotient_label(g: Group, upper: Iterable[int], lower: Iterable[int]) -> str:
    """Label of upper/lower for normal subgroups lower <= upper of g."""
    sub, back = g.as_group(upper)
    pos = {int(e): i for i, e in enumerate(back)}
    q, _ = sub.quotient_group([pos[x] for x in lower])
    return isomorphism_label(q)


# ------------------------------------------------------------------ series --

def _is_solvable_set(g: Group, s: ElementSet) -> bool:
    while len(s) > 1:
        nxt = g.commutator_subgroup(s, s)
        if nxt == s:
            return False
        s = nxt
    return True


def is_solvable(g: Group) -> bool:
    return _is_solvable_set(g, g.elements)


def _descending(g: Group, step) -> SeriesReport:
    terms = [g.elements]
    while True:
        nxt = step(terms[-1])
        if nxt == terms[-1]:
            break
        terms.append(nxt)
    labels = [quotient_label(g, a, b) for a, b in zip(terms, terms[1:])]
    return SeriesReport(terms, labels, len(terms) - 1)


def derived_series(g: Group) -> SeriesReport:
    g = as_plain(g)
    return _descending(g, lambda s: g.commutator_subgroup(s, s))


def lower_central(g: Group) -> SeriesReport:
    g = as_plain(g)
    return _descending(g, lambda s: g.commutator_subgroup(s, g.elements))


def upper_central(g: Group) -> SeriesReport:
    """{1} = Z^0 <= Z^1 <= ..., Z^{i+1} the preimage of the center of G/Z^i."""
    g = as_plain(g)
    terms: list[ElementSet] = [frozenset({0})]
    while True:
        q, cmap = g.quotient_group(terms[-1])
        zq = q.center()
        nxt = frozenset(np.flatnonzero(np.isin(cmap, list(zq))).tolist())
        if nxt == terms[-1]:
            break
        terms.append(nxt)
    labels = [quotient_label(g, b, a) for a, b in zip(terms, terms[1:])]
    return SeriesReport(terms, labels, len(terms) - 1)


def nilpotency_class(g: Group) -> int:
    lc = lower_central(g)
    if len(lc.last) != 1:
        raise NotNilpotent(f"lower central series stops at order {len(lc.last)}")
    return lc.stabilization


def is_nilpotent(g: Group) -> bool:
    return len(lower_central(g).last) == 1


def _is_nilpotent_set(g: Group, s: ElementSet) -> bool:
    cur = s
    while len(cur) > 1:
        nxt = g.commutator_subgroup(cur, s)
        if nxt == cur:
            return False
        cur = nxt
    return True


# ---------------------------------------------------------------- radicals --

def solvable_radical(g: Group) -> ElementSet:
    """{ x : <x, y> is solvable for every y }; checked to be a normal solvable subgroup."""
    g = as_plain(g)
    if is_solvable(g):
        return g.elements
    cache: dict[ElementSet, bool] = {}

    def solv(s: ElementSet) -> bool:
        if s not in cache:
            cache[s] = _is_solvable_set(g, s)
        return cache[s]

    out = []
    for x in range(g.order):
        if all(solv(g.generated_subgroup((x, y))) for y in range(g.order)):
            out.append(x)
    r = frozenset(out)
    if not (g.is_subgroup(r) and g.is_normal(r) and _is_solvable_set(g, r)):
        raise AssertionError("solvable radical failed its self-check")
    return r


def _radical_by_closure(g: Group, predicate) -> ElementSet:
    cache: dict[ElementSet, bool] = {}
    members = []
    for x in range(g.order):
        ncl = g.normal_closure((x,))
        if ncl not in cache:
            cache[ncl] = predicate(ncl)
        if cache[ncl]:
            members.append(x)
    return g.generated_subgroup(members)


def pi_radical(g: Group, primes: Iterable[int]) -> ElementSet:
    """O_pi(G): generated by the elements whose normal closure is a pi-group."""
    g = as_plain(g)
    pi = frozenset(primes)
    return _radical_by_closure(g, lambda s: is_pi_number(len(s), pi))


def fitting(g: Group) -> ElementSet:
    g = as_plain(g)
    return _radical_by_closure(g, lambda s: _is_nilpotent_set(g, s))


def fitting_from_sylows(g: Group) -> ElementSet:
    """Fit(G) as the product of O_p(G) over the primes dividing |G|."""
    g = as_plain(g)
    out: ElementSet = frozenset({0})
    for p in prime_factors(g.order):
        out = g.product_set(out, pi_radical(g, [p]))
    return out


def abelian_radical(g: Group) -> ElementSet:
    """Subgroup generated by the elements whose normal closure is abelian.

    It equals the product of all normal abelian subgroups, which need not be
    abelian itself (it is all of D8, for instance).
    """
    g = as_plain(g)
    return _radical_by_closure(g, lambda s: all(g.mul(a, b) == g.mul(b, a) for a in s for b in s))


def normal_abelian_subgroups(g: Group) -> list[ElementSet]:
    g = as_plain(g)
    return [n for n in g.normal_subgroups() if all(g.mul(a, b) == g.mul(b, a) for a in n for b in n)]


def maximal_pi_subgroups(g: Group, primes: Iterable[int]) -> list[ElementSet]:
    g = as_plain(g)
    pi = frozenset(primes)
    subs = [s for s in g.subgroups() if is_pi_number(len(s), pi)]
    return [s for s in subs if not any(len(t) > len(s) and s < t for t in subs)]


def max_pi_intersections(g: Group, primes: Iterable[int], x: int) -> ElementSet:
    """Intersection of all maximal pi-subgroups that contain the pi-element x."""
    g = as_plain(g)
    pi = frozenset(primes)
    if not is_pi_number(int(g.element_orders[x]), pi):
        raise ValueError(f"element {x} is not a pi-element")
    out = g.elements
    for s in maximal_pi_subgroups(g, pi):
        if x in s:
            out &= s
    return out


# ------------------------------------------------------------------- socle --

def minimal_normal_subgroups(g: Group) -> list[ElementSet]:
    g = as_plain(g)
    nontrivial = [n for n in g.normal_subgroups() if len(n) > 1]
    return [n for n in nontrivial if not any(len(m) < len(n) and m < n for m in nontrivial)]


def socle(g: Group) -> tuple[ElementSet, list[ElementSet]]:
    g = as_plain(g)
    mins = minimal_normal_subgroups(g)
    out: ElementSet = frozenset({0})
    for n in mins:
        out = g.product_set(out, n)
    return out, mins


def direct_minimal_normals(g: Group, mins: Sequence[ElementSet] | None = None) -> list[ElementSet]:
    """Greedy sub-list of minimal normal subgroups whose product is direct and
    equals the socle."""
    g = as_plain(g)
    mins = minimal_normal_subgroups(g) if mins is None else mins
    chosen: list[ElementSet] = []
    prod: ElementSet = frozenset({0})
    for n in mins:
        if len(prod & n) == 1:
            chosen.append(n)
            prod = g.product_set(prod, n)
    return chosen


# ------------------------------------------------------------- composition --

def is_simple(g: Group) -> bool:
    g = as_plain(g)
    return g.order > 1 and len(g.normal_subgroups()) == 2


def factor_label(g: Group) -> FactorLabel:
    name = f"C{g.order}" if g.is_abelian else isomorphism_label(g)
    return FactorLabel(g.order, g.is_abelian, g.order_spectrum, name)


def _bitset_key(s: ElementSet) -> tuple[int, ...]:
    return tuple(sorted(s))


def maximal_normal_subgroups(g: Group) -> list[ElementSet]:
    g = as_plain(g)
    proper = [n for n in g.normal_subgroups() if len(n) < g.order]
    return [n for n in proper if not any(len(m) > len(n) and n < m for m in proper)]


def composition_factors(g: Group, rule: str = "largest") -> CompositionReport:
    """Walk down a composition series, emitting each simple factor.

    ``rule`` picks the maximal normal subgroup at every step: ``largest``
    takes the largest order with ties going to the lexicographically least
    member list; ``smallest`` takes the smallest order with ties going to
    the lexicographically greatest list.
    """
    g = as_plain(g)
    if rule not in ("largest", "smallest"):
        raise ValueError("rule must be 'largest' or 'smallest'")
    factors: list[FactorLabel] = []
    series: list[ElementSet] = [g.elements]
    cur, back = g, np.arange(g.order)
    while cur.order > 1:
        cands = maximal_normal_subgroups(cur)
        if rule == "largest":
            n = min(cands, key=lambda s: (-len(s), _bitset_key(s)))
        else:
            n = max(cands, key=lambda s: (-len(s), _bitset_key(s)))
        q, _ = cur.quotient_group(n)
        if not is_simple(q):
            raise AssertionError("composition step produced a non-simple factor")
        factors.append(factor_label(q))
        sub, sub_back = cur.as_group(n)
        back = back[sub_back]
        cur = sub
        series.append(frozenset(back.tolist()))
    return CompositionReport(factors, series)


# ----------------------------------------------------------------- special --

@dataclass
class SpecialFlags:
    simple: bool
    characteristically_simple: bool
    almost_simple: bool
    product_of_simples: bool
    factors: list[tuple[str, ElementSet]] = field(default_factory=list)


def classify_special(g: Group) -> SpecialFlags:
    """Simplicity-type flags.

    A group is a direct product of simple groups exactly when it equals its
    socle; the factors are then a direct sub-list of its minimal normal
    subgroups. It is characteristically simple when those factors are all
    isomorphic, and almost simple when it has a unique minimal normal
    subgroup, non-abelian simple, with trivial centralizer.
    """
    g = as_plain(g)
    simple = is_simple(g)
    soc, mins = socle(g)
    product = g.order > 1 and len(soc) == g.order
    factors: list[tuple[str, ElementSet]] = []
    if product:
        for n in direct_minimal_normals(g, mins):
            factors.append((isomorphism_label(g.as_group(n)[0]), n))
    char_simple = product and len({name for name, _ in factors}) == 1
    almost = False
    if len(mins) == 1:
        t = mins[0]
        tg = g.as_group(t)[0]
        almost = not tg.is_abelian and is_simple(tg) and len(g.centralizer(t)) == 1
    return SpecialFlags(simple, char_simple, almost, product, factors)


def element_order_set(g: Group, d: int) -> ElementSet:
    return frozenset(np.flatnonzero(as_plain(g).element_orders == d).tolist())


def profile(g: Group, select: Sequence[str] | None = None) -> dict:
    """JSON-ready invariant profile; ``select`` items as accepted by the CLI."""
    g = as_plain(g)
    items = list(select) if select else ["center", "derived", "solvable_radical", "fitting",
                                          "abelian_radical", "socle", "factors", "series", "special"]
    out: dict = {"name": g.name, "order": g.order}

    def s(x: Iterable[int]) -> list[int]:
        return sorted(int(v) for v in x)

    for item in items:
        key, _, arg = item.partition(":")
        if key == "center":
            out["center"] = s(g.center())
        elif key == "derived":
            out["derived"] = s(g.derived_subgroup())
        elif key in ("radical", "solvable_radical") and not arg:
            out["solvable_radical"] = s(solvable_radical(g))
        elif key == "radical":
            primes = [int(p) for p in arg.removeprefix("pi=").split(",") if p]
            out[f"pi_radical[{','.join(map(str, primes))}]"] = s(pi_radical(g, primes))
        elif key == "fitting":
            out["fitting"] = s(fitting(g))
        elif key == "abelian_radical":
            out["abelian_radical"] = s(abelian_radical(g))
        elif key == "socle":
            soc, mins = socle(g)
            out["socle"] = s(soc)
            out["minimal_normal"] = [s(m) for m in mins]
        elif key == "factors":
            out["composition_factors"] = composition_factors(g).multiset()
        elif key == "series":
            for name, fn in (("derived_series", derived_series), ("lower_central", lower_central),
                             ("upper_central", upper_central)):
                rep = fn(g)
                out[name] = {"orders": [len(t) for t in rep.terms], "labels": rep.labels}
            try:
                out["nilpotency_class"] = nilpotency_class(g)
            except NotNilpotent:
                out["nilpotency_class"] = None
        elif key == "special":
            f = classify_special(g)
            out["special"] = {"simple": f.simple, "characteristically_simple": f.characteristically_simple,
                              "almost_simple": f.almost_simple, "product_of_simples": f.product_of_simples,
                              "factors": [name for name, _ in f.factors]}
        else:
            raise ValueError(f"unknown invariant {item!r}")
    return out


__all__ = [
    "CapExceeded", "CompositionReport", "FactorLabel", "SeriesReport", "SpecialFlags", "abelian_radical",
    "classify_special", "composition_factors", "derived_series", "fitting", "fitting_from_sylows",
    "is_nilpotent", "is_simple", "is_solvable", "isomorphism_label", "lower_central", "max_pi_intersections",
    "maximal_normal_subgroups", "maximal_pi_subgroups", "minimal_normal_subgroups", "nilpotency_class",
    "normal_abelian_subgroups", "pi_radical", "profile", "socle", "solvable_radical", "upper_central",
]

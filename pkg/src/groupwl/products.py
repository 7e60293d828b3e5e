"""Direct products: splitting elements, the non-commuting graph, non-abelian
components, full elements, direct factorization and component-wise
filtrations of the center.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import AbelianInput, CapExceeded, DecompositionMismatch, ValidationError
from .group import ElementSet, Group, as_plain, prime_factors
from .invariants import isomorphism_label

FACTOR_SEARCH_CAP = 5_000


# --------------------------------------------------------------- splitting --

def _p_part(g: Group, x: int, p: int) -> int:
    """An element generating the Sylow-p part of <x>."""
    o = int(g.element_orders[x])
    while o % p == 0:
        o //= p
    return g.power(x, o)


def splits_abelian(a: Group, x: int) -> bool:
    """Whether <x> is a direct factor of the abelian group a.

    Prime by prime: the p-part x_p splits from the Sylow p-subgroup P iff no
    y in P has |x_p y^p| < |x_p|.
    """
    a = as_plain(a)
    if not a.is_abelian:
        raise ValidationError("splits_abelian needs an abelian group")
    if x == 0:
        return True
    orders = a.element_orders
    for p in prime_factors(int(orders[x])):
        xp = _p_part(a, x, p)
        sylow = [y for y in range(a.order) if _is_p_power(int(orders[y]), p)]
        ox = int(orders[xp])
        for y in sylow:
            if orders[a.mul(xp, a.power(y, p))] < ox:
                return False
    return True


def _is_p_power(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def splits_general(g: Group, z: int) -> bool:
    """Whether <z> is a direct factor of g, for central z.

    z splits iff zG' splits from G/G' and <z> meets G' trivially. Non-central
    elements never split; the identity splits with complement G.
    """
    g = as_plain(g)
    if z == 0:
        return True
    if z not in g.center():
        return False
    d = g.derived_subgroup()
    if len(g.generated_subgroup((z,)) & d) > 1:
        return False
    q, cmap = g.quotient_group(d)
    return splits_abelian(q, int(cmap[z]))


def complement_search(g: Group, z: int) -> ElementSet | None:
    """A normal K with G = <z> x K found by exhaustive scan, or None."""
    g = as_plain(g)
    cyc = g.generated_subgroup((z,))
    for k in g.normal_subgroups():
        if len(k) * len(cyc) == g.order and len(k & cyc) == 1 and len(g.commutator_subgroup(cyc, k)) == 1:
            return k
    return None


def splitting_elements(g: Group) -> ElementSet:
    g = as_plain(g)
    return frozenset(z for z in sorted(g.center()) if splits_general(g, z))


# ---------------------------------------------------------- commuting graph --

@dataclass
class NonCommutingGraph:
    adjacency: np.ndarray  # adjacency[g, h] iff gh != hg

    @property
    def order(self) -> int:
        return len(self.adjacency)

    def components_on(self, subset: Iterable[int]) -> dict[int, int]:
        return components_on(self, subset)


def noncommuting_graph(g: Group) -> NonCommutingGraph:
    t = as_plain(g).table
    adj = t != t.T
    adj.setflags(write=False)
    return NonCommutingGraph(adj)


def components_on(graph: NonCommutingGraph, subset: Iterable[int]) -> dict[int, int]:
    """Connected-component label per vertex of the induced subgraph; labels
    are numbered in order of each component's least element."""
    verts = sorted(set(int(v) for v in subset))
    inside = np.zeros(graph.order, dtype=bool)
    inside[verts] = True
    label: dict[int, int] = {}
    nxt = 0
    for v in verts:
        if v in label:
            continue
        label[v] = nxt
        stack = [v]
        while stack:
            u = stack.pop()
            for w in np.flatnonzero(graph.adjacency[u] & inside).tolist():
                if w not in label:
                    label[w] = nxt
                    stack.append(w)
        nxt += 1
    return label


# -------------------------------------------------------------- components --

@dataclass
class ComponentDecomposition:
    m_set: ElementSet
    trace: list[ElementSet]  # M_1 <= M_2 <= ...
    components: list[ElementSet]  # K_1..K_m
    subgroups: list[ElementSet]  # N_i = <K_i>


def nonabelian_components(g: Group) -> ComponentDecomposition:
    g = as_plain(g)
    if g.is_abelian:
        raise AbelianInput("non-abelian components need a non-abelian group")
    cent = g.centralizer_orders
    center = g.center()
    remaining = np.array([x not in center for x in range(g.order)])
    m: set[int] = set()
    trace: list[ElementSet] = []
    while remaining.any():
        best = cent[remaining].max()
        m |= set(np.flatnonzero(remaining & (cent == best)).tolist())
        trace.append(frozenset(m))
        gen = g.generated_subgroup(m)
        remaining = np.ones(g.order, dtype=bool)
        remaining[list(gen)] = False
    labels = components_on(noncommuting_graph(g), m)
    comps: list[set[int]] = [set() for _ in range(max(labels.values()) + 1)]
    for v, c in labels.items():
        comps[c].add(v)
    components = [frozenset(c) for c in comps]
    return ComponentDecomposition(frozenset(m), trace, components, [g.generated_subgroup(c) for c in components])


def _product(g: Group, sets: Iterable[ElementSet]) -> ElementSet:
    out: ElementSet = frozenset({0})
    for s in sets:
        out = g.product_set(out, s)
    return out


def cx_nx(g: Group, dec: ComponentDecomposition, x: int) -> tuple[ElementSet, ElementSet]:
    """(C_x, N_x): products of the components that x centralizes, resp. does not.

    An empty product is taken to be Z(G), so a central x has N_x = Z(G).
    """
    g = as_plain(g)
    center = g.center()
    commuting, other = [], []
    for n in dec.subgroups:
        (commuting if all(g.mul(x, y) == g.mul(y, x) for y in n) else other).append(n)
    cx = _product(g, commuting) if commuting else center
    nx = _product(g, other) if other else center
    return cx, nx


@dataclass
class FullReport:
    full: bool
    factors: list[int]  # indices into the reference decomposition
    noncommuting: list[int]  # component indices i with [x, N_i] != 1


def component_blocks(g: Group, dec: ComponentDecomposition, factors: Sequence[ElementSet]) -> list[list[int]]:
    """I_j: indices i with N_i inside G_j Z(G), for each direct factor G_j."""
    g = as_plain(g)
    center = g.center()
    blocks: list[list[int]] = []
    for f in factors:
        fz = g.product_set(f, center)
        blocks.append([i for i, n in enumerate(dec.subgroups) if n <= fz])
    return blocks


def is_full(g: Group, x: int, dec: ComponentDecomposition | None = None,
            factors: Sequence[ElementSet] | None = None) -> FullReport:
    """Whether the components x fails to commute with form a union of blocks I_j.

    ``factors`` defaults to the indecomposable factorization computed by
    :func:`direct_factorization`; a central x is full for the empty collection.
    """
    g = as_plain(g)
    dec = dec or nonabelian_components(g)
    factors = factors if factors is not None else direct_factorization(g).factors
    blocks = component_blocks(g, dec, factors)
    bad = [i for i, n in enumerate(dec.subgroups) if any(g.mul(x, y) != g.mul(y, x) for y in n)]
    chosen = [j for j, b in enumerate(blocks) if b and set(b) <= set(bad)]
    covered = sorted(i for j in chosen for i in blocks[j])
    full = covered == bad
    return FullReport(full, chosen if full else [], bad)


# ----------------------------------------------------------- factorization --

@dataclass
class DirectDecomposition:
    factors: list[ElementSet]
    indecomposable: list[bool]
    abelian_factor: ElementSet  # product of the abelian factors (maximal abelian direct factor)
    labels: list[str] = field(default_factory=list)

    def nonabelian_part(self, g: Group) -> ElementSet:
        return _product(as_plain(g), [f for f in self.factors if not _abelian_set(as_plain(g), f)])


def _abelian_set(g: Group, s: ElementSet) -> bool:
    idx = np.fromiter(s, dtype=np.int64)
    sub = g.table[np.ix_(idx, idx)]
    return bool((sub == sub.T).all())


def _split_pair(h: Group, order: str) -> tuple[ElementSet, ElementSet] | None:
    normals = [n for n in h.normal_subgroups() if 1 < len(n) < h.order]
    masks = {n: sum(1 << x for x in n) for n in normals}
    by_size: dict[int, list[ElementSet]] = {}
    for n in normals:
        by_size.setdefault(len(n), []).append(n)
    for lst in by_size.values():
        lst.sort(key=lambda s: tuple(sorted(s)))
    sizes = sorted((s for s in by_size if s * s <= h.order and h.order % s == 0),
                   reverse=(order == "largest"))
    checks = 0
    for s in sizes:
        partners = by_size.get(h.order // s, [])
        for n1 in by_size[s]:
            m1 = masks[n1]
            for n2 in partners:
                checks += 1
                if checks > FACTOR_SEARCH_CAP * 1000:
                    raise CapExceeded("direct factor search exceeded its budget")
                if n2 != n1 and masks[n2] & m1 == 1:
                    return n1, n2
    return None


def direct_factorization(g: Group, order: str = "largest") -> DirectDecomposition:
    """Indecomposable internal direct factors by recursive splitting.

    Each step takes a pair of normal subgroups (N1, N2) with trivial
    intersection and |N1||N2| = |G|, preferring the largest |N1| <= |N2|
    (``order="smallest"`` prefers the smallest), ties broken by the least
    sorted member list.
    """
    g = as_plain(g)
    if order not in ("largest", "smallest"):
        raise ValueError("order must be 'largest' or 'smallest'")
    if len(g.normal_subgroups()) > FACTOR_SEARCH_CAP:
        raise CapExceeded("too many normal subgroups for the factor search")
    out: list[ElementSet] = []

    def rec(h: Group, back: np.ndarray) -> None:
        pair = None if h.order == 1 else _split_pair(h, order)
        if pair is None:
            if h.order > 1:
                out.append(frozenset(back.tolist()))
            return
        for part in pair:
            sub, sb = h.as_group(part)
            rec(sub, back[sb])

    rec(g, np.arange(g.order))
    if not out:
        out = [frozenset({0})]
    out.sort(key=lambda s: (len(s), tuple(sorted(s))))
    ab = [f for f in out if _abelian_set(g, f)]
    labels = [isomorphism_label(g.as_group(f)[0]) for f in out]
    return DirectDecomposition(out, [True] * len(out), _product(g, ab), labels)


def check_direct(g: Group, factors: Sequence[ElementSet]) -> bool:
    """Pairwise commuting normal subgroups, trivial partial intersections, product G."""
    g = as_plain(g)
    prod: ElementSet = frozenset({0})
    for f in factors:
        if not (g.is_subgroup(f) and g.is_normal(f)) or len(prod & f) != 1:
            return False
        prod = g.product_set(prod, f)
    return len(prod) == g.order


# -------------------------------------------------------------- filtration --

@dataclass
class Filtration:
    chain: list[ElementSet]  # {1} = U_0 <= ... <= U_r = Z(G)
    sides: list[str]  # sides[i] in {"L", "R"} for the step U_i -> U_{i+1}
    trace: list[tuple[int, int, int, str, ElementSet]] = field(default_factory=list)  # (p, m, j, "V"/"W", set)


def _side(g: Group, lo: ElementSet, hi: ElementSet, left: ElementSet, right: ElementSet) -> str | None:
    if hi <= g.product_set(lo, left):
        return "L"
    if hi <= g.product_set(lo, right):
        return "R"
    return None


def build_filtration(g: Group, left: ElementSet | None = None, right: ElementSet | None = None) -> Filtration:
    """Component-wise filtration of Z(G) for G = L x R with R the maximal
    abelian direct factor.

    Primes go in increasing order and within a prime the exponent bound p^m
    grows. For each bound the chain climbs through
    V_{j-1} <= W_j <= V_j (j = 1..N, p^N the p-part of |Z(G)|) where
    V_0 = {z in Z_p : |z| < p^m},
    V_j = <z^(p^(N-j)) : |z^(p^(N-j))| <= p^m> V_{j-1},
    W_j = <z^(p^(N-j)) : |z| <= p^(N-j+m), z does not split from G> V_{j-1}.
    Every step is checked to ascend on one side.
    """
    g = as_plain(g)
    if left is None or right is None:
        dec = direct_factorization(g)
        right = dec.abelian_factor
        left = _product(g, [f for f in dec.factors if not _abelian_set(g, f)])
    left, right = frozenset(left), frozenset(right)
    if not check_direct(g, [left, right]):
        raise DecompositionMismatch("L and R do not form a direct decomposition")
    center = sorted(g.center())
    orders = g.element_orders
    splits = {z: splits_general(g, z) for z in center}
    chain: list[ElementSet] = [frozenset({0})]
    trace = []

    def push(s: ElementSet) -> None:
        top = g.generated_subgroup(chain[-1] | s)
        if top != chain[-1]:
            chain.append(top)

    zorder = len(center)
    for p in prime_factors(g.order):
        zp = [z for z in center if _is_p_power(int(orders[z]), p)]
        big_n = 0
        while zorder % p ** (big_n + 1) == 0:
            big_n += 1
        if big_n == 0:
            continue
        top_exp = max(int(round(np.log(orders[z]) / np.log(p))) for z in zp)
        for m in range(1, top_exp + 1):
            v_prev = frozenset(z for z in zp if orders[z] < p ** m)
            trace.append((p, m, 0, "V", v_prev))
            push(v_prev)
            for j in range(1, big_n + 1):
                e = p ** (big_n - j)
                w_gen = {g.power(z, e) for z in zp if orders[z] <= p ** (big_n - j + m) and not splits[z]}
                w = g.generated_subgroup(w_gen | v_prev)
                v_gen = {g.power(z, e) for z in zp if orders[g.power(z, e)] <= p ** m}
                v = g.generated_subgroup(v_gen | v_prev)
                trace.append((p, m, j, "W", w))
                trace.append((p, m, j, "V", v))
                push(w)
                push(v)
                v_prev = v
    if chain[-1] != frozenset(center):
        raise DecompositionMismatch("filtration does not reach the center")
    sides = []
    for lo, hi in zip(chain, chain[1:]):
        side = _side(g, lo, hi, left, right)
        if side is None:
            raise DecompositionMismatch(f"step from order {len(lo)} to {len(hi)} ascends on neither side")
        sides.append(side)
    return Filtration(chain, sides, trace)

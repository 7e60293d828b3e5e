"""Standard families of groups, products, and a few small presentations.

All constructors return validated tables with the identity at index 0.
Product elements are ordered lexicographically on component indices.
"""

from __future__ import annotations

import itertools
import math
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .errors import NotCentral, NotIsomorphism, TooLarge, ValidationError
from .group import Group, validate

MAX_TABLE_ORDER = 1024


def _check_size(n: int) -> None:
    if n > MAX_TABLE_ORDER:
        raise TooLarge(f"order {n} exceeds the table guard {MAX_TABLE_ORDER}")


def make_cyclic(n: int) -> Group:
    if n < 1:
        raise ValueError("n must be positive")
    _check_size(n)
    i = np.arange(n)
    return validate((i[:, None] + i[None, :]) % n, name=f"C{n}")


def make_metacyclic(m: int, n: int, r: int, t: int = 0, name: str = "") -> Group:
    """<a, b | a^m = 1, b^n = a^t, b a b^-1 = a^r>, elements a^i b^j at index i*n + j.

    Needs r^n = 1 and r*t = t modulo m.
    """
    if pow(r, n, m) != 1 % m or (r * t - t) % m:
        raise ValidationError(f"parameters m={m} n={n} r={r} t={t} do not define a group")
    _check_size(m * n)
    i = np.arange(m)[:, None, None, None]
    j = np.arange(n)[None, :, None, None]
    k = np.arange(m)[None, None, :, None]
    l = np.arange(n)[None, None, None, :]
    rpow = np.array([pow(r, e, m) for e in range(n)])
    wrap = (j + l) >= n
    a_exp = (i + k * rpow[j] + t * wrap) % m
    b_exp = (j + l) % n
    table = (a_exp * n + b_exp).reshape(m * n, m * n)
    return validate(table, name=name or f"M({m},{n},{r},{t})")


def make_dihedral(n: int) -> Group:
    """Symmetries of the n-gon, order 2n."""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        g = make_cyclic(2)
        g.name = "D2"
        return g
    return make_metacyclic(n, 2, n - 1, 0, name=f"D{2 * n}")


def make_dicyclic(n: int) -> Group:
    """Dicyclic group of order 4n (generalized quaternion when n is a power of 2)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return make_metacyclic(2 * n, 2, 2 * n - 1, n, name=f"Dic{4 * n}")


def make_quaternion8() -> Group:
    g = make_dicyclic(2)
    g.name = "Q8"
    return g


def make_elementary_abelian(p: int, e: int) -> Group:
    if e < 0:
        raise ValueError("e must be non-negative")
    _check_size(p ** e)
    return make_abelian([p] * e, name=f"C{p}^{e}" if e != 1 else f"C{p}")


def make_abelian(invariants: Sequence[int], name: str = "") -> Group:
    """Direct product of cyclic groups of the given orders."""
    g = make_cyclic(1)
    for m in invariants:
        g = direct_product(g, make_cyclic(m))[0]
    g.name = name or "x".join(f"C{m}" for m in invariants) or "C1"
    return g


def _perm_table(perms: np.ndarray) -> np.ndarray:
    """Table of a permutation group whose rows (sorted, identity first) are perms.

    Product convention: (g h)(x) = g(h(x)).
    """
    size, deg = perms.shape
    weights = deg ** np.arange(deg - 1, -1, -1, dtype=np.int64)
    codes = perms.astype(np.int64) @ weights
    order = np.argsort(codes)
    if not np.array_equal(order, np.arange(size)):
        raise ValueError("permutations must be sorted")
    table = np.empty((size, size), dtype=np.int32)
    step = max(1, (1 << 22) // (size * deg))
    for start in range(0, size, step):
        g = perms[start:start + step]  # (b, deg)
        comp = g[:, perms]  # comp[b, h, x] = g(h(x))
        table[start:start + step] = np.searchsorted(codes, comp.astype(np.int64) @ weights)
    return table


def make_symmetric(m: int) -> Group:
    if m < 1:
        raise ValueError("m must be positive")
    if math.factorial(m) > MAX_TABLE_ORDER:
        raise TooLarge(f"S{m} has order {math.factorial(m)}, above the table guard")
    perms = np.array(list(itertools.permutations(range(m))), dtype=np.int64)
    return validate(_perm_table(perms), name=f"S{m}")


def make_alternating(m: int) -> Group:
    if m < 1:
        raise ValueError("m must be positive")
    if math.factorial(m) // 2 > MAX_TABLE_ORDER:
        raise TooLarge(f"A{m} exceeds the table guard")
    perms = [p for p in itertools.permutations(range(m)) if _parity(p) == 0]
    return validate(_perm_table(np.array(perms, dtype=np.int64)), name=f"A{m}")


def _parity(p: Sequence[int]) -> int:
    inv = sum(1 for a, b in itertools.combinations(p, 2) if a > b)
    return inv % 2


def permutation_group(generators: Iterable[Sequence[int]], name: str = "") -> Group:
    """Group generated by permutations given in image form on 0..d-1."""
    gens = [tuple(g) for g in generators]
    if not gens:
        return make_cyclic(1)
    deg = len(gens[0])
    ident = tuple(range(deg))
    elems = closure_elements(gens, lambda a, b: tuple(a[b[x]] for x in range(deg)), ident)
    perms = np.array(sorted(elems), dtype=np.int64)
    return validate(_perm_table(perms), name=name)


def closure_elements(gens: Sequence[Hashable], mul: Callable, identity: Hashable) -> set:
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def group_from_elements(elements: Iterable[Hashable], mul: Callable, identity: Hashable,
                        name: str = "", key: Callable | None = None) -> Group:
    """Table group over an explicit finite set closed under ``mul``; identity goes first."""
    rest = sorted((e for e in elements if e != identity), key=key)
    elems = [identity] + rest
    _check_size(len(elems))
    pos = {e: i for i, e in enumerate(elems)}
    try:
        table = [[pos[mul(a, b)] for b in elems] for a in elems]
    except KeyError as exc:
        raise ValidationError(f"element set is not closed: {exc}") from exc
    return validate(table, name=name)


def matrix_group(generators: Iterable[Sequence[Sequence[int]]], p: int, name: str = "") -> Group:
    """Group generated by square integer matrices modulo a prime p."""
    gens = [tuple(tuple(int(v) % p for v in row) for row in g) for g in generators]
    d = len(gens[0])
    ident = tuple(tuple(int(i == j) for j in range(d)) for i in range(d))

    def mul(a, b):
        return tuple(
            tuple(sum(a[i][s] * b[s][j] for s in range(d)) % p for j in range(d)) for i in range(d)
        )

    return group_from_elements(closure_elements(gens, mul, ident), mul, ident, name=name)


def direct_product(g: Group, h: Group, name: str = "") -> tuple[Group, np.ndarray, np.ndarray]:
    """G x H with element (a, b) at index a*|H| + b, plus both projection maps."""
    n, m = g.order, h.order
    _check_size(n * m)
    tg = g.table.astype(np.int64)
    th = h.table.astype(np.int64)
    table = (tg[:, None, :, None] * m + th[None, :, None, :]).reshape(n * m, n * m)
    idx = np.arange(n * m)
    label = name or (f"{g.name}x{h.name}" if g.name and h.name else "")
    return Group(table, name=label), idx // m, idx % m


def direct_product_many(groups: Sequence[Group], name: str = "") -> Group:
    out = make_cyclic(1)
    for g in groups:
        out = direct_product(out, g)[0]
    out.name = name or "x".join(g.name for g in groups)
    return out


def central_product(g: Group, h: Group, z1: Iterable[int], z2: Iterable[int],
                    phi: Mapping[int, int] | Sequence[int], name: str = "") -> Group:
    """(G x H) / {(z, phi(z)^-1) : z in Z1} for an isomorphism phi: Z1 -> Z2 of central subgroups.

    ``phi`` maps elements of Z1 to elements of Z2, either as a dict or as a
    sequence aligned with ``sorted(Z1)``.
    """
    z1s, z2s = sorted(set(z1)), sorted(set(z2))
    if not g.is_subgroup(z1s) or not set(z1s) <= g.center():
        raise NotCentral("Z1 must be a central subgroup of G")
    if not h.is_subgroup(z2s) or not set(z2s) <= h.center():
        raise NotCentral("Z2 must be a central subgroup of H")
    if isinstance(phi, Mapping):
        fmap = {int(a): int(b) for a, b in phi.items()}
    else:
        fmap = {a: int(b) for a, b in zip(z1s, phi)}
    if sorted(fmap) != z1s or sorted(set(fmap.values())) != z2s or len(z1s) != len(z2s):
        raise NotIsomorphism("phi must be a bijection Z1 -> Z2")
    for a in z1s:
        for b in z1s:
            if fmap[g.mul(a, b)] != h.mul(fmap[a], fmap[b]):
                raise NotIsomorphism(f"phi is not multiplicative at ({a},{b})")
    prod, _, _ = direct_product(g, h)
    m = h.order
    kernel = [a * m + h.inv(fmap[a]) for a in z1s]
    q, _ = prod.quotient_group(kernel)
    q.name = name or (f"{g.name}o{h.name}" if g.name and h.name else "")
    return q


def semidirect_product(n: Group, h: Group, action: Sequence[Sequence[int]], name: str = "") -> Group:
    """N x| H where ``action[y]`` is the automorphism of N by which y acts.

    Elements (a, y) sit at index a*|H| + y; (a, y)(b, z) = (a * action[y](b), y z).
    """
    act = np.asarray(action, dtype=np.int64)
    nn, nh = n.order, h.order
    _check_size(nn * nh)
    tn, th = n.table.astype(np.int64), h.table.astype(np.int64)
    a = np.arange(nn)[:, None, None, None]
    y = np.arange(nh)[None, :, None, None]
    b = np.arange(nn)[None, None, :, None]
    z = np.arange(nh)[None, None, None, :]
    first = tn[a, act[y, b]]
    second = th[y, z]
    table = (first * nh + second).reshape(nn * nh, nn * nh)
    return validate(table, name=name)


def automorphism_from_images(g: Group, gens: Sequence[int], images: Sequence[int]) -> np.ndarray:
    """Extend generator images to a full map, failing if it is not an automorphism."""
    phi = np.full(g.order, -1, dtype=np.int64)
    phi[0] = 0
    queue = [0]
    i = 0
    while i < len(queue):
        x = queue[i]
        for s, t in zip(gens, images):
            y, fy = g.mul(x, s), g.mul(int(phi[x]), t)
            if phi[y] < 0:
                phi[y] = fy
                queue.append(y)
            elif phi[y] != fy:
                raise NotIsomorphism("images do not define a homomorphism")
        i += 1
    if np.any(phi < 0) or len(set(phi.tolist())) != g.order:
        raise NotIsomorphism("images do not define an automorphism")
    return phi

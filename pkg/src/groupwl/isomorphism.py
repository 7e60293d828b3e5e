"""Exact isomorphism testing between small table groups.

Backtracking over images of a generating set. Candidates for each generator
are restricted to elements with the same (order, centralizer size, class
size) profile, and each partial assignment is checked by closing the
generated subgroup under right multiplication.
"""

from __future__ import annotations

import time
from collections import Counter

import numpy as np

from .errors import Timeout
from .group import Group


def _profiles(g: Group) -> np.ndarray:
    return np.stack([g.element_orders, g.centralizer_orders, g.class_sizes], axis=1)


def _quick_reject(g: Group, h: Group) -> bool:
    if g.order != h.order:
        return True
    if g.is_abelian != h.is_abelian:
        return True
    if len(g.center()) != len(h.center()):
        return True
    pg = Counter(map(tuple, _profiles(g).tolist()))
    ph = Counter(map(tuple, _profiles(h).tolist()))
    return pg != ph


def _choose_generators(g: Group, n_candidates: np.ndarray) -> list[int]:
    """Greedy generating set: repeatedly add the element outside the current
    subgroup with the fewest candidate images (larger order breaks ties)."""
    gens: list[int] = []
    current = {0}
    orders = g.element_orders
    while len(current) < g.order:
        best = min(
            (x for x in range(g.order) if x not in current),
            key=lambda x: (int(n_candidates[x]), -int(orders[x]), x),
        )
        gens.append(best)
        current = set(g.generated_subgroup(gens))
    return gens


def find_isomorphism(g: Group, h: Group, timeout: float | None = None) -> np.ndarray | None:
    """Return an array ``phi`` with ``phi[x]`` the image of x, or None."""
    if _quick_reject(g, h):
        return None
    n = g.order
    if n == 1:
        return np.zeros(1, dtype=np.int64)
    deadline = None if timeout is None else time.monotonic() + timeout

    prof_h: dict[tuple, list[int]] = {}
    for y, p in enumerate(map(tuple, _profiles(h).tolist())):
        prof_h.setdefault(p, []).append(y)
    prof_g = list(map(tuple, _profiles(g).tolist()))
    n_cand = np.array([len(prof_h[p]) for p in prof_g])
    gens = _choose_generators(g, n_cand)
    rg, rh = g.table.tolist(), h.table.tolist()
    steps = [0]

    def extend(images: list[int]) -> np.ndarray | None:
        # Close <gens[:j]> and its image simultaneously, checking every edge.
        j = len(images)
        phi = np.full(n, -1, dtype=np.int64)
        back = np.full(n, -1, dtype=np.int64)
        phi[0] = 0
        back[0] = 0
        queue = [0]
        i = 0
        while i < len(queue):
            x = queue[i]
            px = phi[x]
            rowg, rowh = rg[x], rh[px]
            for t in range(j):
                y = rowg[gens[t]]
                py = rowh[images[t]]
                if phi[y] < 0:
                    if back[py] >= 0:
                        return None
                    phi[y] = py
                    back[py] = y
                    queue.append(y)
                elif phi[y] != py:
                    return None
            i += 1
        return phi

    def search(images: list[int]) -> np.ndarray | None:
        steps[0] += 1
        if deadline is not None and steps[0] % 64 == 0 and time.monotonic() > deadline:
            raise Timeout(f"isomorphism search exceeded {timeout}s")
        phi = extend(images)
        if phi is None:
            return None
        if len(images) == len(gens):
            return phi if np.all(phi >= 0) else None
        x = gens[len(images)]
        used = set(phi[phi >= 0].tolist())
        for y in prof_h[prof_g[x]]:
            if y in used:
                continue
            found = search(images + [y])
            if found is not None:
                return found
        return None

    phi = search([])
    if phi is None:
        return None
    if not np.array_equal(h.table[phi[:, None], phi[None, :]], phi[g.table]):
        raise AssertionError("isomorphism search produced a non-homomorphism")
    return phi


def is_isomorphic(g: Group, h: Group, timeout: float | None = None) -> bool:
    return find_isomorphism(g, h, timeout) is not None


def automorphisms(g: Group, limit: int = 64, seed: int = 0) -> list[np.ndarray]:
    """Up to ``limit`` automorphisms of g (identity first), for sampling."""
    rng = np.random.default_rng(seed)
    out = [np.arange(g.order)]
    seen = {tuple(out[0].tolist())}
    attempts = 0
    while len(out) < limit and attempts < 4 * limit:
        attempts += 1
        perm = np.concatenate([[0], 1 + rng.permutation(g.order - 1)]) if g.order > 1 else np.zeros(1, int)
        shuffled = g.relabel(perm)
        phi = find_isomorphism(g, shuffled)
        if phi is None:
            continue
        auto = perm[phi]  # g -> shuffled -> g
        key = tuple(auto.tolist())
        if key not in seen:
            seen.add(key)
            out.append(auto)
    return out

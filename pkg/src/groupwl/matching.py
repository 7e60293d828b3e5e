"""Bipartite perfect matching by augmenting paths (Kuhn's algorithm).

Vertices are visited in index order, so results are deterministic. The same
source runs compiled under numba or as plain Python when numba is disabled.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .kernels import njit


def _kuhn(adj: np.ndarray, match_right: np.ndarray) -> int:
    """Maximum matching on a boolean adjacency matrix; fills match_right (-1 = free)."""
    nl, nr = adj.shape
    match_right[:] = -1
    size = 0
    seen = np.zeros(nr, dtype=np.bool_)
    stack_u = np.empty(nl + 1, dtype=np.int64)
    stack_v = np.empty(nl + 1, dtype=np.int64)
    via = np.empty(nr, dtype=np.int64)
    for root in range(nl):
        seen[:] = False
        # iterative DFS over alternating paths; stack holds (left vertex, next right to try)
        depth = 0
        stack_u[0] = root
        stack_v[0] = 0
        found = -1
        while depth >= 0:
            u = stack_u[depth]
            v = stack_v[depth]
            advanced = False
            while v < nr:
                if adj[u, v] and not seen[v]:
                    seen[v] = True
                    stack_v[depth] = v + 1
                    via[v] = u
                    w = match_right[v]
                    if w < 0:
                        found = v
                    else:
                        depth += 1
                        stack_u[depth] = w
                        stack_v[depth] = 0
                    advanced = True
                    break
                v += 1
            if found >= 0:
                break
            if not advanced:
                depth -= 1
        if found < 0:
            continue
        # flip the path back to the root
        v = found
        while True:
            u = via[v]
            prev = -1
            for d in range(nr):
                if match_right[d] == u:
                    prev = d
                    break
            match_right[v] = u
            if u == root:
                break
            v = prev
        size += 1
    return size


_kuhn_nb = njit(cache=True)(_kuhn) if kernels.HAVE_NUMBA else _kuhn


def max_matching(adj: np.ndarray) -> tuple[int, np.ndarray]:
    """(matching size, match_right) with match_right[v] the left partner of v or -1."""
    adj = np.ascontiguousarray(adj, dtype=np.bool_)
    match_right = np.empty(adj.shape[1], dtype=np.int64)
    fn = _kuhn_nb if kernels.backend() == "numba" else _kuhn
    size = fn(adj, match_right)
    return int(size), match_right


def has_perfect_matching(adj: np.ndarray) -> bool:
    adj = np.asarray(adj, dtype=bool)
    if adj.shape[0] != adj.shape[1]:
        return False
    if adj.shape[0] == 0:
        return True
    if not adj.any(axis=1).all() or not adj.any(axis=0).all():
        return False
    return max_matching(adj)[0] == adj.shape[0]


def perfect_matching(adj: np.ndarray) -> np.ndarray | None:
    """Left-to-right assignment of a perfect matching, or None."""
    adj = np.asarray(adj, dtype=bool)
    if adj.shape[0] != adj.shape[1]:
        return None
    size, match_right = max_matching(adj)
    if size != adj.shape[0]:
        return None
    left = np.empty(adj.shape[0], dtype=np.int64)
    left[match_right] = np.arange(adj.shape[1])
    return left

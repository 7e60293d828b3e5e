"""k-dimensional Weisfeiler-Leman refinement on colored groups.

Two seedings are supported. Version ``"I"`` colors a tuple by its element
colors, equality pattern and multiplication pattern; Version ``"II"`` by the
colored, ordered isomorphism type of the subgroup it generates. Refinement
then repeatedly replaces each tuple's color with (old color, multiset over x
of the colors of the k tuples obtained by substituting x into one slot).

Joint runs refine several groups of the same order in one shared color
space, so stable colors are directly comparable between groups.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import BudgetExceeded, DimensionTooSmall, NotNormal
from .group import ColoredGroup, Group, as_colored, densify

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 1 << 26
_HASH_MASK = kernels.FULL_MASK  # narrowed only by tests to force collisions
# above this many tuples a refinement round checks its hash classes with a
# second independent hash instead of comparing substitution multisets exactly
EXACT_VERIFY_LIMIT = 1 << 18


def _version(v) -> str:
    s = str(v).upper()
    if s in ("1", "I"):
        return "I"
    if s in ("2", "II"):
        return "II"
    raise ValueError(f"unknown WL version {v!r}")


@dataclass(frozen=True)
class TupleIndexer:
    """Row-major bijection between [0, n**k) and k-tuples over [0, n)."""

    n: int
    k: int

    @property
    def size(self) -> int:
        return self.n ** self.k

    def weights(self) -> np.ndarray:
        return self.n ** np.arange(self.k - 1, -1, -1, dtype=np.int64)

    def encode(self, tup: Sequence[int]) -> int:
        if len(tup) != self.k:
            raise ValueError(f"need a {self.k}-tuple")
        idx = 0
        for g in tup:
            if not 0 <= g < self.n:
                raise ValueError(f"coordinate {g} outside [0,{self.n})")
            idx = idx * self.n + int(g)
        return idx

    def decode(self, idx: int) -> tuple[int, ...]:
        if not 0 <= idx < self.size:
            raise ValueError(f"index {idx} outside [0,{self.size})")
        out = []
        for _ in range(self.k):
            idx, r = divmod(idx, self.n)
            out.append(r)
        return tuple(reversed(out))

    def encode_many(self, tuples: np.ndarray) -> np.ndarray:
        return np.asarray(tuples, dtype=np.int64) @ self.weights()

    def decode_many(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        return (idx[:, None] // self.weights()[None, :]) % self.n

    def padded(self, m: int) -> np.ndarray:
        """Indices of (g_1..g_m, 1, ..., 1) for all m-tuples, in m-tuple order."""
        if not 1 <= m <= self.k:
            raise ValueError(f"m must lie in [1,{self.k}]")
        return np.arange(self.n ** m, dtype=np.int64) * self.n ** (self.k - m)


@dataclass(eq=False)
class Coloring:
    """Colors of all k-tuples of one group (or one group's slice of a joint run)."""

    k: int
    version: str
    n: int
    colors: np.ndarray
    rounds: int = 0
    class_count: int = 0
    history: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.class_count:
            self.class_count = int(len(np.unique(self.colors)))

    @property
    def indexer(self) -> TupleIndexer:
        return TupleIndexer(self.n, self.k)

    def color_of(self, tup: Sequence[int]) -> int:
        return int(self.colors[self.indexer.encode(tup)])

    def histogram(self) -> dict[int, int]:
        vals, counts = np.unique(self.colors, return_counts=True)
        return dict(zip(vals.tolist(), counts.tolist()))


@dataclass(eq=False)
class JointVerdict:
    equivalent: bool
    colorings: list[Coloring]
    first_distinguishing_round: int | None
    rounds: int
    class_count: int
    k: int
    version: str

    @property
    def distinguished(self) -> bool:
        return not self.equivalent


def check_budget(groups: int, n: int, k: int, budget: int | None) -> None:
    if k < 2:
        raise DimensionTooSmall(f"k must be at least 2, got {k}")
    cells = groups * n ** k
    limit = DEFAULT_BUDGET if budget is None else budget
    if cells > limit:
        raise BudgetExceeded(f"{groups} x {n}^{k} = {cells} tuples exceed budget {limit}")


def _dense_rows(cols: list[np.ndarray]) -> np.ndarray:
    """Dense ids of rows given as columns, ordered lexicographically."""
    if len(cols) == 1:
        return densify(cols[0])
    order = np.lexsort(cols[::-1])
    stacked = np.stack([c[order] for c in cols], axis=1)
    change = np.ones(len(order), dtype=bool)
    change[1:] = np.any(stacked[1:] != stacked[:-1], axis=1)
    ids = np.empty(len(order), dtype=np.int32)
    ids[order] = np.cumsum(change) - 1
    return ids


def _stack(cgs: Sequence[ColoredGroup]) -> tuple[np.ndarray, np.ndarray]:
    tables = np.stack([cg.group.table for cg in cgs]).astype(np.int64)
    gammas = np.stack([cg.colors for cg in cgs]).astype(np.int64)
    return tables, gammas


def _initial_I(cgs: Sequence[ColoredGroup], k: int) -> np.ndarray:
    n = cgs[0].order
    tables, gammas = _stack(cgs)
    words = kernels.pattern_I(tables, n, k)
    pat = _dense_rows([words[:, i] for i in range(words.shape[1])])
    del words
    if np.all(gammas == 0):
        return pat
    ncol = int(gammas.max()) + 1
    idx = TupleIndexer(n, k)
    nk = idx.size
    r = len(cgs)
    n_pat = int(pat.max()) + 1
    if n_pat * ncol ** k < (1 << 62):
        code = pat.astype(np.int64)
        for j, wj in enumerate(idx.weights()):
            coord = (np.arange(r * nk, dtype=np.int64) % nk // wj) % n
            block = np.arange(r * nk, dtype=np.int64) // nk
            code = code * ncol + gammas[block, coord]
        return densify(code)
    cols = [pat.astype(np.int64)]
    for j, wj in enumerate(idx.weights()):
        coord = (np.arange(r * nk, dtype=np.int64) % nk // wj) % n
        block = np.arange(r * nk, dtype=np.int64) // nk
        cols.append(gammas[block, coord])
    return _dense_rows(cols)


def _class_starts(keys_sorted: list[np.ndarray]) -> np.ndarray:
    m = len(keys_sorted[0])
    change = np.zeros(m, dtype=bool)
    if m:
        change[0] = True
    for key in keys_sorted:
        change[1:] |= key[1:] != key[:-1]
    return np.append(np.flatnonzero(change), m).astype(np.int64)


def _resolve(order: np.ndarray, starts: np.ndarray, bad: np.ndarray, exact_key) -> np.ndarray:
    """Dense ids over sorted classes; classes holding hash collisions are split exactly.

    ``exact_key(t)`` returns a hashable, totally ordered exact signature of tuple t.
    """
    m = len(order)
    sub = np.zeros(m, dtype=np.int64)  # sub-class index within each hash class
    if bad.any():
        bad_sorted = bad[order]
        for c in range(len(starts) - 1):
            s, e = starts[c], starts[c + 1]
            if not bad_sorted[s:e].any():
                continue
            members = order[s:e]
            keys = [exact_key(int(t)) for t in members]
            distinct = sorted(set(keys))
            pos = {key: i for i, key in enumerate(distinct)}
            sub[s:e] = [pos[key] for key in keys]
            log.debug("hash collision split one class into %d", len(distinct))
    cls = np.repeat(np.arange(len(starts) - 1), np.diff(starts))
    ids_sorted = _dense_rows([cls, sub]) if bad.any() else cls
    ids = np.empty(m, dtype=np.int32)
    ids[order] = ids_sorted
    return ids


def _initial_II(cgs: Sequence[ColoredGroup], k: int) -> np.ndarray:
    n = cgs[0].order
    tables, gammas = _stack(cgs)
    h = kernels.keyhash_II(tables, gammas, n, k) & _HASH_MASK
    order = np.argsort(h, kind="stable")
    starts = _class_starts([h[order]])
    bad = kernels.verify_II(tables, gammas, n, k, order, starts)

    def exact(t: int):
        return tuple(kernels.tuple_keys_II(tables, gammas, n, k, [t])[0].tolist())

    return _resolve(order, starts, bad, exact)


def _refine_round(colors: np.ndarray, n: int, k: int) -> np.ndarray:
    h = kernels.refine_hash(colors, n, k, _HASH_MASK)
    if len(colors) > EXACT_VERIFY_LIMIT:
        # a second independent 64-bit hash stands in for exact verification
        h2 = kernels.refine_hash(colors, n, k, salt=1)
        order = np.lexsort((h2, h, colors))
        starts = _class_starts([colors[order], h[order], h2[order]])
        return _resolve(order, starts, np.zeros(len(colors), dtype=bool), None)
    order = np.lexsort((h, colors))
    starts = _class_starts([colors[order], h[order]])
    bad = kernels.verify_refine(colors, n, k, order, starts)
    c64 = colors.astype(np.int64)

    def exact(t: int):
        vec = kernels.sorted_vectors(c64, [t], n, k)[0]
        return (int(colors[t]), tuple(map(tuple, vec.tolist())))

    return _resolve(order, starts, bad, exact)


def _refine_loop(colors: np.ndarray, n: int, k: int, blocks: int,
                 stop_on_split: bool = False) -> tuple[np.ndarray, int, list[int], int | None]:
    """Refine to stability. Returns (colors, rounds, class-count history, first split round)."""
    count = int(colors.max()) + 1 if len(colors) else 0
    history = [count]
    first_split = None if blocks < 2 or _same_histograms(colors, blocks) else 0
    rounds = 0
    if first_split is not None and stop_on_split:
        return colors, rounds, history, first_split
    while True:
        new = _refine_round(colors, n, k)
        new_count = int(new.max()) + 1
        if new_count == count:
            break
        rounds += 1
        colors, count = new, new_count
        history.append(count)
        log.debug("round %d: %d classes", rounds, count)
        if first_split is None and blocks > 1 and not _same_histograms(colors, blocks):
            first_split = rounds
            if stop_on_split:
                break
    return colors, rounds, history, first_split


def _same_histograms(colors: np.ndarray, blocks: int) -> bool:
    parts = np.split(colors, blocks)
    first = np.bincount(parts[0], minlength=int(colors.max()) + 1)
    return all(np.array_equal(first, np.bincount(p, minlength=len(first))) for p in parts[1:])


def _initial(cgs: Sequence[ColoredGroup], k: int, version: str) -> np.ndarray:
    return _initial_I(cgs, k) if version == "I" else _initial_II(cgs, k)


def initial_coloring_I(cg: Group | ColoredGroup, k: int, budget: int | None = None) -> Coloring:
    cg = as_colored(cg)
    check_budget(1, cg.order, k, budget)
    return Coloring(k, "I", cg.order, _initial_I([cg], k))


def initial_coloring_II(cg: Group | ColoredGroup, k: int, budget: int | None = None) -> Coloring:
    cg = as_colored(cg)
    check_budget(1, cg.order, k, budget)
    return Coloring(k, "II", cg.order, _initial_II([cg], k))


def initial_coloring(cg: Group | ColoredGroup, k: int, version="I", budget: int | None = None) -> Coloring:
    return (initial_coloring_I if _version(version) == "I" else initial_coloring_II)(cg, k, budget)


def refine_to_stable(initial: Coloring, cg: Group | ColoredGroup | None = None,
                     budget: int | None = None) -> Coloring:
    """Refine a coloring until its partition stops changing.

    The group argument is accepted for symmetry with the seeding functions;
    refinement only needs the tuple colors. A coloring that is already
    stable comes back unchanged with ``rounds == 0``.
    """
    check_budget(1, initial.n, initial.k, budget)
    colors, rounds, history, _ = _refine_loop(initial.colors, initial.n, initial.k, 1)
    if rounds == 0:
        colors = initial.colors
    return Coloring(initial.k, initial.version, initial.n, colors, rounds,
                    int(colors.max()) + 1, history)


def stable_coloring(cg: Group | ColoredGroup, k: int, version="I", budget: int | None = None) -> Coloring:
    version = _version(version)
    init = initial_coloring(cg, k, version, budget)
    return refine_to_stable(init, cg, budget)


def joint_refine(cgs: Sequence[Group | ColoredGroup], k: int, version="I",
                 budget: int | None = None, stop_early: bool = False) -> JointVerdict:
    """Refine several groups of equal order in one shared color space."""
    version = _version(version)
    cgs = [as_colored(g) for g in cgs]
    n = cgs[0].order
    if any(cg.order != n for cg in cgs):
        raise ValueError("joint_refine needs groups of equal order; use joint_compare")
    check_budget(len(cgs), n, k, budget)
    colors = _initial(cgs, k, version)
    colors, rounds, history, first = _refine_loop(colors, n, k, len(cgs), stop_early)
    count = int(colors.max()) + 1
    parts = [Coloring(k, version, n, p, rounds, count, history) for p in np.split(colors, len(cgs))]
    return JointVerdict(first is None, parts, first, rounds, count, k, version)


def joint_compare(g: Group | ColoredGroup, h: Group | ColoredGroup, k: int, version="I",
                  budget: int | None = None, stop_early: bool = False) -> JointVerdict:
    version = _version(version)
    g, h = as_colored(g), as_colored(h)
    if g.order != h.order:
        return JointVerdict(False, [], 0, 0, 0, k, version)
    return joint_refine([g, h], k, version, budget, stop_early)


def induced_coloring(c: Coloring, m: int) -> Coloring:
    """Restrict to m-tuples by padding with the identity; colors re-densified."""
    if m == c.k:
        return c
    idx = c.indexer.padded(m)
    return Coloring(m, c.version, c.n, densify(c.colors[idx]), c.rounds)


def element_coloring(c: Coloring) -> np.ndarray:
    """Color of (g, 1, ..., 1) for each element g, in the coloring's own color space.

    Values are not re-densified, so element colors from the parts of one
    joint run stay comparable.
    """
    return np.asarray(c.colors[c.indexer.padded(1)])


def quotient_coloring(cg: Group | ColoredGroup, normal: Iterable[int]) -> tuple[ColoredGroup, np.ndarray]:
    """G/N colored by the multiset of member colors of each coset, plus the coset map."""
    cg = as_colored(cg)
    nset = frozenset(normal)
    if not cg.group.is_normal(nset):
        raise NotNormal("quotient_coloring requires a normal subgroup")
    q, coset_map = cg.group.quotient_group(nset)
    members: list[list[int]] = [[] for _ in range(q.order)]
    for g, c in enumerate(coset_map.tolist()):
        members[c].append(int(cg.colors[g]))
    keys = [tuple(sorted(m)) for m in members]
    distinct = sorted(set(keys))
    pos = {key: i for i, key in enumerate(distinct)}
    return ColoredGroup(q, [pos[key] for key in keys]), coset_map


def is_union_of_classes(element_colors: np.ndarray, subset: Iterable[int]) -> bool:
    mask = np.zeros(len(element_colors), dtype=bool)
    mask[list(subset)] = True
    inside = set(element_colors[mask].tolist())
    outside = set(element_colors[~mask].tolist())
    return inside.isdisjoint(outside)


def is_detected(result: JointVerdict | Coloring | np.ndarray, sg: Iterable[int],
                sh: Iterable[int] | None = None) -> bool:
    """True iff no stable element color occurs both inside and outside the selected sets.

    With a joint verdict of two groups, ``sg`` and ``sh`` select in each; with a
    single coloring (or element-color array) the check is within one group.
    """
    if isinstance(result, JointVerdict):
        if len(result.colorings) != 2 or sh is None:
            raise ValueError("joint form needs a two-group verdict and both subsets")
        cg_, ch_ = (element_coloring(c) for c in result.colorings)
        mg = np.zeros(len(cg_), dtype=bool)
        mg[list(sg)] = True
        mh = np.zeros(len(ch_), dtype=bool)
        mh[list(sh)] = True
        inside = set(cg_[mg].tolist()) | set(ch_[mh].tolist())
        outside = set(cg_[~mg].tolist()) | set(ch_[~mh].tolist())
        return inside.isdisjoint(outside)
    colors = element_coloring(result) if isinstance(result, Coloring) else np.asarray(result)
    ok = is_union_of_classes(colors, sg)
    if sh is not None:
        ok = ok and is_union_of_classes(colors, sh)
    return ok


def partition_of(colors: np.ndarray) -> frozenset[frozenset[int]]:
    """Color classes as a set of index sets (for partition comparisons)."""
    order = np.argsort(colors, kind="stable")
    starts = _class_starts([np.asarray(colors)[order]])
    return frozenset(frozenset(order[s:e].tolist()) for s, e in zip(starts[:-1], starts[1:]))


def refines(fine: np.ndarray, coarse: np.ndarray) -> bool:
    """True iff every class of ``fine`` lies inside one class of ``coarse``."""
    fine = np.asarray(fine)
    coarse = np.asarray(coarse)
    pairs = np.unique(np.stack([fine, coarse], axis=1), axis=0)
    return len(pairs) == len(np.unique(fine))


def same_partition(a: np.ndarray, b: np.ndarray) -> bool:
    return refines(a, b) and refines(b, a)

"""Exact solver for the bijective pebble game on two small colored groups.

A configuration assigns each of the p pebble pairs either nothing or a pair
(g, h). A round: Spoiler lifts pair i, the winning condition is checked on
the other p-1 pairs, Duplicator picks a bijection f: G -> H, Spoiler places
pair i on some (x, f(x)).

Spoiler's winning set is the least fixpoint of

    W(c) = OR_i D_i(c without slot i)
    D_i(r) = cond(r) OR no perfect matching on {(x, y) : (r with slot i = (x, y)) not in W}

since Duplicator survives a lift exactly when some bijection avoids W.
Slots are encoded as 0 for an empty pair and 1 + g*n + h otherwise; a
configuration is the base-(n^2 + 1) number formed by its slots.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels, wl
from .errors import CapExceeded, ValidationError
from .group import ColoredGroup, Group, as_colored, densify
from .kernels import njit
from .matching import _kuhn, _kuhn_nb, has_perfect_matching, perfect_matching

DEFAULT_ORDER_CAP = 12
DEFAULT_PEBBLE_CAP = 4
DEFAULT_STATE_CAP = 20_000_000


@dataclass(frozen=True)
class PebbleConfig:
    """Pebble pairs in slot order; ``None`` marks a pair that is off the board."""

    slots: tuple[tuple[int, int] | None, ...]

    @classmethod
    def empty(cls, pebbles: int) -> "PebbleConfig":
        return cls((None,) * pebbles)

    @classmethod
    def from_tuples(cls, gs: Sequence[int], hs: Sequence[int], pebbles: int) -> "PebbleConfig":
        if len(gs) != len(hs) or len(gs) > pebbles:
            raise ValueError("tuples must have equal length at most the pebble count")
        slots = [(int(a), int(b)) for a, b in zip(gs, hs)]
        return cls(tuple(slots) + (None,) * (pebbles - len(slots)))

    @classmethod
    def parse(cls, text: str, pebbles: int) -> "PebbleConfig":
        """``"g1,h1;g2,h2"``; ``-`` or an empty item leaves a pair off the board."""
        slots: list[tuple[int, int] | None] = []
        for item in (text or "").split(";"):
            item = item.strip()
            if item in ("", "-"):
                slots.append(None)
                continue
            parts = item.split(",")
            if len(parts) != 2:
                raise ValueError(f"bad pebble pair {item!r}")
            slots.append((int(parts[0]), int(parts[1])))
        if text is None or not text.strip():
            slots = []
        if len(slots) > pebbles:
            raise ValueError(f"{len(slots)} pairs given for {pebbles} pebbles")
        return cls(tuple(slots) + (None,) * (pebbles - len(slots)))

    def encode(self, n: int) -> int:
        base = n * n + 1
        idx = 0
        for s in self.slots:
            idx = idx * base + (0 if s is None else 1 + s[0] * n + s[1])
        return idx

    @classmethod
    def decode(cls, idx: int, n: int, pebbles: int) -> "PebbleConfig":
        base = n * n + 1
        digits = []
        for _ in range(pebbles):
            idx, d = divmod(idx, base)
            digits.append(d)
        slots = tuple(None if d == 0 else divmod(d - 1, n) for d in reversed(digits))
        return cls(slots)

    def __str__(self) -> str:
        return ";".join("-" if s is None else f"{s[0]},{s[1]}" for s in self.slots)


@dataclass(eq=False)
class GameResult:
    winner: str
    config: PebbleConfig
    spoiler_wins: np.ndarray = field(repr=False)
    added_in: np.ndarray = field(repr=False)
    witness_pebble: np.ndarray = field(repr=False)
    iterations: int = 0
    states: int = 0
    spoiler_states: int = 0


def _digits(idx: np.ndarray, base: int, count: int) -> np.ndarray:
    out = np.empty((len(idx), count), dtype=np.int64)
    rest = idx.copy()
    for j in range(count - 1, -1, -1):
        out[:, j] = rest % base
        rest //= base
    return out


def winning_condition_table(g: ColoredGroup, h: ColoredGroup, slots: int, version: str) -> np.ndarray:
    """cond[r] for every board r of ``slots`` pebble pairs: has Spoiler already won?

    Version I compares the Version I seed colors and only fires on boards with
    every pair placed; Version II compares Version II seed colors with empty
    pairs read as the identity.
    """
    version = wl._version(version)
    n = g.order
    base = n * n + 1
    count = base ** slots
    if slots == 0:
        return np.zeros(1, dtype=bool)
    seeds = wl._initial([g, h], slots, version)
    col_g, col_h = np.split(seeds, 2)
    dig = _digits(np.arange(count, dtype=np.int64), base, slots)
    empty = dig == 0
    gi = np.where(empty, 0, (dig - 1) // n)
    hi = np.where(empty, 0, (dig - 1) % n)
    weights = n ** np.arange(slots - 1, -1, -1, dtype=np.int64)
    cond = col_g[gi @ weights] != col_h[hi @ weights]
    if version == "I":
        cond &= ~empty.any(axis=1)
    return cond


def winning_condition(g: Group | ColoredGroup, h: Group | ColoredGroup, board: PebbleConfig,
                      version: str) -> bool:
    """Whether Spoiler has already won on a board of remaining pebble pairs."""
    g, h = as_colored(g), as_colored(h)
    if not board.slots:
        return False
    cond = winning_condition_table(g, h, len(board.slots), version)
    return bool(cond[board.encode(g.order)])


def _py_duplicator_fails(W, cond, D, n, p, i, todo):
    base = n * n + 1
    wi = base ** (p - 1 - i)
    adj = np.empty((n, n), dtype=np.bool_)
    match = np.empty(n, dtype=np.int64)
    for r in todo:
        hi, lo = divmod(r, wi)
        c0 = hi * wi * base + lo
        ok = True
        for x in range(n):
            any_edge = False
            for y in range(n):
                e = not W[c0 + (1 + x * n + y) * wi]
                adj[x, y] = e
                any_edge = any_edge or e
            if not any_edge:
                ok = False
                break
        if ok:
            ok = _kuhn(adj, match) == n
        D[r] = not ok


@njit(cache=True)
def _nb_duplicator_fails(W, cond, D, n, p, i, todo):
    base = n * n + 1
    wi = base ** (p - 1 - i)
    adj = np.empty((n, n), dtype=np.bool_)
    match = np.empty(n, dtype=np.int64)
    seen_col = np.empty(n, dtype=np.bool_)
    for r in todo:
        hi = r // wi
        lo = r % wi
        c0 = hi * wi * base + lo
        ok = True
        seen_col[:] = False
        for x in range(n):
            any_edge = False
            for y in range(n):
                e = not W[c0 + (1 + x * n + y) * wi]
                adj[x, y] = e
                if e:
                    any_edge = True
                    seen_col[y] = True
            if not any_edge:
                ok = False
                break
        if ok:
            for y in range(n):
                if not seen_col[y]:
                    ok = False
                    break
        if ok:
            ok = _kuhn_nb(adj, match) == n
        D[r] = not ok



class _Chains:
    """Nested subgroup chains; Duplicator must map each left coset xG_l onto f(x)H_l."""

    def __init__(self, g: Group, h: Group, chain_g: Sequence[Sequence[int]], chain_h: Sequence[Sequence[int]]):
        if len(chain_g) != len(chain_h):
            raise ValidationError("chains must have the same length")
        cg = sorted((frozenset(s) for s in chain_g), key=len, reverse=True)
        ch = sorted((frozenset(s) for s in chain_h), key=len, reverse=True)
        for grp, chain in ((g, cg), (h, ch)):
            for a, b in zip(chain, chain[1:]):
                if not b <= a:
                    raise ValidationError("chain members must be nested")
            for s in chain:
                if not grp.is_subgroup(s):
                    raise ValidationError("chain members must be subgroups")
        self.sizes_match = all(len(a) == len(b) for a, b in zip(cg, ch))
        self.cos_g = [self._cosets(g, s) for s in cg]
        self.cos_h = [self._cosets(h, s) for s in ch]
        self.n = g.order

    @staticmethod
    def _cosets(grp: Group, sub: frozenset) -> np.ndarray:
        sidx = np.fromiter(sorted(sub), dtype=np.int64)
        label = np.full(grp.order, -1, dtype=np.int64)
        nxt = 0
        for x in range(grp.order):
            if label[x] < 0:
                label[grp.table[x, sidx]] = nxt
                nxt += 1
        return label

    def feasible(self, adj: np.ndarray) -> bool:
        if not self.sizes_match:
            return False
        everything = np.arange(self.n)
        return self._rec(0, everything, everything, adj)

    def _rec(self, level: int, a: np.ndarray, b: np.ndarray, adj: np.ndarray) -> bool:
        if level == len(self.cos_g):
            return has_perfect_matching(adj[np.ix_(a, b)])
        la, lb = self.cos_g[level][a], self.cos_h[level][b]
        kids_a = [a[la == v] for v in np.unique(la)]
        kids_b = [b[lb == v] for v in np.unique(lb)]
        if len(kids_a) != len(kids_b):
            return False
        m = np.zeros((len(kids_a), len(kids_b)), dtype=bool)
        for i, ka in enumerate(kids_a):
            for j, kb in enumerate(kids_b):
                m[i, j] = self._rec(level + 1, ka, kb, adj)
        return has_perfect_matching(m)


class GameSolver:
    """Solves every configuration of one game instance at once."""

    def __init__(self, g: Group | ColoredGroup, h: Group | ColoredGroup, pebbles: int, version: str = "II",
                 chains: tuple[Sequence[Sequence[int]], Sequence[Sequence[int]]] | None = None,
                 order_cap: int = DEFAULT_ORDER_CAP, pebble_cap: int = DEFAULT_PEBBLE_CAP,
                 state_cap: int = DEFAULT_STATE_CAP):
        self.g, self.h = as_colored(g), as_colored(h)
        if self.g.order != self.h.order:
            raise ValidationError("pebble games need groups of equal order")
        n = self.g.order
        if n > order_cap:
            raise CapExceeded(f"order {n} exceeds the game cap {order_cap}")
        if not 2 <= pebbles <= pebble_cap:
            raise CapExceeded(f"pebble count must lie in [2,{pebble_cap}], got {pebbles}")
        self.n = n
        self.p = pebbles
        self.version = wl._version(version)
        self.base = n * n + 1
        self.states = self.base ** pebbles
        if self.states > state_cap:
            raise CapExceeded(f"{self.states} configurations exceed the cap {state_cap}")
        self.chains = _Chains(self.g.group, self.h.group, *chains) if chains is not None else None
        self._result: tuple | None = None

    def _reduce_index(self, i: int) -> np.ndarray:
        c = np.arange(self.states, dtype=np.int64)
        wi = self.base ** (self.p - 1 - i)
        return (c // (wi * self.base)) * wi + c % wi

    def solve(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
        if self._result is not None:
            return self._result
        p, n = self.p, self.n
        cond = winning_condition_table(self.g, self.h, p - 1, self.version)
        reduced = self.base ** (p - 1)
        red = [self._reduce_index(i) for i in range(p)]
        D = [cond.copy() for _ in range(p)]
        W = np.zeros(self.states, dtype=bool)
        added = np.full(self.states, -1, dtype=np.int64)
        witness = np.full(self.states, -1, dtype=np.int64)
        it = 0
        while True:
            for i in range(p):
                todo = np.flatnonzero(~D[i]).astype(np.int64)
                if len(todo) == 0:
                    continue
                if self.chains is not None:
                    self._chain_fails(W, D[i], i, todo)
                elif kernels.backend() == "numba":
                    _nb_duplicator_fails(W, cond, D[i], n, p, i, todo)
                else:
                    _py_duplicator_fails(W, cond, D[i], n, p, i, todo)
            new = np.zeros(self.states, dtype=bool)
            for i in range(p):
                hit = D[i][red[i]]
                fresh = hit & ~new & (witness < 0)
                witness[fresh & ~W] = i
                new |= hit
            grown = new & ~W
            if not grown.any():
                break
            added[grown] = it
            W = new
            it += 1
        witness[~W] = -1
        assert reduced == len(D[0])
        self._result = (W, added, witness, it)
        return self._result

    def _chain_fails(self, W, D, i, todo):
        n, base = self.n, self.base
        wi = base ** (self.p - 1 - i)
        xs, ys = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        offs = (1 + xs * n + ys) * wi
        for r in todo.tolist():
            hi, lo = divmod(r, wi)
            c0 = hi * wi * base + lo
            adj = ~W[c0 + offs]
            D[r] = not self.chains.feasible(adj)

    def result(self, cfg: PebbleConfig | None = None) -> GameResult:
        W, added, witness, it = self.solve()
        cfg = cfg or PebbleConfig.empty(self.p)
        if len(cfg.slots) != self.p:
            raise ValueError(f"configuration has {len(cfg.slots)} slots, game has {self.p}")
        idx = cfg.encode(self.n)
        return GameResult("Spoiler" if W[idx] else "Duplicator", cfg, W, added, witness, it,
                          self.states, int(W.sum()))

    def spoiler_wins(self, cfg: PebbleConfig) -> bool:
        W = self.solve()[0]
        return bool(W[cfg.encode(self.n)])

    def duplicator_bijection(self, cfg: PebbleConfig, lifted: int) -> np.ndarray | None:
        """A bijection Duplicator can answer with after ``lifted`` is picked up, if any."""
        W = self.solve()[0]
        n, base = self.n, self.base
        wi = base ** (self.p - 1 - lifted)
        slots = list(cfg.slots)
        slots[lifted] = None
        c0 = PebbleConfig(tuple(slots)).encode(n)
        xs, ys = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        adj = ~W[c0 + (1 + xs * n + ys) * wi]
        return perfect_matching(adj)


def solve_game(g: Group | ColoredGroup, h: Group | ColoredGroup, k: int, version: str = "II",
               cfg: PebbleConfig | None = None, **caps) -> GameResult:
    """Winner of the (k+1)-pebble game from ``cfg`` (default: the empty board)."""
    g, h = as_colored(g), as_colored(h)
    if g.order != h.order:
        raise ValidationError("pebble games need groups of equal order")
    return GameSolver(g, h, k + 1, version, **caps).result(cfg)


def chain_respecting_mode(g: Group | ColoredGroup, h: Group | ColoredGroup,
                          chain_g: Sequence[Sequence[int]], chain_h: Sequence[Sequence[int]],
                          pebbles: int, version: str = "II", **caps) -> GameSolver:
    """A solver whose Duplicator bijections must map xG_l onto f(x)H_l at every chain level."""
    return GameSolver(g, h, pebbles, version, chains=(chain_g, chain_h), **caps)


@dataclass
class EquivalenceReport:
    pairs_checked: int
    mismatches: list[tuple[tuple[int, ...], tuple[int, ...], bool, bool]]
    states: int

    @property
    def holds(self) -> bool:
        return not self.mismatches


def check_game_wl_equivalence(g: Group | ColoredGroup, h: Group | ColoredGroup, k: int, version: str = "II",
                              colors: tuple[np.ndarray, np.ndarray] | None = None,
                              max_mismatches: int = 20, **caps) -> EquivalenceReport:
    """Compare stable k-WL colors with the (k+1)-pebble game on every pair of k-tuples.

    For each (g_bar, h_bar): equal joint stable colors must coincide with a
    Duplicator win from [(g_bar, empty), (h_bar, empty)]. ``colors`` overrides
    the WL colors (for fault injection).
    """
    g, h = as_colored(g), as_colored(h)
    n = g.order
    if colors is None:
        verdict = wl.joint_refine([g, h], k, version)
        col_g, col_h = (c.colors for c in verdict.colorings)
    else:
        col_g, col_h = colors
    solver = GameSolver(g, h, k + 1, version, **caps)
    W = solver.solve()[0]
    nk = n ** k
    base = n * n + 1
    tg = _digits(np.arange(nk, dtype=np.int64), n, k)
    mismatches = []
    for a in range(nk):
        # configuration index of [(g_bar, empty), (h_bar, empty)] for all h_bar at once
        slots = 1 + tg[a][None, :] * n + tg
        idx = (slots @ (base ** np.arange(k, 0, -1, dtype=np.int64)))
        dup = ~W[idx]
        same = col_h == col_g[a]
        diff = np.flatnonzero(dup != same)
        for b in diff[: max(0, max_mismatches - len(mismatches))]:
            mismatches.append((tuple(tg[a].tolist()), tuple(tg[b].tolist()), bool(same[b]), bool(dup[b])))
        if len(mismatches) >= max_mismatches:
            break
    return EquivalenceReport(nk * nk, mismatches, solver.states)


def representative_decomposition(f: Sequence[int], p_classes: Sequence[int],
                                 q_classes: Sequence[int]) -> list[np.ndarray]:
    """Split the domain into m full systems of representatives R_i of P with
    every f(R_i) a full system of representatives of Q.

    ``f`` is a bijection on indices; ``p_classes[a]`` labels the P-class of a
    and ``q_classes[b]`` the Q-class of b. Both partitions must have all
    classes of one common size m. Each element a is an edge between its
    P-class and the Q-class of f(a); that multigraph is m-regular, so it
    splits into m perfect matchings.
    """
    f = np.asarray(f, dtype=np.int64)
    pc = densify(np.asarray(p_classes))
    qc = densify(np.asarray(q_classes))
    size = len(f)
    if sorted(f.tolist()) != list(range(size)):
        raise ValidationError("f must be a bijection")
    pcount = np.bincount(pc)
    qcount = np.bincount(qc)
    if len(set(pcount.tolist())) != 1 or len(set(qcount.tolist())) != 1 or pcount[0] != qcount[0]:
        raise ValidationError("P and Q must be equipartitions with the same class size")
    m = int(pcount[0])
    c = len(pcount)
    remaining = np.ones(size, dtype=bool)
    qf = qc[f]
    systems = []
    for _ in range(m):
        adj = np.zeros((c, c), dtype=bool)
        live = np.flatnonzero(remaining)
        adj[pc[live], qf[live]] = True
        assign = perfect_matching(adj)
        if assign is None:
            raise AssertionError("regular bipartite multigraph without a perfect matching")
        chosen = []
        for pi in range(c):
            cand = live[(pc[live] == pi) & (qf[live] == assign[pi])]
            chosen.append(int(cand[0]))
        chosen_arr = np.array(sorted(chosen), dtype=np.int64)
        remaining[chosen_arr] = False
        systems.append(chosen_arr)
    return systems


def is_representative_system(subset: Sequence[int], classes: Sequence[int]) -> bool:
    labels = np.asarray(classes)[np.asarray(subset, dtype=np.int64)]
    return len(set(labels.tolist())) == len(labels) == len(np.unique(classes))

"""Hot loops of the refinement engine, in numba and in plain numpy.

Both backends compute bit-identical outputs (same hash arithmetic, same exact
patterns), so colorings never depend on which one ran. Set
``GROUPWL_DISABLE_NUMBA=1`` to force numpy, or call :func:`set_backend`.

Tuple layout: a joint run over ``r`` groups of order ``n`` has ``r * n**k``
tuples; tuple ``t`` lives in block ``t // n**k`` and its coordinates are the
base-``n`` digits of ``t % n**k`` (most significant first).
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


U64 = np.uint64
GOLDEN = U64(0x9E3779B97F4A7C15)
M1 = U64(0xBF58476D1CE4E5B9)
M2 = U64(0x94D049BB133111EB)
SEED_SIG = U64(0x13198A2E03707344)
SEED_KEY = U64(0xA4093822299F31D0)
FULL_MASK = U64(0xFFFFFFFFFFFFFFFF)

_backend = "numpy" if (os.environ.get("GROUPWL_DISABLE_NUMBA", "") not in ("", "0") or not HAVE_NUMBA) else "numba"


def backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError("backend must be 'numba' or 'numpy'")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    _backend = name


def vector_multipliers(k: int, salt: int = 0) -> np.ndarray:
    """Odd 64-bit multipliers, one per tuple slot, for hashing substitution vectors."""
    return _np_mix(np.arange(1 + salt * k, k + 1 + salt * k, dtype=np.uint64) * GOLDEN) | U64(1)


def signature_seed(salt: int = 0) -> np.uint64:
    return SEED_SIG if salt == 0 else _np_mix(np.array([SEED_SIG + U64(salt)], dtype=np.uint64))[0]


def pattern_layout(k: int) -> tuple[int, int, int]:
    """(base, digits per word, words) for packing the multiplication pattern."""
    base = k + 1
    per_word = max(1, int(62 / math.log2(base)))
    length = k + k * k
    return base, per_word, -(-length // per_word)


# ---------------------------------------------------------------- numba ----

@njit(cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> U64(30))) * M1
    z = (z ^ (z >> U64(27))) * M2
    return z ^ (z >> U64(31))


@njit(cache=True, inline="always")
def _fold(h, v):
    return _mix((h ^ U64(v)) + GOLDEN)


@njit(cache=True)
def _decode(local, n, k, out):
    for j in range(k - 1, -1, -1):
        out[j] = local % n
        local //= n


@njit(cache=True)
def _nb_pattern_I(tables, n, k, base, per_word, words):
    nk = n ** k
    total = tables.shape[0] * nk
    out = np.zeros((total, words), dtype=np.int64)
    g = np.empty(k, dtype=np.int64)
    for t in range(total):
        b = t // nk
        _decode(t % nk, n, k, g)
        pos = 0
        for i in range(k):
            first = 0
            while g[first] != g[i]:
                first += 1
            out[t, pos // per_word] = out[t, pos // per_word] * base + first
            pos += 1
        for i in range(k):
            for j in range(k):
                p = tables[b, g[i], g[j]]
                m = 0
                while m < k and g[m] != p:
                    m += 1
                out[t, pos // per_word] = out[t, pos // per_word] * base + m
                pos += 1
    return out


@njit(cache=True)
def _nb_bfs(table, g, k, rank, order):
    rank[0] = 0
    order[0] = 0
    s = 1
    i = 0
    while i < s:
        x = order[i]
        for j in range(k):
            y = table[x, g[j]]
            if rank[y] < 0:
                rank[y] = s
                order[s] = y
                s += 1
        i += 1
    return s


@njit(cache=True)
def _nb_key_into(table, gamma, g, k, rank, order, buf):
    s = _nb_bfs(table, g, k, rank, order)
    buf[0] = s
    p = 1
    for r in range(s):
        buf[p] = gamma[order[r]]
        p += 1
    for r in range(s):
        x = order[r]
        for j in range(k):
            buf[p] = rank[table[x, g[j]]]
            p += 1
    for r in range(s):
        rank[order[r]] = -1
    return p


@njit(cache=True)
def _nb_keyhash_II(tables, gammas, n, k):
    nk = n ** k
    total = tables.shape[0] * nk
    out = np.empty(total, dtype=np.uint64)
    g = np.empty(k, dtype=np.int64)
    rank = -np.ones(n, dtype=np.int64)
    order = np.empty(n, dtype=np.int64)
    buf = np.empty(1 + n + n * k, dtype=np.int64)
    for t in range(total):
        b = t // nk
        _decode(t % nk, n, k, g)
        length = _nb_key_into(tables[b], gammas[b], g, k, rank, order, buf)
        h = SEED_KEY
        for p in range(length):
            h = _fold(h, buf[p])
        out[t] = h
    return out


@njit(cache=True)
def _nb_verify_II(tables, gammas, n, k, order_idx, starts):
    nk = n ** k
    bad = np.zeros(order_idx.shape[0], dtype=np.bool_)
    g = np.empty(k, dtype=np.int64)
    rank = -np.ones(n, dtype=np.int64)
    order = np.empty(n, dtype=np.int64)
    rep = np.empty(1 + n + n * k, dtype=np.int64)
    buf = np.empty(1 + n + n * k, dtype=np.int64)
    for c in range(starts.shape[0] - 1):
        s, e = starts[c], starts[c + 1]
        t = order_idx[s]
        _decode(t % nk, n, k, g)
        rlen = _nb_key_into(tables[t // nk], gammas[t // nk], g, k, rank, order, rep)
        for p in range(s + 1, e):
            t = order_idx[p]
            _decode(t % nk, n, k, g)
            blen = _nb_key_into(tables[t // nk], gammas[t // nk], g, k, rank, order, buf)
            same = blen == rlen
            if same:
                for q in range(blen):
                    if buf[q] != rep[q]:
                        same = False
                        break
            if not same:
                bad[t] = True
    return bad


@njit(cache=True)
def _nb_block_hashes(colors, start, n, k, w, g, mult, hv):
    """hv[x, u]: hash of the substitution vector (slot j set to x, for each j) of
    tuple start+u. The n tuples of a block share their first k-1 coordinates,
    so every read below is contiguous."""
    for x in range(n):
        last = U64(np.int64(colors[start + x]) + 1) * mult[k - 1]
        for u in range(n):
            hv[x, u] = last
        for j in range(k - 1):
            seg = start + (x - g[j]) * w[j]
            m = mult[j]
            for u in range(n):
                hv[x, u] += U64(np.int64(colors[seg + u]) + 1) * m
        for u in range(n):
            hv[x, u] = _mix(hv[x, u])


@njit(cache=True, inline="always")
def _nb_component(colors, start, u, x, j, k, w, g):
    if j == k - 1:
        return colors[start + x]
    return colors[start + (x - g[j]) * w[j] + u]


@njit(cache=True)
def _nb_refine_hash(colors, n, k, mask, mult, seed):
    total = colors.shape[0]
    nk = n ** k
    out = np.empty(total, dtype=np.uint64)
    w = np.empty(k, dtype=np.int64)
    for j in range(k):
        w[j] = n ** (k - 1 - j)
    g = np.empty(k, dtype=np.int64)
    hv = np.empty(n, dtype=np.uint64)
    acc = np.empty(n, dtype=np.uint64)
    for start in range(0, total, n):
        _decode(start % nk, n, k, g)
        acc[:] = 0
        for x in range(n):
            last = U64(np.int64(colors[start + x]) + 1) * mult[k - 1]
            for u in range(n):
                hv[u] = last
            for j in range(k - 1):
                seg = start + (x - g[j]) * w[j]
                m = mult[j]
                for u in range(n):
                    hv[u] += U64(np.int64(colors[seg + u]) + 1) * m
            for u in range(n):
                acc[u] += _mix(hv[u])
        for u in range(n):
            out[start + u] = _fold(_fold(seed, np.int64(colors[start + u])), acc[u]) & mask
    return out


@njit(cache=True)
def _nb_verify_refine(colors, n, k, cls, local_of, reps, mult):
    # Exact multiset comparison of each member's substitution vectors with its
    # class representative's, through per-class open-addressing tables keyed
    # by hash but matched on the full vector. A table slot is one packed row
    # (hash, count, vector) so a probe touches a single cache line. Tuples are
    # visited in index order so that color reads are contiguous.
    total = colors.shape[0]
    nk = n ** k
    bad = np.zeros(total, dtype=np.bool_)
    w = np.empty(k, dtype=np.int64)
    for j in range(k):
        w[j] = n ** (k - 1 - j)
    size = 1
    while size < 2 * n:
        size *= 2
    smask = size - 1
    nb = reps.shape[0]
    tab = np.zeros((nb, size, k + 2), dtype=np.int64)  # count 0 marks an empty slot
    g = np.empty(k, dtype=np.int64)
    hv = np.empty((n, n), dtype=np.uint64)
    for b in range(nb):
        t = reps[b]
        start = t - t % n
        u = t - start
        _decode(start % nk, n, k, g)
        _nb_block_hashes(colors, start, n, k, w, g, mult, hv)
        for x in range(n):
            h = np.int64(hv[x, u])
            p = h & smask
            while True:
                if tab[b, p, 1] == 0:
                    tab[b, p, 0] = h
                    tab[b, p, 1] = 1
                    for j in range(k):
                        tab[b, p, 2 + j] = _nb_component(colors, start, u, x, j, k, w, g)
                    break
                if tab[b, p, 0] == h:
                    same = True
                    for j in range(k):
                        if tab[b, p, 2 + j] != _nb_component(colors, start, u, x, j, k, w, g):
                            same = False
                            break
                    if same:
                        tab[b, p, 1] += 1
                        break
                p = (p + 1) & smask
    used = np.zeros((n, size), dtype=np.int64)  # per member: slots consumed so far
    stamp = np.full((n, size), -1, dtype=np.int64)
    active = np.empty(n, dtype=np.int64)  # class slot per member, -1 if skipped
    for start in range(0, total, n):
        todo = False
        for u in range(n):
            b = local_of[cls[start + u]]
            if b >= 0 and reps[b] == start + u:
                b = -1
            active[u] = b
            if b >= 0:
                todo = True
        if not todo:
            continue
        _decode(start % nk, n, k, g)
        _nb_block_hashes(colors, start, n, k, w, g, mult, hv)
        # x outer, u inner: component reads stay contiguous in u
        for x in range(n):
            for u in range(n):
                b = active[u]
                if b < 0:
                    continue
                h = np.int64(hv[x, u])
                p = h & smask
                found = False
                while True:
                    if tab[b, p, 1] == 0:
                        break
                    if tab[b, p, 0] == h:
                        same = True
                        for j in range(k):
                            if tab[b, p, 2 + j] != _nb_component(colors, start, u, x, j, k, w, g):
                                same = False
                                break
                        if same:
                            if stamp[u, p] != start:
                                stamp[u, p] = start
                                used[u, p] = 0
                            used[u, p] += 1
                            found = used[u, p] <= tab[b, p, 1]
                            break
                    p = (p + 1) & smask
                if not found:
                    bad[start + u] = True
                    active[u] = -1
    return bad


# ---------------------------------------------------------------- numpy ----

_CHUNK = 1 << 16


def _np_mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> U64(30))) * M1
    z = (z ^ (z >> U64(27))) * M2
    return z ^ (z >> U64(31))


def _np_fold(h: np.ndarray, v: np.ndarray) -> np.ndarray:
    return _np_mix((h ^ np.asarray(v).astype(np.uint64)) + GOLDEN)


def _np_coords(start: int, stop: int, n: int, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    t = np.arange(start, stop, dtype=np.int64)
    nk = n ** k
    local = t % nk
    g = np.empty((len(t), k), dtype=np.int64)
    for j in range(k - 1, -1, -1):
        g[:, j] = local % n
        local = local // n
    return t, t // nk, g


def _np_pattern_I(tables, n, k, base, per_word, words):
    nk = n ** k
    total = tables.shape[0] * nk
    out = np.zeros((total, words), dtype=np.int64)
    for start in range(0, total, _CHUNK):
        t, b, g = _np_coords(start, min(total, start + _CHUNK), n, k)
        digits = []
        for i in range(k):
            digits.append(np.argmax(g == g[:, i:i + 1], axis=1))
        for i in range(k):
            for j in range(k):
                p = tables[b, g[:, i], g[:, j]]
                hit = g == p[:, None]
                digits.append(np.where(hit.any(axis=1), np.argmax(hit, axis=1), k))
        block = out[start:start + len(t)]
        for pos, d in enumerate(digits):
            wi = pos // per_word
            block[:, wi] = block[:, wi] * base + d
    return out


def _np_keys_II(tables, gammas, n, k, t, b, g):
    """Full Version II keys for the given tuples, padded with -1 to 1+n+n*k."""
    m = len(t)
    rows = np.arange(m)
    rank = np.full((m, n), -1, dtype=np.int64)
    order = np.zeros((m, n), dtype=np.int64)
    rank[:, 0] = 0
    size = np.ones(m, dtype=np.int64)
    for i in range(n):
        live = size > i
        if not live.any():
            break
        x = order[rows, np.minimum(i, n - 1)]
        for j in range(k):
            y = tables[b, x, g[:, j]]
            new = live & (rank[rows, y] < 0)
            idx = rows[new]
            rank[idx, y[new]] = size[new]
            order[idx, size[new]] = y[new]
            size[new] += 1
    keys = np.full((m, 1 + n + n * k), -1, dtype=np.int64)
    keys[:, 0] = size
    r_idx = np.arange(n)
    valid = r_idx[None, :] < size[:, None]
    keys[:, 1:1 + n] = np.where(valid, gammas[b[:, None], order], -1)
    for j in range(k):
        prod = tables[b[:, None], order, g[:, j:j + 1]]
        cay = rank[rows[:, None], prod]
        keys[:, 1 + n + j:1 + n + n * k:k] = np.where(valid, cay, -1)
    return keys, size


def _np_key_hash(keys: np.ndarray, size: np.ndarray, n: int, k: int) -> np.ndarray:
    h = np.full(len(keys), SEED_KEY, dtype=np.uint64)
    h = _np_fold(h, keys[:, 0])
    for r in range(n):
        live = size > r
        h = np.where(live, _np_fold(h, np.maximum(keys[:, 1 + r], 0)), h)
    for r in range(n):
        live = size > r
        for j in range(k):
            col = 1 + n + r * k + j
            h = np.where(live, _np_fold(h, np.maximum(keys[:, col], 0)), h)
    return h


def _np_keyhash_II(tables, gammas, n, k):
    nk = n ** k
    total = tables.shape[0] * nk
    out = np.empty(total, dtype=np.uint64)
    step = max(1, _CHUNK // max(1, n // 8))
    for start in range(0, total, step):
        t, b, g = _np_coords(start, min(total, start + step), n, k)
        keys, size = _np_keys_II(tables, gammas, n, k, t, b, g)
        out[start:start + len(t)] = _np_key_hash(keys, size, n, k)
    return out


def _np_tuple_keys_II(tables, gammas, n, k, tuples):
    nk = n ** k
    t = np.asarray(tuples, dtype=np.int64)
    local = t % nk
    g = np.empty((len(t), k), dtype=np.int64)
    for j in range(k - 1, -1, -1):
        g[:, j] = local % n
        local = local // n
    return _np_keys_II(tables, gammas, n, k, t, t // nk, g)[0]


def _np_verify_II(tables, gammas, n, k, order_idx, starts):
    bad = np.zeros(len(order_idx), dtype=bool)
    cls = np.repeat(np.arange(len(starts) - 1), np.diff(starts))
    rep_of = order_idx[starts[:-1]][cls]
    step = max(1, _CHUNK // max(1, n // 8))
    for s in range(0, len(order_idx), step):
        mem = order_idx[s:s + step]
        reps = rep_of[s:s + step]
        a = _np_tuple_keys_II(tables, gammas, n, k, mem)
        r = _np_tuple_keys_II(tables, gammas, n, k, reps)
        bad[mem] = np.any(a != r, axis=1)
    return bad


def _np_refine_hash(colors, n, k, mask, salt=0):
    total = colors.shape[0]
    out = np.empty(total, dtype=np.uint64)
    w = [n ** (k - 1 - j) for j in range(k)]
    mult = vector_multipliers(k, salt)
    step = max(1, (_CHUNK * 4) // max(1, n // 16))
    for start in range(0, total, step):
        t, _, g = _np_coords(start, min(total, start + step), n, k)
        acc = np.zeros(len(t), dtype=np.uint64)
        base = [t - g[:, j] * w[j] for j in range(k)]
        for x in range(n):
            hv = np.zeros(len(t), dtype=np.uint64)
            for j in range(k):
                hv += (colors[base[j] + x * w[j]].astype(np.int64) + 1).astype(np.uint64) * mult[j]
            acc += _np_mix(hv)
        sig = _np_fold(np.full(len(t), signature_seed(salt), dtype=np.uint64), colors[t])
        out[start:start + len(t)] = _np_fold(sig, acc) & mask
    return out


def _np_sorted_vectors(colors, tuples, n, k):
    t = np.asarray(tuples, dtype=np.int64)
    w = np.array([n ** (k - 1 - j) for j in range(k)], dtype=np.int64)
    nk = n ** k
    local = t % nk
    g = np.empty((len(t), k), dtype=np.int64)
    for j in range(k - 1, -1, -1):
        g[:, j] = local % n
        local = local // n
    x = np.arange(n)
    idx = t[:, None, None] + (x[None, :, None] - g[:, None, :]) * w[None, None, :]
    vec = colors[idx].astype(np.int64)  # (m, n, k)
    order = np.lexsort([vec[:, :, j] for j in range(k - 1, -1, -1)], axis=-1)
    return np.take_along_axis(vec, order[:, :, None], axis=1)


def sorted_vectors(colors: np.ndarray, tuples, n: int, k: int) -> np.ndarray:
    """Lexicographically sorted substitution vectors of each given tuple, shape (m, n, k)."""
    return _np_sorted_vectors(colors, tuples, n, k)


def _np_verify_refine(colors, n, k, order_idx, starts):
    bad = np.zeros(colors.shape[0], dtype=bool)
    sizes = np.diff(starts)
    cls = np.repeat(np.arange(len(starts) - 1), sizes)
    rep_of = order_idx[starts[:-1]][cls]
    step = max(1, _CHUNK // max(1, n // 4))
    for s in range(0, len(order_idx), step):
        mem = order_idx[s:s + step]
        reps = rep_of[s:s + step]
        keep = mem != reps
        if not keep.any():
            continue
        mem, reps = mem[keep], reps[keep]
        a = _np_sorted_vectors(colors, mem, n, k)
        r = _np_sorted_vectors(colors, reps, n, k)
        bad[mem] = np.any(a != r, axis=(1, 2))
    return bad


# ------------------------------------------------------------- dispatch ----

def pattern_I(tables: np.ndarray, n: int, k: int) -> np.ndarray:
    base, per_word, words = pattern_layout(k)
    tables = np.ascontiguousarray(tables, dtype=np.int64)
    if _backend == "numba":
        return _nb_pattern_I(tables, n, k, base, per_word, words)
    return _np_pattern_I(tables, n, k, base, per_word, words)


def keyhash_II(tables: np.ndarray, gammas: np.ndarray, n: int, k: int) -> np.ndarray:
    tables = np.ascontiguousarray(tables, dtype=np.int64)
    gammas = np.ascontiguousarray(gammas, dtype=np.int64)
    if _backend == "numba":
        return _nb_keyhash_II(tables, gammas, n, k)
    return _np_keyhash_II(tables, gammas, n, k)


def verify_II(tables, gammas, n, k, order_idx, starts) -> np.ndarray:
    tables = np.ascontiguousarray(tables, dtype=np.int64)
    gammas = np.ascontiguousarray(gammas, dtype=np.int64)
    order_idx = np.ascontiguousarray(order_idx, dtype=np.int64)
    starts = np.ascontiguousarray(starts, dtype=np.int64)
    if _backend == "numba":
        return _nb_verify_II(tables, gammas, n, k, order_idx, starts)
    return _np_verify_II(tables, gammas, n, k, order_idx, starts)


def tuple_keys_II(tables, gammas, n, k, tuples) -> np.ndarray:
    return _np_tuple_keys_II(np.asarray(tables, dtype=np.int64), np.asarray(gammas, dtype=np.int64),
                             n, k, tuples)


def refine_hash(colors: np.ndarray, n: int, k: int, mask: np.uint64 = FULL_MASK, salt: int = 0) -> np.ndarray:
    """Per-tuple signature of (own color, multiset of substitution vectors).

    Different ``salt`` values give independent hash functions.
    """
    colors = np.ascontiguousarray(colors, dtype=np.int32)
    if _backend == "numba":
        return _nb_refine_hash(colors, n, k, U64(mask), vector_multipliers(k, salt), signature_seed(salt))
    return _np_refine_hash(colors, n, k, U64(mask), salt)


def verify_refine(colors, n, k, order_idx, starts, batch_bytes: int = 1 << 28) -> np.ndarray:
    """Flag tuples whose substitution multiset differs from their class representative's.

    Classes are the runs ``order_idx[starts[c]:starts[c+1]]``; the first member
    of each run is its representative.
    """
    colors = np.ascontiguousarray(colors, dtype=np.int32)
    order_idx = np.ascontiguousarray(order_idx, dtype=np.int64)
    starts = np.ascontiguousarray(starts, dtype=np.int64)
    if _backend == "numpy":
        return _np_verify_refine(colors, n, k, order_idx, starts)
    sizes = np.diff(starts)
    cls = np.empty(len(order_idx), dtype=np.int64)
    cls[order_idx] = np.repeat(np.arange(len(sizes)), sizes)
    multi = np.flatnonzero(sizes > 1)
    per_class = 16 * n * (k + 2)
    batch = max(1, batch_bytes // per_class)
    mult = vector_multipliers(k)
    bad = np.zeros(len(colors), dtype=bool)
    for b0 in range(0, len(multi), batch):
        chosen = multi[b0:b0 + batch]
        local_of = np.full(len(sizes), -1, dtype=np.int64)
        local_of[chosen] = np.arange(len(chosen))
        reps = order_idx[starts[chosen]]
        bad |= _nb_verify_refine(colors, n, k, cls, local_of, reps, mult)
    return bad

"""Built-in catalog of small groups.

Complete up to isomorphism for every order up to 16, plus complete lists for
orders 18, 20, 21, 22, 24, 25, 26, 27, 28 and 30 and a selection of groups of
order 32 to 64. Each entry is built lazily from a constructor.
"""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path
from typing import Callable

from . import constructors as c
from .group import Group
from .io import write_group


def _c(*ns: int) -> Callable[[], Group]:
    return lambda: c.make_abelian(list(ns))


def _x(*parts: Callable[[], Group]) -> Callable[[], Group]:
    return lambda: c.direct_product_many([p() for p in parts])


def _sg16_3() -> Group:
    # (C4 x C2) x| C2 where the C2 sends a -> ab, b -> b
    n = c.make_abelian([4, 2])
    swap = [i * 2 + (i + j) % 2 for i in range(4) for j in range(2)]
    return c.semidirect_product(n, c.make_cyclic(2), [list(range(8)), swap])


def _c3_semi_d8() -> Group:
    # C3 x| D8, rotations of odd exponent invert C3
    d8 = c.make_dihedral(4)
    inv = [0, 2, 1]
    action = [inv if (y // 2) % 2 else [0, 1, 2] for y in range(8)]
    return c.semidirect_product(c.make_cyclic(3), d8, action)


def _generalized_dihedral(invariants: list[int]) -> Group:
    a = c.make_abelian(invariants)
    return c.semidirect_product(a, c.make_cyclic(2), [list(range(a.order)), a.inverses.tolist()])


def _c3sq_semi_c4() -> Group:
    # C4 acting on C3^2 through (x, y) -> (y, -x)
    a = c.make_abelian([3, 3])
    rot = [y * 3 + (-x) % 3 for x in range(3) for y in range(3)]
    acts = [list(range(9))]
    for _ in range(3):
        acts.append([rot[v] for v in acts[-1]])
    return c.semidirect_product(a, c.make_cyclic(4), acts)


def _sl23() -> Group:
    return c.matrix_group([[[1, 1], [0, 1]], [[0, 2], [1, 0]]], 3)


def _gl23() -> Group:
    return c.matrix_group([[[1, 1], [0, 1]], [[0, 2], [1, 0]], [[2, 0], [0, 1]]], 3)


def _heisenberg3() -> Group:
    return c.matrix_group([[[1, 1, 0], [0, 1, 0], [0, 0, 1]], [[1, 0, 0], [0, 1, 1], [0, 0, 1]]], 3)


def _central(g: Callable[[], Group], h: Callable[[], Group]) -> Callable[[], Group]:
    """Central product amalgamating a central involution of each factor."""
    def build() -> Group:
        gg, hh = g(), h()
        zg = next(z for z in sorted(gg.center()) if gg.element_order(z) == 2)
        zh = next(z for z in sorted(hh.center()) if hh.element_order(z) == 2)
        return c.central_product(gg, hh, [0, zg], [0, zh], {0: 0, zg: zh})
    return build


S3 = lambda: c.make_symmetric(3)  # noqa: E731
D8 = lambda: c.make_dihedral(4)  # noqa: E731
Q8 = c.make_quaternion8
A4 = lambda: c.make_alternating(4)  # noqa: E731

# name -> constructor; names are unique, order is the listing order
_ENTRIES: list[tuple[str, Callable[[], Group]]] = [
    ("C1", _c(1)),
    ("C2", _c(2)),
    ("C3", _c(3)),
    ("C4", _c(4)),
    ("C2xC2", _c(2, 2)),
    ("C5", _c(5)),
    ("C6", _c(6)),
    ("S3", S3),
    ("C7", _c(7)),
    ("C8", _c(8)),
    ("C4xC2", _c(4, 2)),
    ("C2^3", _c(2, 2, 2)),
    ("D8", D8),
    ("Q8", Q8),
    ("C9", _c(9)),
    ("C3xC3", _c(3, 3)),
    ("C10", _c(10)),
    ("D10", lambda: c.make_dihedral(5)),
    ("C11", _c(11)),
    ("Dic12", lambda: c.make_metacyclic(3, 4, 2, name="Dic12")),
    ("C12", _c(12)),
    ("A4", A4),
    ("D12", lambda: c.make_dihedral(6)),
    ("C6xC2", _c(6, 2)),
    ("C13", _c(13)),
    ("C14", _c(14)),
    ("D14", lambda: c.make_dihedral(7)),
    ("C15", _c(15)),
    ("C16", _c(16)),
    ("C4xC4", _c(4, 4)),
    ("SG16_3", _sg16_3),
    ("C4:C4", lambda: c.make_metacyclic(4, 4, 3)),
    ("C8xC2", _c(8, 2)),
    ("M16", lambda: c.make_metacyclic(8, 2, 5)),
    ("D16", lambda: c.make_dihedral(8)),
    ("SD16", lambda: c.make_metacyclic(8, 2, 3)),
    ("Q16", lambda: c.make_dicyclic(4)),
    ("C4xC2xC2", _c(4, 2, 2)),
    ("D8xC2", _x(D8, _c(2))),
    ("Q8xC2", _x(Q8, _c(2))),
    ("D8oC4", _central(D8, _c(4))),
    ("C2^4", _c(2, 2, 2, 2)),
    # order 18
    ("D18", lambda: c.make_dihedral(9)),
    ("C18", _c(18)),
    ("C3xS3", _x(_c(3), S3)),
    ("C3^2:C2", lambda: _generalized_dihedral([3, 3])),
    ("C6xC3", _c(6, 3)),
    # order 20
    ("Dic20", lambda: c.make_dicyclic(5)),
    ("C20", _c(20)),
    ("F20", lambda: c.make_metacyclic(5, 4, 2)),
    ("D20", lambda: c.make_dihedral(10)),
    ("C10xC2", _c(10, 2)),
    # order 21, 22
    ("C7:C3", lambda: c.make_metacyclic(7, 3, 2)),
    ("C21", _c(21)),
    ("D22", lambda: c.make_dihedral(11)),
    ("C22", _c(22)),
    # order 24
    ("C3:C8", lambda: c.make_metacyclic(3, 8, 2)),
    ("C24", _c(24)),
    ("SL(2,3)", _sl23),
    ("Dic24", lambda: c.make_dicyclic(6)),
    ("C4xS3", _x(_c(4), S3)),
    ("D24", lambda: c.make_dihedral(12)),
    ("C2xDic12", _x(_c(2), lambda: c.make_metacyclic(3, 4, 2))),
    ("C3:D8", _c3_semi_d8),
    ("C12xC2", _c(12, 2)),
    ("C3xD8", _x(_c(3), D8)),
    ("C3xQ8", _x(_c(3), Q8)),
    ("S4", lambda: c.make_symmetric(4)),
    ("C2xA4", _x(_c(2), A4)),
    ("C2^2xS3", _x(_c(2, 2), S3)),
    ("C6xC2^2", _c(6, 2, 2)),
    # order 25, 26
    ("C25", _c(25)),
    ("C5xC5", _c(5, 5)),
    ("D26", lambda: c.make_dihedral(13)),
    ("C26", _c(26)),
    # order 27
    ("C27", _c(27)),
    ("C9xC3", _c(9, 3)),
    ("Heis3", _heisenberg3),
    ("C9:C3", lambda: c.make_metacyclic(9, 3, 4)),
    ("C3^3", _c(3, 3, 3)),
    # order 28
    ("Dic28", lambda: c.make_dicyclic(7)),
    ("C28", _c(28)),
    ("D28", lambda: c.make_dihedral(14)),
    ("C14xC2", _c(14, 2)),
    # order 30
    ("C5xS3", _x(_c(5), S3)),
    ("C3xD10", _x(_c(3), lambda: c.make_dihedral(5))),
    ("D30", lambda: c.make_dihedral(15)),
    ("C30", _c(30)),
    # order 32 (selection)
    ("C32", _c(32)),
    ("C2^5", _c(2, 2, 2, 2, 2)),
    ("D32", lambda: c.make_dihedral(16)),
    ("Q32", lambda: c.make_dicyclic(8)),
    ("SD32", lambda: c.make_metacyclic(16, 2, 7)),
    ("M32", lambda: c.make_metacyclic(16, 2, 9)),
    ("D8xC4", _x(D8, _c(4))),
    ("Q8xC4", _x(Q8, _c(4))),
    ("D8xC2^2", _x(D8, _c(2, 2))),
    ("D8oD8", _central(D8, D8)),
    ("D8oQ8", _central(D8, Q8)),
    # order 36 (selection)
    ("S3xS3", _x(S3, S3)),
    ("C6xC6", _c(6, 6)),
    ("C3xA4", _x(_c(3), A4)),
    ("C3^2:C4", _c3sq_semi_c4),
    ("C6xS3", _x(_c(6), S3)),
    # order 40, 42 (selection)
    ("C2xF20", _x(_c(2), lambda: c.make_metacyclic(5, 4, 2))),
    ("C5xD8", _x(_c(5), D8)),
    ("F42", lambda: c.make_metacyclic(7, 6, 3)),
    ("C7xS3", _x(_c(7), S3)),
    # order 48 (selection)
    ("GL(2,3)", _gl23),
    ("C2xS4", _x(_c(2), lambda: c.make_symmetric(4))),
    ("C2xSL(2,3)", _x(_c(2), _sl23)),
    ("C4xA4", _x(_c(4), A4)),
    # order 60 (selection)
    ("A5", lambda: c.make_alternating(5)),
    ("C60", _c(60)),
    ("C5xA4", _x(_c(5), A4)),
    ("S3xD10", _x(S3, lambda: c.make_dihedral(5))),
    # order 64 (selection)
    ("C64", _c(64)),
    ("C2^6", _c(2, 2, 2, 2, 2, 2)),
    ("D8xD8", _x(D8, D8)),
    ("Q8xQ8", _x(Q8, Q8)),
    ("D8xQ8", _x(D8, Q8)),
]

_BY_NAME = dict(_ENTRIES)


@lru_cache(maxsize=None)
def get(name: str) -> Group:
    g = _BY_NAME[name]()
    g.name = name
    return g


def names(max_order: int | None = None, min_order: int = 1) -> list[str]:
    out = [n for n, _ in _ENTRIES]
    return [n for n in out if min_order <= get(n).order <= (max_order or 10**9)]


def groups(max_order: int | None = None, min_order: int = 1) -> list[Group]:
    return [get(n) for n in names(max_order, min_order)]


def same_order_pairs(max_order: int, min_order: int = 1) -> list[tuple[Group, Group]]:
    gs = groups(max_order, min_order)
    return [(a, b) for i, a in enumerate(gs) for b in gs[i + 1:] if a.order == b.order]


def export(directory: str | Path, max_order: int | None = None, fmt: str = "mt") -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, name in enumerate(names(max_order)):
        g = get(name)
        safe = name.replace(":", "_").replace("^", "e").replace("(", "").replace(")", "").replace(",", "_")
        path = directory / f"{g.order:03d}_{i:03d}_{safe}.{fmt}"
        write_group(g, path)
        paths.append(path)
    return paths

"""Command-line interface: ``groupwl <command> ...``.

Commands: make, refine, compare, game, invariants, decompose, suite.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import catalog, constructors as c, harness, invariants as inv, pebble, products, wl
from .errors import GroupWLError
from .io import parse_group, write_group

EXIT_DISTINGUISHED = 3

FAMILIES = {
    "cyclic": (c.make_cyclic, 1),
    "dihedral": (c.make_dihedral, 1),
    "dicyclic": (c.make_dicyclic, 1),
    "quaternion8": (lambda: c.make_quaternion8(), 0),
    "symmetric": (c.make_symmetric, 1),
    "alternating": (c.make_alternating, 1),
    "elementary-abelian": (c.make_elementary_abelian, 2),
}


def _emit(doc, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _sets(sets) -> list[list[int]]:
    return [sorted(int(x) for x in s) for s in sets]


# ------------------------------------------------------------------- make --

def cmd_make(a: argparse.Namespace) -> int:
    fam = a.family
    if fam == "catalog":
        if a.name:
            g = catalog.get(a.name)
            write_group(g, a.out)
            print(f"wrote {g.name} (order {g.order}) to {a.out}")
        else:
            paths = catalog.export(a.out, a.max_order, a.format)
            print(f"exported {len(paths)} groups to {a.out}")
        return 0
    params = [int(p) for p in a.params]
    if fam == "abelian":
        g = c.make_abelian(params)
    elif fam == "product":
        g = c.direct_product_many([parse_group(p).group for p in a.files])
    elif fam in FAMILIES:
        fn, arity = FAMILIES[fam]
        if len(params) != arity:
            raise SystemExit(f"{fam} takes {arity} integer parameter(s)")
        g = fn(*params)
    else:
        raise SystemExit(f"unknown family {fam!r}")
    write_group(g, a.out)
    print(f"wrote order-{g.order} group to {a.out}")
    return 0


# ---------------------------------------------------------- refine/compare --

def _coloring_doc(col: wl.Coloring) -> dict:
    return {"k": col.k, "version": col.version, "rounds": col.rounds, "classCount": col.class_count,
            "elementColors": wl.element_coloring(col).tolist()}


def cmd_refine(a: argparse.Namespace) -> int:
    cg = parse_group(a.group)
    col = wl.stable_coloring(cg, a.k, a.version, a.budget)
    doc = _coloring_doc(col)
    if a.tuples:
        doc["tupleColors"] = col.colors.tolist()
    _emit(doc, a.out)
    return 0


def cmd_compare(a: argparse.Namespace) -> int:
    g, h = parse_group(a.a), parse_group(a.b)
    v = wl.joint_compare(g, h, a.k, a.version, a.budget)
    doc = {"k": a.k, "version": wl._version(a.version), "rounds": v.rounds, "classCount": v.class_count,
           "verdict": "equivalent" if v.equivalent else "distinguished",
           "firstDistinguishingRound": v.first_distinguishing_round}
    if v.colorings:
        doc["elementColors"] = [wl.element_coloring(col).tolist() for col in v.colorings]
    _emit(doc, a.out)
    if not v.equivalent:
        print(f"distinguished in round {v.first_distinguishing_round}", file=sys.stderr)
    return 0 if v.equivalent else EXIT_DISTINGUISHED


# ------------------------------------------------------------------- game --

def cmd_game(a: argparse.Namespace) -> int:
    g, h = parse_group(a.a), parse_group(a.b)
    chains = None
    if a.chain:
        raw = json.loads(Path(a.chain).read_text())
        chains = (raw["G"], raw["H"])
    solver = pebble.GameSolver(g, h, a.pebbles, a.version, chains=chains,
                               order_cap=a.order_cap, pebble_cap=a.pebble_cap)
    cfg = pebble.PebbleConfig.parse(a.config or "", a.pebbles)
    res = solver.result(cfg)
    print(f"winner: {res.winner}")
    print(f"configuration: {res.config}")
    print(f"states: {res.states} spoiler: {res.spoiler_states} iterations: {res.iterations}")
    return 0


# ------------------------------------------------------------- invariants --

def cmd_invariants(a: argparse.Namespace) -> int:
    cg = parse_group(a.group)
    select = None if a.all or not a.select else _split_select(a.select)
    _emit(inv.profile(cg.group, select), a.out)
    return 0


def _split_select(text: str) -> list[str]:
    """Split on commas, keeping ``radical:pi=2,3`` together."""
    out: list[str] = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok.isdigit() and out and out[-1].startswith("radical:"):
            out[-1] += "," + tok
        elif tok:
            out.append(tok)
    return out


# -------------------------------------------------------------- decompose --

def cmd_decompose(a: argparse.Namespace) -> int:
    g = parse_group(a.group).group
    doc: dict = {"name": g.name, "order": g.order}
    everything = not (a.components or a.factors or a.filtration)
    if a.factors or everything:
        d = products.direct_factorization(g)
        doc["factors"] = [{"elements": sorted(f), "label": lab, "table": g.as_group(f)[0].table.tolist()}
                          for f, lab in zip(d.factors, d.labels)]
        doc["abelianFactor"] = sorted(d.abelian_factor)
    if a.components or everything:
        if g.is_abelian:
            doc["components"] = None
        else:
            cd = products.nonabelian_components(g)
            doc["components"] = {"M": sorted(cd.m_set), "trace": _sets(cd.trace),
                                 "K": _sets(cd.components), "N": _sets(cd.subgroups)}
    if a.filtration or everything:
        f = products.build_filtration(g)
        doc["filtration"] = {"chain": _sets(f.chain), "sides": f.sides}
    _emit(doc, a.out)
    return 0


# ------------------------------------------------------------------ suite --

def cmd_suite(a: argparse.Namespace) -> int:
    cfg = harness.SuiteConfig.from_json(a.config) if a.config else harness.SuiteConfig()
    if a.dir:
        cfg.catalog = a.dir
    if a.out:
        cfg.out = a.out
    if a.max_order:
        cfg.max_order = a.max_order
    if a.pairs:
        cfg.pairs = True
    doc, code = harness.run_suite(cfg)
    summary = doc.get("summary", {})
    for row, counts in summary.get("rows", {}).items():
        print(f"{row:28s} pass {counts['pass']:4d} fail {counts['fail']:4d}")
    for f in summary.get("failures", []):
        print(f"FAIL {f}")
    if "error" in doc:
        print(f"error: {doc['error']}", file=sys.stderr)
    return code


# ------------------------------------------------------------------- main --

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="groupwl", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("make", help="build a group table or export the built-in catalog")
    m.add_argument("family", help="cyclic, dihedral, dicyclic, quaternion8, symmetric, alternating, "
                                  "elementary-abelian, abelian, product or catalog")
    m.add_argument("params", nargs="*", help="integer parameters of the family")
    m.add_argument("--out", "-o", required=True, help="output file (or directory for a catalog export)")
    m.add_argument("--name", help="catalog group name (family 'catalog')")
    m.add_argument("--files", nargs="*", default=[], help="factor files (family 'product')")
    m.add_argument("--max-order", type=int, default=None)
    m.add_argument("--format", choices=["mt", "json"], default="mt")
    m.set_defaults(fn=cmd_make)

    r = sub.add_parser("refine", help="stable k-WL coloring of one group")
    r.add_argument("--k", type=int, required=True)
    r.add_argument("--version", choices=["I", "II"], default="I")
    r.add_argument("--group", required=True)
    r.add_argument("--out")
    r.add_argument("--budget", type=int, default=None)
    r.add_argument("--tuples", action="store_true", help="include all tuple colors")
    r.set_defaults(fn=cmd_refine)

    cp = sub.add_parser("compare", help="joint k-WL run on two groups")
    cp.add_argument("a")
    cp.add_argument("b")
    cp.add_argument("--k", type=int, required=True)
    cp.add_argument("--version", choices=["I", "II"], default="I")
    cp.add_argument("--out")
    cp.add_argument("--budget", type=int, default=None)
    cp.set_defaults(fn=cmd_compare)

    gm = sub.add_parser("game", help="solve the bijective pebble game")
    gm.add_argument("a")
    gm.add_argument("b")
    gm.add_argument("--pebbles", type=int, required=True)
    gm.add_argument("--version", choices=["I", "II"], default="II")
    gm.add_argument("--config", help="starting pebbles, e.g. '1,2;3,3'")
    gm.add_argument("--chain", help='JSON file {"G": [[...], ...], "H": [[...], ...]}')
    gm.add_argument("--order-cap", type=int, default=pebble.DEFAULT_ORDER_CAP)
    gm.add_argument("--pebble-cap", type=int, default=pebble.DEFAULT_PEBBLE_CAP)
    gm.set_defaults(fn=cmd_game)

    iv = sub.add_parser("invariants", help="JSON invariant profile")
    iv.add_argument("group")
    grp = iv.add_mutually_exclusive_group()
    grp.add_argument("--all", action="store_true")
    grp.add_argument("--select", help="e.g. center,derived,radical:pi=2,3,socle,factors")
    iv.add_argument("--out")
    iv.set_defaults(fn=cmd_invariants)

    dc = sub.add_parser("decompose", help="direct factors, non-abelian components, filtration")
    dc.add_argument("group")
    dc.add_argument("--components", action="store_true")
    dc.add_argument("--factors", action="store_true")
    dc.add_argument("--filtration", action="store_true")
    dc.add_argument("--out")
    dc.set_defaults(fn=cmd_decompose)

    st = sub.add_parser("suite", help="detectability and pair suites")
    st.add_argument("--dir", help="catalog directory (default: built-in catalog)")
    st.add_argument("--config", help="suite JSON config")
    st.add_argument("--out", help="report JSON path")
    st.add_argument("--max-order", type=int, default=None)
    st.add_argument("--pairs", action="store_true", help="also run the pair suite")
    st.set_defaults(fn=cmd_suite)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.fn(args)
    except GroupWLError as err:
        print(f"error: {err}", file=sys.stderr)
        return harness.EXIT_INFRA if args.command == "suite" else 1
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return harness.EXIT_INFRA if args.command == "suite" else 1


if __name__ == "__main__":
    sys.exit(main())

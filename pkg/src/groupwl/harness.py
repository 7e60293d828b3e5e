"""Detectability and pair suites over a catalog of groups.

A detectability record checks that an oracle subset of a group is a union of
stable WL element classes. A pair record checks that two groups of the same
order with different composition factors are told apart by WL.

Report JSON layout::

    {
      "summary": {"rows": {"<invariant>@<k>-<version>": {"pass": int, "fail": int}},
                  "min_k_histogram": {"<k or none>": int},
                  "failures": [str, ...], "passed": bool},
      "records": [DetectabilityRecord fields ...],
      "pairs": [PairRecord fields ...]
    }

Records appear in a fixed order, so one configuration always yields the same
bytes (wall times are left out unless ``timings`` is set).
"""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import catalog, expressions as ex, invariants as inv, products, wl
from .group import ColoredGroup, Group, as_colored
from .io import parse_group, scan_catalog

log = logging.getLogger(__name__)

DEFAULT_CAPS = {2: 128, 3: 64, 4: 32, 5: 16}

EXIT_OK = 0
EXIT_FAIL = 2
EXIT_INFRA = 4


@dataclass
class SuiteConfig:
    catalog: str = "builtin"  # "builtin" or a directory of .mt/.json files
    caps: dict[int, int] = field(default_factory=lambda: dict(DEFAULT_CAPS))
    versions: tuple[str, ...] = ("I", "II")
    invariants: tuple[str, ...] | None = None  # None runs every row
    max_order: int | None = None
    min_order: int = 1
    pairs: bool = False
    pair_max_k: int = 5
    out: str | None = None
    workers: int = 1
    timings: bool = False
    expressions: list[dict] = field(default_factory=list)

    def __post_init__(self):
        self.caps = {int(k): int(v) for k, v in self.caps.items()}
        for k, v in self.caps.items():
            if not 2 <= k <= 5 or v <= 0:
                raise ValueError(f"bad cap {k}: {v}; k must lie in [2,5] and caps be positive")
        self.versions = tuple(wl._version(v) for v in self.versions)

    @classmethod
    def from_json(cls, path: str | Path) -> "SuiteConfig":
        raw = json.loads(Path(path).read_text())
        if "versions" in raw:
            raw["versions"] = tuple(raw["versions"])
        if raw.get("invariants") is not None:
            raw["invariants"] = tuple(raw["invariants"])
        return cls(**raw)


@dataclass
class DetectabilityRecord:
    group: str
    invariant: str
    k: int
    version: str
    detected: bool
    expected: bool
    class_count: int
    rounds: int
    seconds: float = 0.0
    error: str | None = None

    @property
    def row(self) -> str:
        return f"{self.invariant}@{self.k}-{self.version}"

    @property
    def failed(self) -> bool:
        return self.error is not None or (self.expected and not self.detected)


@dataclass
class PairRecord:
    group_a: str
    group_b: str
    order: int
    factors_differ: bool
    min_k: int | None  # least k (Version I) that distinguishes, None if none within caps
    max_k_tried: int
    expected: bool  # distinction required
    seconds: float = 0.0

    @property
    def failed(self) -> bool:
        return self.expected and self.min_k is None


# ---------------------------------------------------------------- oracles --

def _ncl_minimal(g: Group) -> list[frozenset]:
    mins = set(inv.minimal_normal_subgroups(g))
    return [frozenset(x for x in range(1, g.order) if g.normal_closure((x,)) in mins)]


def _components_m(g: Group) -> list[frozenset]:
    if g.is_abelian:
        return []
    return [products.nonabelian_components(g).m_set]


def _pi_radicals(g: Group) -> list[frozenset]:
    return [inv.pi_radical(g, [p]) for p in g.prime_divisors()]


Oracle = Callable[[Group], list[frozenset]]

# (invariant name, k, version, oracle)
MATRIX: list[tuple[str, int, str, Oracle]] = [
    ("center", 2, "II", lambda g: [g.center()]),
    ("solvable_radical", 2, "II", lambda g: [inv.solvable_radical(g)]),
    ("derived", 3, "II", lambda g: [g.derived_subgroup()]),
    ("abelian_radical", 3, "II", lambda g: [inv.abelian_radical(g)]),
    ("pi_radical", 3, "II", _pi_radicals),
    ("fitting", 3, "II", lambda g: [inv.fitting(g)]),
    ("components_M", 3, "II", _components_m),
    ("splitting", 4, "I", lambda g: [products.splitting_elements(g)]),
    ("socle", 4, "II", lambda g: [inv.socle(g)[0]]),
    ("min_normal_closure", 4, "II", _ncl_minimal),
    ("derived_series", 4, "I", lambda g: inv.derived_series(g).terms),
    ("lower_central", 4, "I", lambda g: inv.lower_central(g).terms),
    ("upper_central", 4, "I", lambda g: inv.upper_central(g).terms),
]

SERIES_ROWS = {"derived_series": inv.derived_series, "lower_central": inv.lower_central,
               "upper_central": inv.upper_central}


def row_names() -> list[str]:
    return [name for name, *_ in MATRIX]


# ----------------------------------------------------------------- groups --

def load_groups(cfg: SuiteConfig) -> list[ColoredGroup]:
    if cfg.catalog == "builtin":
        gs = [as_colored(g) for g in catalog.groups(cfg.max_order, cfg.min_order)]
    else:
        gs = []
        for entry in scan_catalog(cfg.catalog):
            if cfg.min_order <= entry.order <= (cfg.max_order or 10**9):
                cg = parse_group(entry.path)
                cg.group.name = entry.name
                gs.append(cg)
    return gs


# ------------------------------------------------------------ detectability --

def _series_labels_ok(g: Group, name: str, colors: np.ndarray) -> bool:
    """Rebuild each series term from the colors it uses and compare quotient labels."""
    rep = SERIES_ROWS[name](g)
    rebuilt = []
    for term in rep.terms:
        used = set(colors[list(term)].tolist())
        rebuilt.append(frozenset(np.flatnonzero(np.isin(colors, list(used))).tolist()))
    if name == "upper_central":
        labels = [inv.quotient_label(g, b, a) for a, b in zip(rebuilt, rebuilt[1:])]
    else:
        labels = [inv.quotient_label(g, a, b) for a, b in zip(rebuilt, rebuilt[1:])]
    return labels == rep.labels


def _expression_rows(cfg: SuiteConfig) -> list[tuple[str, int, str, Oracle]]:
    rows = []
    for spec in cfg.expressions:
        sels = [selector_from_name(s) for s in spec["selectors"]]
        expr = ex.GroupExpression(sels, spec.get("relators", []))
        j = int(spec.get("project", 0))
        fn = ex.sol_forall if spec.get("mode", "exists") == "forall" else ex.sol_exists
        rows.append((spec.get("name", f"expr{len(rows)}"), int(spec.get("k", 3)),
                     wl._version(spec.get("version", "II")),
                     (lambda e, jj, f: lambda g: [f(e, jj, g)])(expr, j, fn)))
    return rows


def selector_from_name(name: str) -> ex.SubsetSelector:
    """``Id``, ``center``, ``derived``, ``one``, ``order<d>`` or ``pi<p>,<q>...``."""
    if name == "Id":
        return ex.IDENTITY
    if name == "center":
        return ex.CENTER
    if name == "derived":
        return ex.DERIVED
    if name == "one":
        return ex.TRIVIAL
    if name.startswith("order"):
        return ex.order_elements(int(name[5:]))
    if name.startswith("pi"):
        return ex.pi_elements(int(p) for p in name[2:].split(","))
    raise ValueError(f"unknown selector {name!r}")


def _group_records(cg: ColoredGroup, cfg: SuiteConfig) -> list[DetectabilityRecord]:
    g = cg.group
    out: list[DetectabilityRecord] = []
    stable: dict[tuple[int, str], wl.Coloring] = {}
    rows = MATRIX + _expression_rows(cfg)
    for name, k, version, oracle in rows:
        if cfg.invariants is not None and name not in cfg.invariants:
            continue
        if version not in cfg.versions or g.order > cfg.caps.get(k, 0):
            continue
        t0 = time.perf_counter()
        try:
            if (k, version) not in stable:
                stable[(k, version)] = wl.stable_coloring(cg, k, version)
            col = stable[(k, version)]
            ec = wl.element_coloring(col)
            sets = oracle(g)
            detected = all(wl.is_union_of_classes(ec, s) for s in sets)
            if detected and name in SERIES_ROWS:
                detected = _series_labels_ok(g, name, ec)
            rec = DetectabilityRecord(g.name, name, k, version, bool(detected), True,
                                      col.class_count, col.rounds)
        except Exception as err:  # failures are data
            log.exception("record %s/%s failed", g.name, name)
            rec = DetectabilityRecord(g.name, name, k, version, False, True, 0, 0, error=repr(err))
        rec.seconds = time.perf_counter() - t0
        out.append(rec)
    return out


def _run_one(args):
    cg, cfg = args
    return _group_records(cg, cfg)


def run_detectability_suite(cfg: SuiteConfig, groups: Sequence[ColoredGroup] | None = None) -> list[DetectabilityRecord]:
    gs = list(groups) if groups is not None else load_groups(cfg)
    if cfg.workers > 1 and len(gs) > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            chunks = list(pool.map(_run_one, [(g, cfg) for g in gs]))
    else:
        chunks = [_group_records(g, cfg) for g in gs]
    return [r for chunk in chunks for r in chunk]


# ------------------------------------------------------------------- pairs --

def minimal_distinguishing_k(g: Group, h: Group, ks: Sequence[int], version: str = "I") -> int | None:
    for k in ks:
        if not wl.joint_compare(g, h, k, version, stop_early=True).equivalent:
            return k
    return None


def run_pair_suite(cfg: SuiteConfig, groups: Sequence[ColoredGroup] | None = None) -> list[PairRecord]:
    gs = list(groups) if groups is not None else load_groups(cfg)
    factors = {id(cg): inv.composition_factors(cg.group).multiset() for cg in gs}
    out = []
    for i, a in enumerate(gs):
        for b in gs[i + 1:]:
            if a.order != b.order:
                continue
            ks = [k for k in range(2, cfg.pair_max_k + 1) if a.order <= cfg.caps.get(k, 0)]
            differ = factors[id(a)] != factors[id(b)]
            t0 = time.perf_counter()
            mk = minimal_distinguishing_k(a, b, ks) if ks else None
            # the requirement only binds when the full k = 5 run fits in the caps
            expected = differ and 5 in ks
            out.append(PairRecord(a.name, b.name, a.order, differ, mk, max(ks, default=0), expected,
                                  time.perf_counter() - t0))
    return out


# ------------------------------------------------------------------ report --

def report(records: Sequence[DetectabilityRecord], path: str | Path | None = None,
           pairs: Sequence[PairRecord] = (), timings: bool = False) -> dict:
    rows: dict[str, dict[str, int]] = {}
    failures = []
    for r in records:
        slot = rows.setdefault(r.row, {"pass": 0, "fail": 0})
        if r.failed:
            slot["fail"] += 1
            failures.append(f"{r.group}: {r.row}" + (f" ({r.error})" if r.error else ""))
        else:
            slot["pass"] += 1
    hist: dict[str, int] = {}
    for p in pairs:
        key = str(p.min_k) if p.min_k is not None else "none"
        hist[key] = hist.get(key, 0) + 1
        if p.failed:
            failures.append(f"{p.group_a} vs {p.group_b}: not distinguished up to k={p.max_k_tried}")
    summary = {"rows": dict(sorted(rows.items())), "min_k_histogram": dict(sorted(hist.items())),
               "failures": failures, "passed": not failures}

    def strip(d: dict) -> dict:
        if not timings:
            d.pop("seconds", None)
        return d

    doc = {"summary": summary, "records": [strip(asdict(r)) for r in records],
           "pairs": [strip(asdict(p)) for p in pairs]}
    if path is not None:
        Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return doc


def exit_code(doc: dict) -> int:
    return EXIT_OK if doc["summary"]["passed"] else EXIT_FAIL


def run_suite(cfg: SuiteConfig) -> tuple[dict, int]:
    try:
        gs = load_groups(cfg)
    except Exception as err:
        log.error("could not load the catalog: %s", err)
        return {"error": repr(err)}, EXIT_INFRA
    records = run_detectability_suite(cfg, gs)
    pairs = run_pair_suite(cfg, gs) if cfg.pairs else []
    doc = report(records, cfg.out, pairs, cfg.timings)
    return doc, exit_code(doc)

"""Reading and writing group tables in the ``.mt`` text format and its JSON mirror.

``.mt`` layout::

    # optional comments; "# name: X" sets the group name
    n
    colors: c0 c1 ... c(n-1)      (optional)
    n rows of n space-separated integers
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError
from .group import ColoredGroup, Group, validate

_CATALOG_ID = re.compile(r"(?i)(?:smallgroup|sg)[^0-9]*(\d+)[^0-9]+(\d+)")


@dataclass(frozen=True)
class CatalogEntry:
    path: Path
    name: str
    order: int
    catalog_id: tuple[int, int] | None = None


def _ints(tokens: list[str], line_no: int, line: str) -> list[int]:
    out = []
    for tok in tokens:
        try:
            out.append(int(tok))
        except ValueError:
            col = line.find(tok) + 1
            raise ParseError(f"not an integer: {tok!r}", line_no, col) from None
    return out


def parse_mt(text: str, validate_table: bool = True) -> ColoredGroup:
    name = ""
    lines = []
    for no, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s:
            continue
        if s.startswith("#"):
            m = re.match(r"#\s*name:\s*(.*)$", s)
            if m:
                name = m.group(1).strip()
            continue
        lines.append((no, raw))
    if not lines:
        raise ParseError("empty file: expected the order on the first line", 1, 1)
    no, first = lines[0]
    toks = first.split()
    if len(toks) != 1:
        raise ParseError("first line must hold the order n alone", no, 1)
    n = _ints(toks, no, first)[0]
    if n < 1:
        raise ParseError(f"order must be positive, got {n}", no, 1)
    rest = lines[1:]
    colors = None
    if rest and rest[0][1].strip().startswith("colors:"):
        cno, cline = rest[0]
        ctoks = cline.strip()[len("colors:"):].split()
        colors = _ints(ctoks, cno, cline)
        if len(colors) != n:
            raise ParseError(f"colors line has {len(colors)} entries, expected {n}", cno, 1)
        rest = rest[1:]
    if len(rest) != n:
        where = rest[n][0] if len(rest) > n else (rest[-1][0] + 1 if rest else no + 1)
        raise ParseError(f"expected {n} table rows, found {len(rest)}", where, 1)
    table = []
    for r, (rno, line) in enumerate(rest):
        row = _ints(line.split(), rno, line)
        if len(row) != n:
            raise ParseError(f"row {r} has {len(row)} entries, expected {n}", rno, 1)
        table.append(row)
    arr = np.asarray(table, dtype=np.int64)
    group = validate(arr, name=name) if validate_table else Group(arr, name=name)
    return ColoredGroup(group, colors)


def format_mt(cg: ColoredGroup | Group) -> str:
    if isinstance(cg, Group):
        cg = ColoredGroup(cg)
    out = []
    if cg.group.name:
        out.append(f"# name: {cg.group.name}")
    out.append(str(cg.order))
    if not cg.is_uniform():
        out.append("colors: " + " ".join(map(str, cg.colors.tolist())))
    for row in cg.group.table.tolist():
        out.append(" ".join(map(str, row)))
    return "\n".join(out) + "\n"


def parse_json(text: str, validate_table: bool = True) -> ColoredGroup:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    if not isinstance(data, dict) or "table" not in data:
        raise ParseError("JSON group needs a 'table' field", 1, 1)
    table = data["table"]
    n = data.get("order", len(table))
    if len(table) != n:
        raise ParseError(f"order {n} but table has {len(table)} rows")
    for r, row in enumerate(table):
        if len(row) != n:
            raise ParseError(f"row {r} has {len(row)} entries, expected {n}")
    name = data.get("name") or ""
    arr = np.asarray(table, dtype=np.int64)
    group = validate(arr, name=name) if validate_table else Group(arr, name=name)
    return ColoredGroup(group, data.get("colors"))


def format_json(cg: ColoredGroup | Group) -> str:
    if isinstance(cg, Group):
        cg = ColoredGroup(cg)
    data = {"order": cg.order, "table": cg.group.table.tolist()}
    if not cg.is_uniform():
        data["colors"] = cg.colors.tolist()
    if cg.group.name:
        data["name"] = cg.group.name
    return json.dumps(data)


def parse_group(path: str | Path, validate_table: bool = True) -> ColoredGroup:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        cg = parse_json(text, validate_table)
    else:
        cg = parse_mt(text, validate_table)
    if not cg.group.name:
        cg.group.name = path.stem
    return cg


def write_group(cg: ColoredGroup | Group, path: str | Path) -> None:
    path = Path(path)
    text = format_json(cg) if path.suffix.lower() == ".json" else format_mt(cg)
    path.write_text(text)


def catalog_id_from(text: str) -> tuple[int, int] | None:
    m = _CATALOG_ID.search(text)
    return (int(m.group(1)), int(m.group(2))) if m else None


def scan_catalog(directory: str | Path) -> list[CatalogEntry]:
    """Every ``.mt``/``.json`` group file in a directory, sorted by (order, name)."""
    entries = []
    for path in sorted(Path(directory).iterdir()):
        if path.suffix.lower() not in (".mt", ".json") or not path.is_file():
            continue
        cg = parse_group(path)
        cid = catalog_id_from(cg.group.name) or catalog_id_from(path.stem)
        if cid is not None and cid[0] != cg.order:
            cid = None
        entries.append(CatalogEntry(path, cg.group.name, cg.order, cid))
    entries.sort(key=lambda e: (e.order, e.name, str(e.path)))
    return entries

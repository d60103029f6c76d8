"""Fan files, CSV count tables and small text parsers used by the CLI."""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from importlib.resources import files
from pathlib import Path
from typing import IO, Mapping

from .counting import CountRow, CountTable
from .errors import ParseError, ToricError
from .fans import Fan, PLFunction, validate_fan


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError("parse-error", f"not a rational number: {text!r}") from None


def parse_vector(text: str) -> tuple[Fraction, ...]:
    """``"1,-2,3/2"`` -> rationals."""
    parts = [p for p in str(text).replace(" ", "").split(",") if p]
    if not parts:
        raise ParseError("parse-error", "empty vector")
    return tuple(parse_rational(p) for p in parts)


def parse_int_vector(text: str) -> tuple[int, ...]:
    vec = parse_vector(text)
    if any(x.denominator != 1 for x in vec):
        raise ParseError("parse-error", f"expected integers: {text!r}")
    return tuple(int(x) for x in vec)


def parse_matrix(text: str) -> list[tuple[int, ...]]:
    """``"1,0;1,2"`` -> integer rows."""
    rows = [parse_int_vector(r) for r in str(text).split(";") if r.strip()]
    if not rows or len({len(r) for r in rows}) != 1:
        raise ParseError("parse-error", f"ragged or empty matrix: {text!r}")
    return rows


def parse_grid(text: str) -> list[Fraction]:
    """Either a comma list or ``lo:hi:n`` (n log-spaced integers from lo to hi)."""
    text = str(text).strip()
    if ":" in text:
        try:
            lo, hi, n = text.split(":")
            lo_f, hi_f, n = float(lo), float(hi), int(n)
        except ValueError:
            raise ParseError("parse-error", f"bad grid {text!r}") from None
        if lo_f <= 0 or hi_f < lo_f or n < 1:
            raise ParseError("parse-error", f"bad grid {text!r}")
        if n == 1:
            return [Fraction(round(lo_f))]
        step = (math.log(hi_f) - math.log(lo_f)) / (n - 1)
        return sorted({Fraction(round(math.exp(math.log(lo_f) + i * step))) for i in range(n)})
    return sorted(set(parse_vector(text)))


# -- fan files ------------------------------------------------------------------

def _field(raw: Mapping, name: str):
    if name not in raw:
        raise ParseError(f"parse-error({name})", "missing field")
    return raw[name]


def _check_structure(raw) -> None:
    if not isinstance(raw, dict):
        raise ParseError("parse-error", "top level must be an object")
    rank = _field(raw, "rank")
    if not isinstance(rank, int) or isinstance(rank, bool) or rank < 1:
        raise ParseError("parse-error(rank)", "rank must be a positive integer")
    rays = _field(raw, "rays")
    if (not isinstance(rays, list) or not rays
            or any(not isinstance(r, list) or len(r) != rank
                   or any(not isinstance(x, int) or isinstance(x, bool) for x in r) for r in rays)):
        raise ParseError("parse-error(rays)", f"rays must be integer vectors of length {rank}")
    cones = _field(raw, "max_cones")
    if not isinstance(cones, list) or any(not isinstance(c, list) for c in cones):
        raise ParseError("parse-error(max_cones)", "max_cones must be lists of ray indices")
    for ci, c in enumerate(cones):
        for i in c:
            if not isinstance(i, int) or isinstance(i, bool) or not 0 <= i < len(rays):
                raise ParseError("parse-error(max_cones)",
                                 f"cone {ci} refers to ray {i!r}; there are {len(rays)} rays")


def _parse_pl(fan: Fan, raw) -> dict[str, PLFunction]:
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ParseError("parse-error(pl_functions)", "must map names to value tables")
    out = {}
    for name, table in raw.items():
        if isinstance(table, list):
            values = table
        elif isinstance(table, dict):
            try:
                values = [table[str(i)] for i in range(fan.n_rays)]
            except KeyError as exc:
                raise ParseError("parse-error(pl_functions)", f"{name}: no value for ray {exc}") from None
        else:
            raise ParseError("parse-error(pl_functions)", f"{name}: bad value table")
        if len(values) != fan.n_rays:
            raise ParseError("parse-error(pl_functions)", f"{name}: {len(values)} values for {fan.n_rays} rays")
        try:
            out[name] = PLFunction(fan, [parse_rational(v) for v in values])
        except ParseError:
            raise ParseError("parse-error(pl_functions)", f"{name}: values must be rationals") from None
    return out


def parse_fan_text(text: str, source: str = "<string>") -> tuple[Fan, dict[str, PLFunction]]:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("parse-error", f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    _check_structure(raw)
    fan = validate_fan(raw)
    return fan, _parse_pl(fan, raw.get("pl_functions"))


def bundled_fan_path(name: str) -> Path | None:
    """Path of a fan shipped with the package (``"p2"`` or ``"p2.fan.json"``)."""
    fname = name if name.endswith(".fan.json") else f"{name}.fan.json"
    res = files("toric_heights") / "data" / fname
    return Path(str(res)) if res.is_file() else None


def parse_fan_file(path) -> tuple[Fan, dict[str, PLFunction]]:
    """Read and validate a fan file; bare names of bundled fans also work."""
    p = Path(path)
    if not p.exists() and p.parent == Path("."):
        p = bundled_fan_path(p.name) or p
    try:
        text = p.read_text()
    except OSError as exc:
        raise ParseError("io-error", f"{path}: {exc.strerror or exc}") from None
    return parse_fan_text(text, str(path))


def fan_to_json(fan: Fan, pl: Mapping[str, PLFunction] | None = None) -> str:
    raw = fan.to_raw()
    if pl:
        raw["pl_functions"] = {name: {str(i): str(v) for i, v in enumerate(f.values)}
                               for name, f in pl.items()}
    return json.dumps(raw, indent=2)


def write_fan_file(path, fan: Fan, pl: Mapping[str, PLFunction] | None = None) -> None:
    try:
        Path(path).write_text(fan_to_json(fan, pl) + "\n")
    except OSError as exc:
        raise ParseError("io-error", f"{path}: {exc.strerror or exc}") from None


# -- CSV ------------------------------------------------------------------------------

HEADER = ("B", "N", "ties")


def emit_csv(table: CountTable, sink: IO[str]) -> None:
    """Write ``B,N,ties`` rows sorted by ``B``; refuses tables where N decreases."""
    if not table.is_monotone():
        raise ToricError("invariant-violation", "N must be nondecreasing in B")
    try:
        writer = csv.writer(sink, lineterminator="\n")
        writer.writerow(HEADER)
        for r in table.sorted():
            writer.writerow((str(r.B), r.N, r.ties))
    except OSError as exc:
        raise ParseError("io-error", str(exc)) from None


def csv_text(table: CountTable) -> str:
    buf = io.StringIO()
    emit_csv(table, buf)
    return buf.getvalue()


def read_csv(source) -> CountTable:
    """Parse a count table from a path or an open text stream."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise ParseError("io-error", f"{source}: {exc.strerror or exc}") from None
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows or tuple(c.strip() for c in rows[0]) != HEADER:
        raise ParseError("parse-error(header)", "expected header B,N,ties")
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 3:
            raise ParseError("parse-error(row)", f"line {lineno}: expected 3 fields")
        try:
            out.append(CountRow(parse_rational(row[0]), int(row[1]), int(row[2])))
        except (ValueError, ParseError):
            raise ParseError("parse-error(row)", f"line {lineno}: {','.join(row)}") from None
    return CountTable(tuple(out))

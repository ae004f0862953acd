"""Plain-text chart specifications and map files.

Chart specification
-------------------
One item per line; ``#`` starts a comment; blank lines are ignored::

    name = random-poly        # any catalog name, or "polynomial"
    n = 2
    seed = 7                  # random-poly only
    degree = 4                # random-poly only
    radius = 0.5              # polynomial only, optional domain radius

With ``name = polynomial`` the potential is given inline, one monomial per
line as ``<z exponents>|<conj(z) exponents> <re> <im>``::

    1,0|1,0 1.0 0.0           # |z1|^2
    0,1|0,1 1.0 0.0           # |z2|^2
    2,1|1,0 0.05 0.02         # must be paired with its conjugate term
    1,0|2,1 0.05 -0.02

Map file
--------
One or more blocks; a block starts at a ``chart`` line::

    chart product-cp1-cp1     # optional key=value params: n=, seed=, degree=
    point-p 0,0,0,0
    point-q 0,0,0,0
    F                         # followed by 2n rows of 2n numbers
    1 0 0 0
    0 1 0 0
    0 0 1 0
    0 0 0 1

Points are comma-separated real coordinates ``x1..xn, y1..yn``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError
from .kaehler_geometry import CATALOG, catalog_chart, polynomial_chart
from .polynomial import ZPolynomial

_INT_KEYS = ("n", "seed", "degree")


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_floats(text: str, sep: str | None = ",", line: int | None = None) -> np.ndarray:
    try:
        values = [float(tok) for tok in text.split(sep)]
    except ValueError:
        raise ParseError(f"expected numbers, got {text!r}", line) from None
    if not values or not np.all(np.isfinite(values)):
        raise ParseError(f"expected finite numbers, got {text!r}", line)
    return np.array(values)


def _parse_exponents(text, n, line):
    try:
        exps = tuple(int(tok) for tok in text.split(","))
    except ValueError:
        raise ParseError(f"bad exponent list {text!r}", line) from None
    if len(exps) != n or min(exps) < 0:
        raise ParseError(f"exponent list {text!r} needs {n} non-negative integers", line)
    return exps


def parse_chart_spec(text: str):
    """Parse a chart specification document into a :class:`KaehlerChart`."""
    fields: dict[str, str] = {}
    terms: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        if "=" in line:
            key, _, value = (s.strip() for s in line.partition("="))
            if key not in ("name", "n", "seed", "degree", "radius"):
                raise ParseError(f"unknown key {key!r}", lineno)
            if key in fields:
                raise ParseError(f"duplicate key {key!r}", lineno)
            fields[key] = value
            fields[f"_{key}_line"] = str(lineno)
        else:
            terms.append((lineno, line))

    if "name" not in fields:
        raise ParseError("missing required key 'name'")
    name = fields["name"]
    ints = {}
    for key in _INT_KEYS:
        if key in fields:
            try:
                ints[key] = int(fields[key])
            except ValueError:
                raise ParseError(f"{key} must be an integer", int(fields[f"_{key}_line"])) from None
    n = ints.get("n", 2)

    if name != "polynomial":
        if terms:
            raise ParseError("monomial lines are only allowed for name = polynomial", terms[0][0])
        if name not in CATALOG:
            raise ParseError(f"unknown chart name {name!r}", int(fields["_name_line"]))
        return catalog_chart(name, n, seed=ints.get("seed", 0), degree=ints.get("degree", 4))

    if not terms:
        raise ParseError("polynomial chart needs at least one monomial line")
    coeffs = {}
    for lineno, line in terms:
        parts = line.split()
        if len(parts) != 3 or parts[0].count("|") != 1:
            raise ParseError("monomial lines look like '1,0|1,0 <re> <im>'", lineno)
        za, zb = parts[0].split("|")
        key = (_parse_exponents(za, n, lineno), _parse_exponents(zb, n, lineno))
        re, im = parse_floats(f"{parts[1]},{parts[2]}", line=lineno)
        if key in coeffs:
            raise ParseError(f"duplicate monomial {parts[0]}", lineno)
        coeffs[key] = (complex(re, im), lineno)
    for (a, b), (c, lineno) in coeffs.items():
        partner = coeffs.get((b, a), (0j, None))[0]
        if abs(c - np.conj(partner)) > 1e-14 * max(1.0, abs(c)):
            raise ParseError("potential is not real: conjugate monomial missing or mismatched", lineno)
    radius = None
    if "radius" in fields:
        radius = float(parse_floats(fields["radius"], line=int(fields["_radius_line"]))[0])
    potential = ZPolynomial(n, {k: c for k, (c, _) in coeffs.items()})
    return polynomial_chart(potential, radius=radius)


def load_chart_spec(path) -> object:
    return parse_chart_spec(Path(path).read_text())


@dataclass
class MapBlock:
    chart: object
    point_p: np.ndarray
    point_q: np.ndarray
    F: np.ndarray
    line: int
    chart_text: str = ""
    params: dict = field(default_factory=dict)


def parse_map_file(text: str) -> list[MapBlock]:
    lines = [(i, _strip(raw)) for i, raw in enumerate(text.splitlines(), start=1)]
    lines = [(i, s) for i, s in lines if s]
    blocks: list[MapBlock] = []
    current: dict | None = None
    k = 0

    def finish():
        if current is None:
            return
        start = current["line"]
        for key in ("point-p", "point-q", "F"):
            if key not in current:
                raise ParseError(f"block is missing {key!r}", start)
        chart = current["chart"]
        for key in ("point-p", "point-q"):
            pt, lineno = current[key]
            if pt.size != 2 * chart.n:
                raise ParseError(f"{key} needs {2 * chart.n} coordinates, got {pt.size}", lineno)
        blocks.append(
            MapBlock(
                chart,
                current["point-p"][0],
                current["point-q"][0],
                current["F"],
                start,
                current["chart_text"],
                current["params"],
            )
        )

    while k < len(lines):
        lineno, line = lines[k]
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "chart":
            finish()
            current = _parse_chart_line(rest, lineno)
        elif current is None:
            raise ParseError("expected a 'chart' line to open a block", lineno)
        elif head in ("point-p", "point-q"):
            if head in current:
                raise ParseError(f"duplicate {head}", lineno)
            current[head] = (parse_floats(rest, line=lineno), lineno)
        elif head == "F":
            if "F" in current:
                raise ParseError("duplicate F", lineno)
            dim = 2 * current["chart"].n
            rows = []
            for _ in range(dim):
                k += 1
                if k >= len(lines):
                    raise ParseError(f"F needs {dim} rows", lineno)
                row_line, row = lines[k]
                values = parse_floats(row, sep=None, line=row_line)
                if values.size != dim:
                    raise ParseError(f"F row needs {dim} entries, got {values.size}", row_line)
                rows.append(values)
            current["F"] = np.array(rows)
        else:
            raise ParseError(f"unknown directive {head!r}", lineno)
        k += 1
    finish()
    if not blocks:
        raise ParseError("map file contains no blocks")
    return blocks


def _parse_chart_line(rest, lineno):
    tokens = rest.split()
    if not tokens:
        raise ParseError("chart line needs a chart name", lineno)
    name, params = tokens[0], {}
    for tok in tokens[1:]:
        key, eq, value = tok.partition("=")
        if not eq or key not in _INT_KEYS:
            raise ParseError(f"bad chart parameter {tok!r}", lineno)
        try:
            params[key] = int(value)
        except ValueError:
            raise ParseError(f"chart parameter {key} must be an integer", lineno) from None
    if name not in CATALOG:
        raise ParseError(f"unknown chart name {name!r}", lineno)
    try:
        chart = catalog_chart(
            name, params.get("n", 2), seed=params.get("seed", 0), degree=params.get("degree", 4)
        )
    except Exception as exc:
        raise ParseError(str(exc), lineno) from None
    return {"chart": chart, "line": lineno, "chart_text": rest, "params": params}


def load_map_file(path) -> list[MapBlock]:
    return parse_map_file(Path(path).read_text())

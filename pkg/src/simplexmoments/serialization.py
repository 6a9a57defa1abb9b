"""Polytope JSON, report JSON/CSV and number formatting.

Polytope documents look like::

    {"name": "T3", "dim": 3,
     "vertices": [[[0, 1], [0, 1], [0, 1]], [[1, 1], [0, 1], [0, 1]], ...],
     "generators": [[1, 0, 2, 3], ...]}

Each coordinate is a ``[numerator, denominator]`` pair; ``"p/q"`` strings and
plain integers are accepted on input.  Generators are zero-based vertex
images.  Validation errors name the offending field, e.g.
``vertices[2][1]: denominator must be positive``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Iterable, Sequence

from gmpy2 import mpq

from .polytope import Polytope
from .rational import Rational, format_rational, parse_rational

__all__ = [
    "SchemaError",
    "polytope_to_dict",
    "polytope_from_dict",
    "dump_polytope",
    "load_polytope",
    "format_number",
    "report_rows",
    "reports_to_json",
    "reports_to_csv",
    "REPORT_FIELDS",
]

SIGNIFICANT = 15


class SchemaError(ValueError):
    """A document does not follow the expected layout."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


def _coord_to_json(q: Rational) -> list:
    q = mpq(q)
    return [int(q.numerator), int(q.denominator)]


def _coord_from_json(value: Any, path: str) -> Rational:
    if isinstance(value, bool):
        raise SchemaError(path, "expected a rational, got a boolean")
    if isinstance(value, int):
        return mpq(value)
    if isinstance(value, str):
        try:
            return parse_rational(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(path, f"cannot parse {value!r} as a rational ({exc})") from None
    if isinstance(value, (list, tuple)):
        if len(value) != 2 or not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
            raise SchemaError(path, "expected [numerator, denominator] integers")
        if value[1] <= 0:
            raise SchemaError(path, "denominator must be positive")
        return mpq(value[0], value[1])
    raise SchemaError(path, f"expected a rational, got {type(value).__name__}")


def polytope_to_dict(P: Polytope, generators: Sequence[Sequence[int]] | None = None) -> dict:
    return {
        "name": P.name,
        "dim": P.dim,
        "vertices": [[_coord_to_json(c) for c in v] for v in P.vertices],
        "generators": [list(map(int, g)) for g in (generators or [])],
    }


def polytope_from_dict(doc: Any) -> tuple[Polytope, list]:
    """Validate a polytope document; return the polytope and its generators."""
    if not isinstance(doc, dict):
        raise SchemaError("", "document must be an object")
    for key in ("dim", "vertices"):
        if key not in doc:
            raise SchemaError(key, "missing field")
    dim = doc["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise SchemaError("dim", "must be a positive integer")
    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise SchemaError("name", "must be a string")
    raw = doc["vertices"]
    if not isinstance(raw, list) or not raw:
        raise SchemaError("vertices", "must be a non-empty list")
    verts = []
    for i, row in enumerate(raw):
        if not isinstance(row, list):
            raise SchemaError(f"vertices[{i}]", "must be a list of coordinates")
        if len(row) != dim:
            raise SchemaError(f"vertices[{i}]", f"has {len(row)} coordinates, dim is {dim}")
        verts.append(tuple(_coord_from_json(c, f"vertices[{i}][{j}]") for j, c in enumerate(row)))
    if len(set(verts)) != len(verts):
        raise SchemaError("vertices", "contains duplicate points")
    gens = doc.get("generators", [])
    if not isinstance(gens, list):
        raise SchemaError("generators", "must be a list of permutations")
    n = len(verts)
    for i, g in enumerate(gens):
        if not isinstance(g, list) or sorted(g) != list(range(n)):
            raise SchemaError(f"generators[{i}]", f"must be a permutation of 0..{n - 1}")
    P = Polytope(verts, name=name, dim=dim, trusted=True)
    return P, [list(g) for g in gens]


def dump_polytope(P: Polytope, generators=None) -> str:
    doc = polytope_to_dict(P, generators)
    lines = [f'  "name": {json.dumps(doc["name"])},', f'  "dim": {doc["dim"]},', '  "vertices": [']
    lines += ["    " + json.dumps(v) + ("," if i < len(doc["vertices"]) - 1 else "")
              for i, v in enumerate(doc["vertices"])]
    lines.append("  ],")
    lines.append(f'  "generators": {json.dumps(doc["generators"])}')
    return "{\n" + "\n".join(lines) + "\n}\n"


def load_polytope(text: str) -> tuple[Polytope, list]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"invalid JSON ({exc})") from None
    return polytope_from_dict(doc)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

REPORT_FIELDS = (
    "name", "quantity", "value", "reference", "abs_discrepancy", "rel_discrepancy",
    "tolerance", "passed", "runtime_s", "spec",
)


def format_number(x) -> str | None:
    """Rationals as ``p/q``; floats with 15 significant digits."""
    if x is None:
        return None
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int) or type(x).__name__ in ("mpq", "mpz", "Fraction"):
        return format_rational(x)
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return f"{float(x):.{SIGNIFICANT}g}"


def report_rows(reports: Iterable) -> list[dict]:
    rows = []
    for r in reports:
        d = r.as_dict() if hasattr(r, "as_dict") else dict(r)
        rows.append({k: d.get(k) for k in REPORT_FIELDS})
    return rows


def reports_to_json(reports: Iterable) -> str:
    return json.dumps(report_rows(reports), indent=2) + "\n"


def reports_to_csv(reports: Iterable) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=REPORT_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in report_rows(reports):
        row = dict(row)
        if isinstance(row.get("spec"), dict):
            row["spec"] = json.dumps(row["spec"], sort_keys=True)
        writer.writerow(row)
    return buf.getvalue()

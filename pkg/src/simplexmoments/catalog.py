"""Named solids, their symmetry generators, published labels and reference values.

Families ``T_d`` (simplex), ``C_d`` (unit cube) and ``O_d`` (cross-polytope)
are generated for ``1 <= d <= 6``.  The tesseract, the 16-cell and the cube
use the published vertex orders and generators verbatim, so configuration
labels and selections can be compared index by index.  The remaining
polyhedra are read from ``data/polyhedra.json``: rational coordinates plus
generators that were found offline with :func:`affine_symmetries` and are
re-validated by the tests.

Reference values live in :data:`REFERENCES`.  Every entry carries a
provenance string; :func:`lint_references` rejects entries without one and
floats printed with fewer than 12 significant digits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal
from functools import cached_property, lru_cache
from importlib import resources
from itertools import combinations
from typing import Callable, Sequence

import mpmath
from gmpy2 import mpq

from .moments import ClosedFormValue
from .polytope import Polytope
from .rational import parse_rational
from .serialization import polytope_from_dict
from .symmetry import (
    SymmetryGroup,
    VertexPermutation,
    affine_symmetries,
    enumerate_configurations,
    group_closure,
)

__all__ = [
    "CatalogEntry",
    "Reference",
    "UnknownSolidError",
    "catalog",
    "get",
    "names",
    "configurations_for",
    "reference",
    "references_for",
    "lint_references",
    "REFERENCES",
    "T4_MC_INTERVAL",
]

MAX_FAMILY_DIM = 6


class UnknownSolidError(KeyError):
    def __str__(self) -> str:
        return f"unknown solid {self.args[0]!r}; try one of: {', '.join(names())}"


@dataclass
class CatalogEntry:
    name: str
    polytope: Polytope
    generators: list  # zero-based vertex images
    published_labels: list = field(default_factory=list)  # (label, w_C, n_C)
    starred: bool = False
    aliases: tuple = ()
    group_order: int | None = None

    @cached_property
    def group(self) -> SymmetryGroup:
        n = len(self.polytope.vertices)
        gens = [VertexPermutation.from_images(g, one_based=False) for g in self.generators]
        if not gens:
            gens = [VertexPermutation.from_images(range(n), one_based=False)]
        return group_closure(gens)

    @cached_property
    def configurations(self) -> list:
        configs = enumerate_configurations(self.polytope, self.group, self.published_labels)
        selections = _PUBLISHED_SELECTIONS.get(self.name)
        if selections:
            _label_by_selection(self, configs, selections)
        return configs

    @property
    def dim(self) -> int:
        return self.polytope.dim

    def references(self) -> dict:
        return references_for(self.name)


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------

def _images(vertices: Sequence, transform: Callable) -> list:
    index = {v: i for i, v in enumerate(vertices)}
    return [index[tuple(transform(v))] for v in vertices]


def _coordinate_generators(vertices: Sequence, d: int, reflect: Callable) -> list:
    gens = []
    if d >= 2:
        gens.append(_images(vertices, lambda v: (v[1], v[0], *v[2:])))
    if d >= 3:
        gens.append(_images(vertices, lambda v: (*v[1:], v[0])))
    gens.append(_images(vertices, lambda v: (reflect(v[0]), *v[1:])))
    return gens


def _unit_vector(d: int, i: int, value=1) -> tuple:
    return tuple(mpq(value) if j == i else mpq(0) for j in range(d))


def simplex_entry(d: int) -> CatalogEntry:
    verts = [tuple(mpq(0) for _ in range(d))] + [_unit_vector(d, i) for i in range(d)]
    n = d + 1
    gens = [[(i + 1) % n for i in range(n)]]
    if n > 2:
        gens.append([1, 0, *range(2, n)])
    return CatalogEntry(f"T{d}", Polytope(verts, name=f"T{d}", trusted=True), gens)


def _cube_vertices(d: int) -> list:
    # by number of ones, then in combination order: 0, e1, ..., ed, e1+e2, ...
    verts = []
    for r in range(d + 1):
        for ones in combinations(range(d), r):
            verts.append(tuple(mpq(1) if i in ones else mpq(0) for i in range(d)))
    return verts


def cube_entry(d: int) -> CatalogEntry:
    verts = _cube_vertices(d)
    gens = _coordinate_generators(verts, d, lambda x: 1 - x)
    return CatalogEntry(f"C{d}", Polytope(verts, name=f"C{d}", trusted=True), gens)


def orthoplex_entry(d: int) -> CatalogEntry:
    verts = [_unit_vector(d, i, s) for s in (1, -1) for i in range(d)]
    gens = _coordinate_generators(verts, d, lambda x: -x)
    return CatalogEntry(f"O{d}", Polytope(verts, name=f"O{d}", trusted=True), gens)


def _from_cycles(cycles: Sequence, n: int) -> list:
    perm = VertexPermutation.from_cycles(cycles, n)
    return list(perm.image)


# published inputs -----------------------------------------------------------

_C3_VERTICES = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, 0), (1, 1, 1)]
_C3_IMAGES = [  # one-based images: reflection, 2-fold rotation, 3-fold rotation
    [4, 6, 5, 1, 3, 2, 8, 7],
    [3, 7, 5, 1, 4, 2, 8, 6],
    [7, 8, 3, 2, 1, 6, 5, 4],
]
_C4_CYCLES = [
    [(1, 5), (2, 8), (3, 10), (4, 11), (6, 13), (7, 14), (9, 15), (12, 16)],
    [(1, 3, 9, 4), (2, 6, 12, 7), (5, 10, 15, 11), (8, 13, 16, 14)],
    [(1, 2, 6, 3), (4, 7, 12, 9), (5, 8, 13, 10), (11, 14, 16, 15)],
    [(1, 7, 16, 10), (2, 12, 15, 5), (3, 4, 14, 13), (6, 9, 11, 8)],
]
_O4_CYCLES = [[(4, 8)], [(2, 3, 6, 7)], [(1, 2, 5, 6)], [(1, 2, 5, 6), (3, 4, 7, 8)]]


def _published_cube3() -> CatalogEntry:
    verts = [tuple(mpq(c) for c in v) for v in _C3_VERTICES]
    gens = [[i - 1 for i in img] for img in _C3_IMAGES]
    return CatalogEntry("C3", Polytope(verts, name="C3", trusted=True), gens)


def _published_cube4() -> CatalogEntry:
    entry = cube_entry(4)  # combination order coincides with the published one
    entry.generators = [_from_cycles(c, 16) for c in _C4_CYCLES]
    return entry


def _published_orthoplex4() -> CatalogEntry:
    entry = orthoplex_entry(4)  # e1..e4, -e1..-e4 as published
    entry.generators = [_from_cycles(c, 8) for c in _O4_CYCLES]
    return entry


# labels as (roman numeral, w_C, n_C), listed in published order ---------------

def _labelled(pairs: Sequence[tuple]) -> list:
    from .symmetry import roman

    return [(roman(i), w, n) for i, (w, n) in enumerate(pairs, start=1)]


_PUBLISHED_LABELS = {
    "T2": _labelled([(3, 2)]),
    "C2": _labelled([(4, 2), (2, 2)]),
    "T3": _labelled([(4, 3), (6, 4)]),
    "O3": _labelled([(6, 4), (12, 6), (4, 6)]),
    "C3": _labelled([(8, 3), (12, 4), (24, 5), (4, 6), (3, 4)]),
    "T4": _labelled([(5, 4), (10, 6)]),
    "O4": _labelled([(8, 6), (24, 10), (32, 12), (16, 0)]),
    "C4": _labelled([(16, 4), (32, 6), (96, 8), (24, 8), (64, 10), (16, 12), (192, 10),
                     (96, 10), (96, 12), (64, 10), (192, 12), (4, 8), (32, 12), (64, 12)]),
    "T5": _labelled([(6, 5), (15, 8), (10, 9)]),
    "T6": _labelled([(7, 6), (21, 10), (35, 12)]),
    "triakis tetrahedron": _labelled([(4, 3), (4, 6), (12, 7), (6, 10), (12, 8), (12, 9), (3, 8), (4, 9)]),
    "square pyramid": _labelled([(1, 4), (4, 3), (4, 5), (4, 4)]),
    "triangular prism": _labelled([(6, 3), (6, 4), (3, 4), (1, 3), (6, 5)]),
    "triangular bipyramid": _labelled([(3, 4), (2, 3), (3, 6), (6, 5)]),
    "truncated octahedron": _labelled([
        (24, 3), (24, 4), (12, 4), (48, 5), (24, 5), (24, 6), (24, 6), (24, 6), (6, 4), (48, 7),
        (48, 7), (48, 7), (24, 5), (8, 6), (48, 8), (48, 6), (12, 8), (24, 6), (48, 7), (48, 7),
        (48, 9), (24, 7), (24, 7), (24, 6), (24, 8), (48, 8), (48, 8), (6, 8), (48, 7), (48, 7),
        (24, 9), (48, 9), (24, 6), (24, 8), (48, 8), (24, 8), (24, 10), (48, 7), (48, 7), (48, 9),
        (48, 9), (24, 7), (4, 6), (24, 8), (6, 6), (12, 10), (12, 8)]),
    "cuboctahedron": _labelled([(12, 4), (24, 6), (24, 8), (8, 6), (6, 8), (48, 8), (24, 8), (12, 8), (12, 8)]),
    "truncated tetrahedron": _labelled([(12, 3), (12, 4), (6, 4), (4, 3), (24, 5), (12, 4), (12, 6),
                                        (24, 5), (12, 5), (24, 7), (3, 4), (12, 6), (4, 6), (12, 6)]),
    "rhombic dodecahedron": _labelled([(8, 3), (6, 4), (24, 5), (24, 6), (24, 7), (12, 6), (6, 8), (4, 6),
                                       (12, 8), (24, 8), (24, 7), (48, 7), (8, 9), (24, 7), (24, 8)]),
}

# published selections S (vertex coordinates) that pin labels down exactly
_PUBLISHED_SELECTIONS = {
    "T3": {"I": [(0, 0, 0)], "II": [(0, 0, 0), (0, 0, 1)]},
    "O3": {"I": [(0, 0, 1)], "II": [(1, 0, 0), (0, 1, 0)], "III": [(1, 0, 0), (0, 1, 0), (0, 0, 1)]},
    "C3": {"I": [(0, 0, 0)], "II": [(0, 0, 0), (0, 0, 1)], "III": [(0, 0, 0), (1, 0, 0), (0, 1, 0)],
           "IV": [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)],
           "V": [(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0)]},
    "O4": {"I": [(0, 0, 0, 1)], "II": [(0, 0, 1, 0), (0, 0, 0, 1)],
           "III": [(0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)],
           "IV": [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]},
    "C4": {
        "I": ["0000"], "II": ["0000", "1000"], "III": ["0000", "1000", "0100"],
        "IV": ["0000", "1000", "0100", "1100"], "V": ["0000", "1000", "0100", "0010"],
        "VI": ["0000", "1000", "0100", "0010", "0001"], "VII": ["0000", "1000", "0100", "0010", "1100"],
        "VIII": ["0000", "1000", "0100", "0010", "1010", "1100"],
        "IX": ["0000", "1000", "0100", "0010", "0001", "1100"],
        "X": ["0000", "1000", "0100", "0010", "0110", "1010", "1100"],
        "XI": ["0000", "1000", "0100", "0010", "0001", "1010", "1100"],
        "XII": ["0000", "1000", "0100", "0010", "0110", "1010", "1100", "1110"],
        "XIII": ["0000", "1000", "0100", "0010", "0001", "1100", "1010", "1001"],
        "XIV": ["0000", "1000", "0100", "0010", "0001", "0110", "1010", "1100"],
    },
}


def _selection_mask(entry: "CatalogEntry", points: Sequence) -> int:
    index = {v: i for i, v in enumerate(entry.polytope.vertices)}
    mask = 0
    for p in points:
        coords = tuple(mpq(int(c)) for c in p)
        mask |= 1 << index[coords]
    return mask


def _label_by_selection(entry: "CatalogEntry", configs: list, selections: dict) -> None:
    from .symmetry import orbit

    n = len(entry.polytope.vertices)
    full = (1 << n) - 1
    published = {lab: (w, o) for lab, w, o in entry.published_labels}
    for label, points in selections.items():
        mask = _selection_mask(entry, points)
        for cfg in configs:
            reps = {cfg.representative, full ^ cfg.representative}
            if not reps & set(orbit(mask, entry.group)):
                continue
            cfg.published_label = label
            cfg.notes = [note for note in cfg.notes if not note.startswith(("signature", "no stored", "stored order"))]
            w, o = published.get(label, (None, None))
            if (w, o) != (cfg.weight, cfg.order):
                cfg.notes.append(f"published (w={w}, n={o}) for {label}, computed (w={cfg.weight}, n={cfg.order})")
            break


_STARRED = {"triakis tetrahedron", "tetrakis hexahedron", "truncated octahedron"}

_ALIASES = {
    "segment": "T1", "triangle": "T2", "square": "C2", "tetrahedron": "T3", "cube": "C3",
    "octahedron": "O3", "pentachoron": "T4", "tesseract": "C4", "hexadecachoron": "O4",
    "16-cell": "O4", "hexateron": "T5", "heptapeton": "T6",
}


def _load_polyhedra() -> dict:
    text = resources.files(__package__).joinpath("data", "polyhedra.json").read_text()
    out = {}
    for name, doc in json.loads(text).items():
        P, gens = polytope_from_dict(doc)
        out[name] = CatalogEntry(name, P, gens, group_order=doc.get("group_order"))
    return out


@lru_cache(maxsize=None)
def catalog() -> dict:
    """All entries keyed by canonical name (insertion order is stable)."""
    entries = {}
    for d in range(1, MAX_FAMILY_DIM + 1):
        for make in (simplex_entry, cube_entry, orthoplex_entry):
            e = make(d)
            entries[e.name] = e
    entries["C3"] = _published_cube3()
    entries["C4"] = _published_cube4()
    entries["O4"] = _published_orthoplex4()
    entries.update(_load_polyhedra())
    for name, e in entries.items():
        e.published_labels = _PUBLISHED_LABELS.get(name, [])
        e.starred = name in _STARRED
        e.aliases = tuple(a for a, target in _ALIASES.items() if target == name)
    return entries


def names() -> list:
    return list(catalog())


def get(name: str) -> CatalogEntry:
    """Look up by canonical name or alias (case-insensitive for aliases)."""
    entries = catalog()
    if name in entries:
        return entries[name]
    key = name.strip()
    spaced = key.replace("_", " ").replace("-", " ").lower()
    for candidate in (key, key.upper(), key.lower(), spaced):
        if candidate in entries:
            return entries[candidate]
        if candidate in _ALIASES:
            return entries[_ALIASES[candidate]]
    raise UnknownSolidError(name)


_CUSTOM_CONFIGS: dict = {}


def configurations_for(P: Polytope) -> list:
    """Configurations of a catalog solid (by name), else of its affine symmetry group."""
    if P.name:
        try:
            entry = get(P.name)
        except UnknownSolidError:
            entry = None
        if entry is not None and entry.polytope == P:
            return entry.configurations
    key = (P.dim, P.vertices)
    if key not in _CUSTOM_CONFIGS:
        _CUSTOM_CONFIGS[key] = enumerate_configurations(P, affine_symmetries(P.vertices))
    return _CUSTOM_CONFIGS[key]


# ---------------------------------------------------------------------------
# reference registry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Reference:
    """A published value.

    ``quantity`` is ``"moment"`` (``v_n^(k)`` of the whole solid, ``n``
    defaulting to the dimension) or ``"config"`` (one configuration's
    contribution before weighting).  ``erratum`` holds a corrected value
    when the printed one is demonstrably inconsistent.
    """

    solid: str
    quantity: str
    k: int
    value: ClosedFormValue
    provenance: str
    n: int | None = None
    config: str | None = None
    erratum: ClosedFormValue | None = None

    @property
    def key(self) -> tuple:
        return (self.solid, self.quantity, self.n, self.k, self.config)

    def __float__(self) -> float:
        return float(self.value)


def _q(text: str) -> mpq:
    return parse_rational(text)


def _cf(rational="0", pi2="0", pi4="0") -> ClosedFormValue:
    return ClosedFormValue(_q(rational), _q(pi2), _q(pi4))


def _high_precision(expr: Callable) -> ClosedFormValue:
    """Evaluate a printed expression with logs, zeta(3) or Li2 at 40 digits."""
    with mpmath.workdps(40):
        return ClosedFormValue(approx=float(expr(mpmath)))


def _frac(mp, p, q):
    return mp.mpf(p) / q


_EVEN_TABLE = "table of even moments of simplices, cubes and cross-polytopes"
_ODD3_TABLE = "table of odd moments of the tetrahedron, cube and octahedron"
_ODDT_TABLE = "table of odd moments of simplices in dimensions 3 to 6"
_TETRA_TABLE = "table of mean tetrahedron volumes in polyhedra"
_TESSERACT = "table of odd moments of the tesseract"

_EVEN = {
    "T": {1: ("1/6", "1/15", "1/28"),
          2: ("1/72", "1/900", "403/2116800"),
          3: ("3/4000", "871/123480000", "2797/11202105600"),
          4: ("1/33750", "2083/96808320000", "28517/264649744800000"),
          5: ("5/5445468", "24995/682923373461504", "11490716929/618668393733836328960000")},
    "C": {2: ("1/96", "1/2400", "761/27095040"),
          3: ("1/2592", "701/839808000", "29563/7466363412480"),
          4: ("5/497664", "887/1146617856000", "6207797/38533602917272780800"),
          5: ("1/4976640", "2899/7166361600000000", "3591192719/1348676102104547328000000000")},
    "O": {3: ("3/8000", "4259/5268480000", "7200523/1835352981504000"),
          4: ("1/108000", "3959/5664669696000", "74002087/462508951339008000000"),
          5: ("5/29042496", "228685/699313534424580096", "7261177207/405955079162673083006928814080000")},
}

_TRIANGLE = ["1", "1/12", "1/72", "31/9000", "1/900", "1063/2469600", "403/2116800",
             "211/2268000", "13/2646000", "2593/93915360"]
_SQUARE = [None, "11/144", "1/96", "137/72000", "1/2400", "363/3512320", "761/27095040",
           "7129/870912000", "61/24192000", "83711/103038566400"]


def _build_references() -> list:
    refs = []
    add = refs.append
    for family, rows in _EVEN.items():
        for d, values in rows.items():
            for k, text in zip((2, 4, 6), values):
                add(Reference(f"{family}{d}", "moment", k, _cf(text), f"{_EVEN_TABLE}, {family}_d row d={d}, k={k}"))
    for k, text in enumerate(_TRIANGLE):
        if k in (2, 4, 6):
            continue  # already present from the even table
        erratum = _cf("13/264600") if k == 8 else None
        add(Reference("T2", "moment", k, _cf(text), f"table of triangle area moments, k={k}", erratum=erratum))
    for k, text in enumerate(_SQUARE):
        if text is None or k in (2, 4, 6):
            continue
        add(Reference("C2", "moment", k, _cf(text), f"table of square area moments, k={k}"))

    odd3 = {
        "T3": [("13/720", "-1/15015"), ("733/12600000", "79/2424922500"),
               ("5125739/4356374400000", "-547/8943995970000")],
        "C3": [("3977/216000", "-1/2160"), ("8411819/450084600000", "-1/3402000"),
               ("-2225580641145943786613/91479676456923955200000", "306749173351/124439390208000")],
        "O3": [("-6619/184320", "19297/3843840"), ("-81932629/103219200000", "1628355709/19864965120000"),
               ("-205491225433/5287025049600000", "6356364544399/1611922729697280000")],
    }
    for solid, rows in odd3.items():
        for k, (a, b) in zip((1, 3, 5), rows):
            add(Reference(solid, "moment", k, _cf(a, b), f"{_ODD3_TABLE}, {solid}, k={k}"))
    oddT = {
        (4, 1): ("97/27000", "-2173/52026975", "0"),
        (5, 1): ("2207/3265920", "-244129/14522729760", "73522/541513323351"),
        (6, 1): ("26609/217818720", "-3396146609/621871356506400", "1318349152898/12180206401298390455"),
        (4, 3): ("1955399/3403417500000", "63065881/39669996140775000", "0"),
        (5, 3): ("362173019/98363448852480000", "10217818563857/557436796045056999751680",
                 "602363516243/569934065465972279392320"),
        (4, 5): ("12443146181/9803685146371200000", "-1262701803371/3557043272871373325040000", "0"),
    }
    for (d, k), (a, b, c) in oddT.items():
        add(Reference(f"T{d}", "moment", k, _cf(a, b, c), f"{_ODDT_TABLE}, d={d}, k={k}"))

    # per-configuration contributions (unweighted)
    add(Reference("T3", "config", 1, _cf("3/2000"), "tetrahedron configuration I worked example", config="I"))
    add(Reference("T3", "config", 1, _cf("217/54000", "-1/45045"),
                  "tetrahedron configuration II worked example", config="II"))
    add(Reference("T4", "config", 1, _cf("1/16875"), "pentachoron configuration I worked example", config="I"))
    add(Reference("T4", "moment", 1, _cf("97/9000", "-2173/17342325"),
                  "pentachoron metric moment with six points via the projection relation", n=5))

    # tesseract and polyhedra: printed closed forms evaluated at high precision
    add(Reference("C4", "moment", 1, _high_precision(lambda mp: (
        _frac(mp, 31874628962521753237, 1058357013719040000000) - _frac(mp, 26003, 1399680000) * mp.pi ** 2
        + _frac(mp, 610208, 1913625) * mp.log(2) - _frac(mp, 536557, 2592000) * mp.zeta(3))),
        f"{_TESSERACT}, k=1 (printed closed form evaluated at 40 digits)"))
    add(Reference("C4", "moment", 3, _high_precision(lambda mp: (
        _frac(mp, 19330626155629115959, 1682723192209145856000000)
        - _frac(mp, 52276897, 216801070940160000) * mp.pi ** 2
        + _frac(mp, 10004540239, 77977156950000) * mp.log(2)
        - _frac(mp, 6155594561, 73741860864000) * mp.zeta(3))),
        f"{_TESSERACT}, k=3 (printed closed form evaluated at 40 digits)"))

    def li2q(mp):
        return mp.polylog(2, mp.mpf(1) / 4)

    poly = {
        "rhombic dodecahedron": lambda mp: (
            _frac(mp, 2421179003623, 17933819904000) + _frac(mp, 37061863, 29889699840) * mp.pi ** 2
            - _frac(mp, 9406373047, 9340531200) * mp.log(2) - _frac(mp, 1757220593, 2490808320) * mp.log(2) ** 2
            + _frac(mp, 282589831, 283852800) * mp.log(3) - _frac(mp, 6078271, 8515584) * li2q(mp)),
        "cuboctahedron": lambda mp: (
            _frac(mp, 117410162173, 525525000000) + _frac(mp, 8752199, 2402400000) * mp.pi ** 2
            - _frac(mp, 192940695481, 105105000000) * mp.log(2) - _frac(mp, 318759601, 250250000) * mp.log(2) ** 2
            + _frac(mp, 506316394917, 280280000000) * mp.log(3) - _frac(mp, 648098487, 500500000) * li2q(mp)),
        "truncated tetrahedron": lambda mp: (
            _frac(mp, 35604506258521, 162358039443600) - _frac(mp, 13447020779, 96641690145) * mp.pi ** 2
            + _frac(mp, 9972537226592, 3382459155075) * mp.log(2)
            + _frac(mp, 3485442712, 1400604205) * mp.log(2) ** 2
            - _frac(mp, 8953623027, 7884520175) * mp.log(3)
            - _frac(mp, 53493528168, 32213896715) * mp.log(2) * mp.log(3)
            + _frac(mp, 53162662164, 32213896715) * li2q(mp)),
        "triangular bipyramid": lambda mp: (
            _frac(mp, 1712190037, 16812956160) + _frac(mp, 81471636487, 907899632640) * mp.pi ** 2
            - _frac(mp, 185777703053, 50438868480) * mp.log(2)
            - _frac(mp, 909434448983, 121053284352) * mp.log(2) ** 2
            + _frac(mp, 3498264683, 2401850880) * mp.log(3)
            + _frac(mp, 20912895, 2050048) * mp.log(2) * mp.log(3)
            - _frac(mp, 1887867, 585728) * mp.log(3) ** 2
            - _frac(mp, 62045573287, 57644421120) * li2q(mp)),
    }
    for solid, expr in poly.items():
        add(Reference(solid, "moment", 1, _high_precision(expr),
                      f"{_TETRA_TABLE}, {solid} (printed closed form evaluated at 40 digits)"))
    add(Reference("triangular prism", "moment", 1, _cf("1859/116640", "-1/17010"), f"{_TETRA_TABLE}, triangular prism"))
    add(Reference("square pyramid", "moment", 1, _cf("-977/8640", "941/72072"), f"{_TETRA_TABLE}, square pyramid"))
    return refs


REFERENCES: list = _build_references()

# 95% interval quoted for a 4e10-trial simulation of the pentachoron mean volume
T4_MC_INTERVAL = (0.00318034, 0.00318043)


def references_for(solid: str) -> dict:
    name = get(solid).name
    return {r.key: r for r in REFERENCES if r.solid == name}


def reference(solid: str, k: int, *, quantity: str = "moment", n: int | None = None,
              config: str | None = None) -> Reference | None:
    name = get(solid).name
    for r in REFERENCES:
        if (r.solid, r.quantity, r.n, r.k, r.config) == (name, quantity, n, k, config):
            return r
    return None


def lint_references(refs: Sequence[Reference] | None = None) -> list:
    """Problems found in the registry; an empty list means it is clean."""
    problems = []
    seen = set()
    known = set(catalog())
    for r in REFERENCES if refs is None else refs:
        where = f"{r.solid}/{r.quantity}/k={r.k}" + (f"/{r.config}" if r.config else "")
        if r.solid not in known:
            problems.append(f"{where}: solid not in the catalog")
        elif get(r.solid).starred:
            problems.append(f"{where}: value attached to a solid whose value is not published")
        if not r.provenance or not r.provenance.strip():
            problems.append(f"{where}: missing provenance")
        if r.key in seen:
            problems.append(f"{where}: duplicate entry")
        seen.add(r.key)
        if not r.value.is_exact:
            digits = len(Decimal(repr(float(r.value))).normalize().as_tuple().digits)
            if digits < 12:
                problems.append(f"{where}: float reference has only {digits} significant digits")
    return problems

"""Convex polytopes with exact rational coordinates.

A :class:`Polytope` is stored by its vertex list.  Facets, edges, a
triangulation and the volume are derived lazily and cached on the instance,
so a polytope should be treated as immutable once built.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from math import factorial
from typing import Iterable, Sequence

from gmpy2 import mpq

from .rational import (
    ONE,
    ZERO,
    Rational,
    as_rational,
    as_vector,
    det,
    dot,
    nullspace,
    primitive_integer,
    rank,
    solve,
)

__all__ = [
    "DegenerateError",
    "UnboundedError",
    "Hyperplane",
    "Halfspace",
    "Simplex",
    "Polytope",
    "hrep_from_vrep",
    "vrep_from_hrep",
    "slice_polytope",
    "triangulate",
    "volume",
    "monomial_moment",
    "section_chart",
    "multi_indices",
    "simplex_moments",
]

MAX_DIM = 6


class DegenerateError(ValueError):
    """Raised when an operation needs a full-dimensional or non-empty input."""


class UnboundedError(ValueError):
    """Raised when a halfspace system does not describe a bounded set."""


@dataclass(frozen=True)
class Hyperplane:
    """The plane ``{x : eta . x = 1}``."""

    eta: tuple

    def __init__(self, eta: Iterable):
        vec = as_vector(eta)
        if not vec or all(v == 0 for v in vec):
            raise ValueError("eta must be a non-zero vector")
        object.__setattr__(self, "eta", vec)

    @property
    def dim(self) -> int:
        return len(self.eta)

    def value(self, x: Sequence) -> Rational:
        """Signed value ``eta . x - 1``; zero exactly on the plane."""
        return dot(self.eta, x) - 1


@dataclass(frozen=True)
class Halfspace:
    """``normal . x <= offset``."""

    normal: tuple
    offset: Rational

    def __init__(self, normal: Iterable, offset):
        object.__setattr__(self, "normal", as_vector(normal))
        object.__setattr__(self, "offset", as_rational(offset))

    def contains(self, x: Sequence, strict: bool = False) -> bool:
        v = dot(self.normal, x)
        return v < self.offset if strict else v <= self.offset

    def is_tight(self, x: Sequence) -> bool:
        return dot(self.normal, x) == self.offset


class Simplex:
    """An m-simplex given by m+1 affinely independent points in R^d."""

    __slots__ = ("points",)

    def __init__(self, points: Iterable[Sequence]):
        pts = tuple(as_vector(p) for p in points)
        if not pts:
            raise DegenerateError("a simplex needs at least one point")
        base = pts[0]
        edges = [[a - b for a, b in zip(p, base)] for p in pts[1:]]
        if edges and rank(edges) < len(edges):
            raise DegenerateError("simplex points are affinely dependent")
        self.points = pts

    @property
    def m(self) -> int:
        return len(self.points) - 1

    @property
    def dim(self) -> int:
        return len(self.points[0])

    def volume(self) -> Rational:
        """Volume in R^m; only defined when the simplex is full-dimensional."""
        if self.m != self.dim:
            raise DegenerateError("volume of a lower-dimensional simplex is not rational in general")
        return abs(_edge_det(self.points)) / factorial(self.m)

    def __repr__(self) -> str:
        return f"Simplex({[[str(c) for c in p] for p in self.points]})"


def _edge_det(points) -> Rational:
    base = points[0]
    return det([[a - b for a, b in zip(p, base)] for p in points[1:]])


def _affine_rank(points: Sequence[Sequence]) -> int:
    if len(points) <= 1:
        return 0
    base = points[0]
    return rank([[a - b for a, b in zip(p, base)] for p in points[1:]])


def _dedupe(points) -> list:
    seen = set()
    out = []
    for p in points:
        key = tuple(p)
        if key not in seen:
            seen.add(key)
            out.append(key)
    return out


class Polytope:
    """Convex hull of finitely many rational points.

    Parameters
    ----------
    vertices:
        Points of the hull.  Unless ``trusted`` is set, duplicates and
        non-extreme points are removed, keeping the original order of the
        surviving points (the vertex order matters to symmetry generators).
    name:
        Optional label used by the catalog and reports.
    """

    def __init__(self, vertices: Iterable[Sequence], *, name: str | None = None,
                 dim: int | None = None, trusted: bool = False):
        pts = _dedupe(as_vector(p) for p in vertices)
        if pts:
            d = len(pts[0])
            if any(len(p) != d for p in pts):
                raise ValueError("all vertices must have the same dimension")
            if dim is not None and dim != d:
                raise ValueError("dimension tag does not match the vertices")
        else:
            d = dim if dim is not None else 0
        if d > MAX_DIM:
            raise ValueError(f"ambient dimension {d} exceeds the supported maximum {MAX_DIM}")
        self.dim = d
        self.name = name
        if not trusted and len(pts) > 1:
            pts = _extreme_points(pts)
        self.vertices = tuple(pts)

    # ---- basic structure -------------------------------------------------
    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        label = self.name or "Polytope"
        return f"<{label}: {len(self.vertices)} vertices in R^{self.dim}>"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polytope):
            return NotImplemented
        return self.dim == other.dim and set(self.vertices) == set(other.vertices)

    def __hash__(self) -> int:
        return hash((self.dim, frozenset(self.vertices)))

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @cached_property
    def intrinsic_dim(self) -> int:
        if not self.vertices:
            return -1
        return _affine_rank(self.vertices)

    @property
    def is_full_dimensional(self) -> bool:
        return self.intrinsic_dim == self.dim

    @cached_property
    def chart(self):
        """Deterministic affine chart of the affine hull.

        Returns ``(origin, basis, coords)`` where ``origin`` is the first
        vertex, ``basis`` holds the first independent edge vectors from it
        and ``coords[i]`` are the chart coordinates of vertex ``i``.
        """
        return _chart(self.vertices)

    # ---- facets and edges ------------------------------------------------
    @cached_property
    def facets(self) -> tuple:
        """Facet list ``(Halfspace, frozenset of incident vertex indices)``."""
        if not self.is_full_dimensional or self.dim == 0:
            raise DegenerateError(
                f"facets need a full-dimensional polytope (intrinsic dim {self.intrinsic_dim}, ambient {self.dim})"
            )
        return tuple(_facets_full(self.vertices))

    @cached_property
    def _chart_facets(self) -> tuple:
        """Facet incidence sets computed in the chart (works for any dimension)."""
        m = self.intrinsic_dim
        if m <= 0:
            return ()
        coords = self.chart[2]
        return tuple(inc for _, inc in _facets_full(coords))

    @cached_property
    def edges(self) -> tuple:
        """Pairs ``(i, j)`` with ``i < j`` spanning 1-dimensional faces."""
        m = self.intrinsic_dim
        if m <= 0:
            return ()
        if m == 1:
            return ((0, 1),)
        incid = self._chart_facets
        by_vertex = [frozenset(f for f, inc in enumerate(incid) if i in inc) for i in range(len(self.vertices))]
        out = []
        for i, j in combinations(range(len(self.vertices)), 2):
            common = by_vertex[i] & by_vertex[j]
            if len(common) < m - 1:
                continue
            face = [k for k in range(len(self.vertices)) if common <= by_vertex[k]]
            if len(face) == 2:
                out.append((i, j))
        return tuple(out)

    # ---- triangulation, volume, moments ---------------------------------
    @cached_property
    def triangulation_indices(self) -> tuple:
        """Fan triangulation as tuples of vertex indices (see :func:`triangulate`)."""
        m = self.intrinsic_dim
        if m < 0:
            return ()
        if m == 0:
            return ((0,),)
        return tuple(_fan_triangulation(self.chart[2], self._chart_facets))

    def simplices(self) -> list:
        return [Simplex([self.vertices[i] for i in s]) for s in self.triangulation_indices]

    @cached_property
    def volume(self) -> Rational:
        """Exact volume; for lower-dimensional input the volume of the chart image."""
        m = self.intrinsic_dim
        if m < 0:
            return ZERO
        if m == 0:
            return ONE if self.dim == 0 else ZERO
        pts = self.vertices if m == self.dim else self.chart[2]
        total = sum((abs(_edge_det([pts[i] for i in s])) for s in self.triangulation_indices), ZERO)
        return total / factorial(m)

    def moments(self, max_degree: int) -> dict:
        """Normalised monomial moments ``E[x^alpha]`` for all ``|alpha| <= max_degree``."""
        return _polytope_moments(self, max_degree)

    # ---- transforms -----------------------------------------------------
    def affine_image(self, matrix: Sequence[Sequence], shift: Sequence | None = None) -> "Polytope":
        """Image under ``x -> A x + b`` (vertex order preserved)."""
        A = [as_vector(r) for r in matrix]
        b = as_vector(shift) if shift is not None else (ZERO,) * len(A)
        pts = [tuple(dot(row, v) + bi for row, bi in zip(A, b)) for v in self.vertices]
        return Polytope(pts, name=self.name, trusted=det(A) != 0 if len(A) == self.dim else False)

    def scaled(self, factor) -> "Polytope":
        f = as_rational(factor)
        return Polytope([tuple(f * c for c in v) for v in self.vertices], name=self.name, trusted=f != 0)


# ---------------------------------------------------------------------------
# representation conversion
# ---------------------------------------------------------------------------

def _chart(vertices):
    origin = vertices[0]
    basis = []
    for v in vertices[1:]:
        cand = tuple(a - b for a, b in zip(v, origin))
        if rank(basis + [cand]) > len(basis):
            basis.append(cand)
    m = len(basis)
    if m == len(origin):
        # full-dimensional: coordinates in the basis are an affine bijection;
        # keeping ambient coordinates would also do, but the chart must be
        # uniform for lower dimensions, so solve anyway.
        pass
    gram = [[dot(b1, b2) for b2 in basis] for b1 in basis]
    coords = []
    for v in vertices:
        diff = tuple(a - b for a, b in zip(v, origin))
        rhs = [dot(b1, diff) for b1 in basis]
        sol = solve(gram, rhs) if basis else ()
        coords.append(tuple(sol))
    return origin, tuple(basis), tuple(coords)


def _facets_full(points) -> list:
    """Facets of a full-dimensional point set by exhaustive d-subset search."""
    d = len(points[0])
    n = len(points)
    if d == 1:
        lo = min(range(n), key=lambda i: points[i][0])
        hi = max(range(n), key=lambda i: points[i][0])
        return [
            (Halfspace((ONE,), points[hi][0]), frozenset(i for i in range(n) if points[i][0] == points[hi][0])),
            (Halfspace((-ONE,), -points[lo][0]), frozenset(i for i in range(n) if points[i][0] == points[lo][0])),
        ]
    seen = {}
    for idx in combinations(range(n), d):
        rows = [list(points[i]) + [ONE] for i in idx]
        ns = nullspace(rows)
        if len(ns) != 1:
            continue
        vec = ns[0]
        normal, off = vec[:d], -vec[d]
        if all(c == 0 for c in normal):
            continue
        vals = [dot(normal, p) - off for p in points]
        if all(v <= 0 for v in vals):
            pass
        elif all(v >= 0 for v in vals):
            normal = tuple(-c for c in normal)
            off = -off
        else:
            continue
        key = primitive_integer(tuple(normal) + (off,))
        if key in seen:
            continue
        prim = tuple(mpq(c) for c in key)
        hs = Halfspace(prim[:d], prim[d])
        inc = frozenset(i for i in range(n) if hs.is_tight(points[i]))
        seen[key] = (hs, inc)
    return list(seen.values())


def _extreme_points(points) -> list:
    m = _affine_rank(points)
    if m == 0:
        return [points[0]]
    _, _, coords = _chart(points)
    if m == 1:
        lo = min(range(len(points)), key=lambda i: coords[i][0])
        hi = max(range(len(points)), key=lambda i: coords[i][0])
        return [points[i] for i in sorted({lo, hi})]
    facets = _facets_full(coords)
    keep = []
    for i, p in enumerate(points):
        normals = [list(hs.normal) for hs, inc in facets if i in inc]
        if len(normals) >= m and rank(normals) == m:
            keep.append(p)
    return keep


def hrep_from_vrep(P: Polytope) -> list:
    """Facet-defining halfspaces ``normal . x <= offset`` of a full-dimensional polytope.

    Normals are scaled to coprime integers, so the list is canonical up to
    order.  The order follows the first d-subset of vertices that spans each
    facet.
    """
    if P.is_empty or not P.is_full_dimensional:
        raise DegenerateError(
            f"H-representation needs a full-dimensional polytope (intrinsic dim {P.intrinsic_dim}, ambient {P.dim})"
        )
    return [hs for hs, _ in P.facets]


def vrep_from_hrep(halfspaces: Sequence, dim: int | None = None) -> Polytope:
    """Vertices of a bounded polyhedron ``{x : normal . x <= offset}``.

    Every d-subset of constraints with an invertible normal matrix is solved
    exactly and kept when it satisfies the remaining constraints.  An empty
    region yields an empty polytope; an unbounded one raises
    :class:`UnboundedError`.
    """
    hs = [h if isinstance(h, Halfspace) else Halfspace(*h) for h in halfspaces]
    if not hs:
        raise UnboundedError("no constraints")
    d = len(hs[0].normal) if dim is None else dim
    verts = []
    for idx in combinations(range(len(hs)), d):
        sol = solve([hs[i].normal for i in idx], [hs[i].offset for i in idx])
        if sol is None:
            continue
        if all(h.contains(sol) for h in hs):
            verts.append(sol)
    verts = _dedupe(verts)
    if not verts:
        if _recession_nonzero(hs, d):
            raise UnboundedError("halfspace system has no vertex and a non-trivial recession cone")
        return Polytope([], dim=d)
    if _recession_nonzero(hs, d):
        raise UnboundedError("halfspace system describes an unbounded region")
    return Polytope(sorted(verts), dim=d, trusted=True)


def _recession_nonzero(hs, d) -> bool:
    """True when some non-zero direction y has normal . y <= 0 for all constraints."""
    from .lp import strict_feasible, LinearInequality

    # bounded iff no direction y != 0 with A y <= 0.  Test each coordinate
    # sign: y_j >= 1 or y_j <= -1 together with A y <= 0 (a homogeneous cone,
    # so scaling makes the unit bound harmless).
    for j in range(d):
        for s in (1, -1):
            unit = [ZERO] * d
            unit[j] = mpq(-s)
            ineqs = [LinearInequality(h.normal, ZERO, strict=False) for h in hs]
            ineqs.append(LinearInequality(unit, mpq(-1), strict=False))
            if strict_feasible(ineqs):
                return True
    return False


# ---------------------------------------------------------------------------
# slicing
# ---------------------------------------------------------------------------

def _cut_points(vertices, edges, values):
    """Vertices of the two closed sides and the section of a cut.

    ``values[i]`` is the signed value of vertex ``i``; the cutting plane is
    the zero set of the (affine) function that produced them.
    """
    plus, minus, sec = [], [], []
    for v, s in zip(vertices, values):
        if s <= 0:
            plus.append(v)
        if s >= 0:
            minus.append(v)
        if s == 0:
            sec.append(v)
    for i, j in edges:
        si, sj = values[i], values[j]
        if (si < 0 < sj) or (sj < 0 < si):
            vi, vj = vertices[i], vertices[j]
            t = si / (si - sj)
            x = tuple(a + t * (b - a) for a, b in zip(vi, vj))
            plus.append(x)
            minus.append(x)
            sec.append(x)
    return _dedupe(plus), _dedupe(minus), _dedupe(sec)


def slice_polytope(P: Polytope, H: Hyperplane):
    """Split ``P`` by ``H`` into ``(P_plus, P_minus, section)``.

    ``P_plus`` is the part with ``eta . x <= 1`` (the side of the origin when
    the origin lies off the plane), ``P_minus`` the part with
    ``eta . x >= 1`` and ``section`` their common face.  Empty pieces are
    returned as empty polytopes of the same ambient dimension.
    """
    if H.dim != P.dim:
        raise ValueError("hyperplane and polytope dimensions differ")
    values = [H.value(v) for v in P.vertices]
    plus, minus, sec = _cut_points(P.vertices, P.edges, values)
    return (
        Polytope(plus, dim=P.dim, trusted=True),
        Polytope(minus, dim=P.dim, trusted=True),
        Polytope(sec, dim=P.dim, trusted=True),
    )


# ---------------------------------------------------------------------------
# triangulation
# ---------------------------------------------------------------------------

def _fan_triangulation(coords, facet_sets):
    """Fan from the lowest-index vertex over recursively triangulated facets.

    ``coords`` are full-dimensional chart coordinates and ``facet_sets`` the
    vertex-index sets of the facets.  Faces of a face are found as its
    intersections with facets that drop the affine dimension by one.
    """
    rank_cache = {}

    def face_dim(face):
        r = rank_cache.get(face)
        if r is None:
            r = _affine_rank([coords[i] for i in sorted(face)])
            rank_cache[face] = r
        return r

    def subfaces(face, k):
        found = []
        for f in facet_sets:
            sub = face & f
            if sub == face or len(sub) < k:
                continue
            if sub in found:
                continue
            if face_dim(sub) == k - 1:
                found.append(sub)
        return found

    def fan(face, k):
        if k == 0:
            return [(min(face),)]
        apex = min(face)
        out = []
        subs = facet_sets if k == len(coords[0]) else subfaces(face, k)
        for sub in sorted(subs, key=lambda s: sorted(s)):
            if apex in sub:
                continue
            for simp in fan(sub, k - 1):
                out.append((apex,) + simp)
        return out

    everything = frozenset(range(len(coords)))
    return fan(everything, len(coords[0]))


def triangulate(P: Polytope) -> list:
    """Simplices with disjoint interiors covering ``P``."""
    return P.simplices()


def volume(P: Polytope) -> Rational:
    return P.volume


# ---------------------------------------------------------------------------
# monomial moments
# ---------------------------------------------------------------------------

def multi_indices(m: int, max_degree: int) -> list:
    """All exponent tuples of length ``m`` with total degree ``<= max_degree``."""
    out = []

    def rec(prefix, left, pos):
        if pos == m:
            out.append(tuple(prefix))
            return
        for e in range(left + 1):
            prefix.append(e)
            rec(prefix, left - e, pos + 1)
            prefix.pop()

    rec([], max_degree, 0)
    out.sort(key=lambda a: (sum(a), tuple(-x for x in a)))
    return out


_INDEX_CACHE: dict = {}


def _indices(m, K):
    key = (m, K)
    got = _INDEX_CACHE.get(key)
    if got is None:
        idx = multi_indices(m, K)
        pos = {a: i for i, a in enumerate(idx)}
        # pairwise products truncated at degree K, as (i, j, target) triples
        prods = []
        for i, a in enumerate(idx):
            for j, b in enumerate(idx):
                if sum(a) + sum(b) <= K:
                    prods.append((i, j, pos[tuple(x + y for x, y in zip(a, b))]))
        from math import factorial as fct

        # multinomial weights |alpha|!/alpha!
        mult = []
        for a in idx:
            w = fct(sum(a))
            for x in a:
                w //= fct(x)
            mult.append(w)
        got = (idx, pos, prods, mult)
        _INDEX_CACHE[key] = got
    return got


def simplex_moments(points: Sequence[Sequence], max_degree: int) -> list:
    """Normalised moments ``E[x^alpha]`` of the uniform law on a full simplex.

    Uses the generating identity
    ``sum_alpha E[x^alpha] (m+|alpha|)!/(m! alpha!) t^alpha = prod_i 1/(1 - t.v_i)``,
    which is the barycentric multinomial expansion combined with the
    Dirichlet integral, evaluated for all exponents at once.  The result is a
    list aligned with ``multi_indices(m, max_degree)``.
    """
    m = len(points[0])
    idx, pos, prods, mult = _indices(m, max_degree)
    n = len(idx)
    # factor for vertex v: sum_alpha |alpha|!/alpha! v^alpha t^alpha
    acc = None
    for v in points:
        fac = [ZERO] * n
        for i, a in enumerate(idx):
            term = mpq(mult[i])
            for c, e in zip(v, a):
                if e:
                    term *= c ** e
            fac[i] = term
        if acc is None:
            acc = fac
            continue
        new = [ZERO] * n
        for i, j, t in prods:
            ai = acc[i]
            if ai:
                fj = fac[j]
                if fj:
                    new[t] += ai * fj
        acc = new
    # E[x^alpha] = alpha! m!/(m+|alpha|)! * coefficient
    out = []
    for i, a in enumerate(idx):
        k = sum(a)
        num = factorial(m)
        for x in a:
            num *= factorial(x)
        out.append(acc[i] * num / factorial(m + k))
    return out


def _polytope_moments(P: Polytope, max_degree: int) -> dict:
    if P.is_empty:
        raise DegenerateError("moments of an empty polytope")
    m = P.intrinsic_dim
    pts = P.vertices if m == P.dim else P.chart[2]
    if m == 0:
        raise DegenerateError("moments of a point")
    idx = multi_indices(m, max_degree)
    total = [ZERO] * len(idx)
    vol = ZERO
    for s in P.triangulation_indices:
        spts = [pts[i] for i in s]
        w = abs(_edge_det(spts))
        vol += w
        mom = simplex_moments(spts, max_degree)
        for i, val in enumerate(mom):
            total[i] += w * val
    if vol == 0:
        raise DegenerateError("zero-volume polytope has no normalised moments")
    return {a: t / vol for a, t in zip(idx, total)}


def monomial_moment(P: Polytope, alpha: Sequence[int]) -> Rational:
    """Normalised moment ``(1/vol P) * integral over P of prod x_i^alpha_i``."""
    alpha = tuple(int(a) for a in alpha)
    if any(a < 0 for a in alpha):
        raise ValueError("exponents must be non-negative")
    if P.is_empty or not P.is_full_dimensional:
        raise DegenerateError("monomial moments need a full-dimensional polytope")
    if len(alpha) != P.dim:
        raise ValueError("multi-index length must equal the dimension")
    return P.moments(sum(alpha))[alpha]


# ---------------------------------------------------------------------------
# charts of sections
# ---------------------------------------------------------------------------

def section_chart(section: Polytope, method: str = "edges") -> Polytope:
    """Rational (d-1)-dimensional polytope affinely equivalent to a section.

    ``method="edges"`` uses the first vertex as origin and the first d-1
    independent edge vectors from it as basis; coordinates are the exact
    solution of the resulting linear system.  ``method="drop"`` projects out
    the first coordinate whose removal keeps the section full-dimensional.
    Both are affine bijections onto their image, so affinely invariant
    quantities agree on either chart.
    """
    d = section.dim
    if section.is_empty or section.intrinsic_dim != d - 1:
        raise DegenerateError(
            f"section of intrinsic dimension {section.intrinsic_dim} cannot be charted in R^{d - 1}"
        )
    if d == 1:
        return Polytope([()], dim=0, trusted=True)
    if method == "edges":
        origin = section.vertices[0]
        basis = []
        for v in section.vertices[1:]:
            cand = tuple(a - b for a, b in zip(v, origin))
            if rank(basis + [cand]) > len(basis):
                basis.append(cand)
            if len(basis) == d - 1:
                break
        # pick d-1 coordinate rows of the basis matrix that are invertible
        cols = None
        for cand_cols in combinations(range(d), d - 1):
            sub = [[b[c] for c in cand_cols] for b in basis]
            if det(sub) != 0:
                cols = cand_cols
                break
        mat = [[basis[j][c] for j in range(d - 1)] for c in cols]
        pts = []
        for v in section.vertices:
            diff = [v[c] - origin[c] for c in cols]
            pts.append(solve(mat, diff))
        return Polytope(pts, trusted=True)
    if method == "drop":
        for j in range(d):
            pts = [tuple(c for i, c in enumerate(v) if i != j) for v in section.vertices]
            if _affine_rank(pts) == d - 1:
                return Polytope(pts, trusted=True)
        raise DegenerateError("no coordinate projection is injective on the section")
    raise ValueError(f"unknown chart method {method!r}")

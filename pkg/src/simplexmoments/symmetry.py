"""Vertex symmetry groups, section configurations and their genealogy.

A *selection* is a set of vertex indices, stored as an integer bitmask.  Two
selections are section-equivalent when a group element maps one onto the
other or onto its complement (both describe the same cutting plane).  A
selection is *realisable* when some hyperplane ``eta . x = 1`` has exactly
the selected vertices strictly on one side and the rest strictly on the
other.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterable, Sequence

from .lp import EmptyRegionError, LinearInequality, interior_point, strict_feasible
from .polytope import Hyperplane, Polytope, slice_polytope
from .rational import ONE, as_vector, dot, solve

__all__ = [
    "VertexPermutation",
    "SymmetryGroup",
    "Configuration",
    "Genealogy",
    "group_closure",
    "orbit",
    "selection_region",
    "is_realisable",
    "enumerate_configurations",
    "build_genealogy",
    "export_dot",
    "roman",
    "affine_symmetries",
    "mask_of",
    "indices_of",
]


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def indices_of(mask: int) -> tuple:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def roman(n: int) -> str:
    if n <= 0:
        return "N"
    table = [(1000, "M"), (900, "CM"), (500, "D"), (400, "CD"), (100, "C"), (90, "XC"),
             (50, "L"), (40, "XL"), (10, "X"), (9, "IX"), (5, "V"), (4, "IV"), (1, "I")]
    out = ""
    for val, sym in table:
        while n >= val:
            out += sym
            n -= val
    return out


@dataclass(frozen=True)
class VertexPermutation:
    """Bijection of vertex indices, stored 0-based as its image list."""

    image: tuple

    def __init__(self, image: Iterable[int]):
        img = tuple(int(i) for i in image)
        if sorted(img) != list(range(len(img))):
            raise ValueError(f"not a permutation of 0..{len(img) - 1}: {img}")
        object.__setattr__(self, "image", img)

    @classmethod
    def from_images(cls, image: Sequence[int], one_based: bool = True) -> "VertexPermutation":
        return cls([i - 1 for i in image] if one_based else image)

    @classmethod
    def from_cycles(cls, cycles: Sequence[Sequence[int]], n: int, one_based: bool = True) -> "VertexPermutation":
        img = list(range(n))
        seen = set()
        for cyc in cycles:
            cyc = [c - 1 for c in cyc] if one_based else list(cyc)
            for c in cyc:
                if c in seen or not 0 <= c < n:
                    raise ValueError(f"invalid cycle {cyc}")
                seen.add(c)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                img[a] = b
        return cls(img)

    def __len__(self) -> int:
        return len(self.image)

    def __call__(self, i: int) -> int:
        return self.image[i]

    def compose(self, other: "VertexPermutation") -> "VertexPermutation":
        """``self after other``."""
        return VertexPermutation(self.image[j] for j in other.image)

    def inverse(self) -> "VertexPermutation":
        inv = [0] * len(self.image)
        for i, j in enumerate(self.image):
            inv[j] = i
        return VertexPermutation(inv)

    def apply_mask(self, mask: int) -> int:
        out = 0
        img = self.image
        i = 0
        while mask:
            if mask & 1:
                out |= 1 << img[i]
            mask >>= 1
            i += 1
        return out


@dataclass(frozen=True)
class SymmetryGroup:
    elements: frozenset
    generators: tuple

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def degree(self) -> int:
        return len(next(iter(self.elements)))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(sorted(self.elements, key=lambda g: g.image))


def group_closure(generators: Sequence) -> SymmetryGroup:
    """Smallest permutation group containing the generators."""
    gens = [g if isinstance(g, VertexPermutation) else VertexPermutation(g) for g in generators]
    if not gens:
        raise ValueError("at least one generator is needed")
    n = len(gens[0])
    if any(len(g) != n for g in gens):
        raise ValueError("generators act on different numbers of vertices")
    ident = VertexPermutation(range(n))
    elements = {ident}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = g.compose(x)
            if y not in elements:
                elements.add(y)
                queue.append(y)
    return SymmetryGroup(frozenset(elements), tuple(gens))


def orbit(sel: int, G: SymmetryGroup) -> frozenset:
    """Images of a selection bitmask under every group element."""
    return frozenset(g.apply_mask(sel) for g in G.elements)


def affine_symmetries(vertices: Sequence[Sequence]) -> SymmetryGroup:
    """All vertex permutations induced by affine maps preserving the vertex set.

    Used to validate stored generator lists; it is a brute-force search over
    images of one affine basis.
    """
    pts = [as_vector(v) for v in vertices]
    n, d = len(pts), len(pts[0])
    # pick an affine basis
    basis = [0]
    for i in range(1, n):
        cand = basis + [i]
        rows = [[a - b for a, b in zip(pts[j], pts[basis[0]])] for j in cand[1:]]
        from .rational import rank

        if rank(rows) == len(rows):
            basis = cand
        if len(basis) == d + 1:
            break
    lookup = {p: i for i, p in enumerate(pts)}
    src = [[a - b for a, b in zip(pts[j], pts[basis[0]])] for j in basis[1:]]
    found = set()
    for images in permutations(range(n), d + 1):
        dst = [[a - b for a, b in zip(pts[j], pts[images[0]])] for j in images[1:]]
        # linear part A with A src_i = dst_i: solve column by column (A^T)
        cols = []
        ok = True
        for c in range(d):
            sol = solve(src, [row[c] for row in dst])
            if sol is None:
                ok = False
                break
            cols.append(sol)
        if not ok:
            continue
        A = cols  # row c of A
        img = []
        for p in pts:
            diff = [a - b for a, b in zip(p, pts[basis[0]])]
            q = tuple(dot(A[c], diff) + pts[images[0]][c] for c in range(d))
            j = lookup.get(q)
            if j is None:
                ok = False
                break
            img.append(j)
        if ok and len(set(img)) == n:
            found.add(VertexPermutation(img))
    gens = tuple(sorted(found, key=lambda g: g.image))
    return SymmetryGroup(frozenset(found), gens)


# ---------------------------------------------------------------------------
# realisability
# ---------------------------------------------------------------------------

def selection_region(P: Polytope, sel: int, flipped: bool = False) -> list:
    """Strict inequalities on ``eta`` separating ``sel`` from the other vertices.

    Unflipped: ``eta . v < 1`` on the selection and ``eta . v > 1`` elsewhere.
    Inequalities that hold for every ``eta`` (the origin as a vertex on the
    ``< 1`` side) are dropped; a vertex at the origin on the ``> 1`` side
    makes the region empty, signalled by an unsatisfiable inequality.
    """
    out = []
    for i, v in enumerate(P.vertices):
        inside = bool((sel >> i) & 1) != flipped
        if inside:
            out.append(LinearInequality(v, ONE))
        else:
            out.append(LinearInequality(tuple(-c for c in v), -ONE))
    return [q for q in out if any(c != 0 for c in q.coeffs) or not q.rhs > 0]


def is_realisable(P: Polytope, sel: int) -> bool:
    return any(strict_feasible(selection_region(P, sel, f)) for f in (False, True))


# ---------------------------------------------------------------------------
# configurations
# ---------------------------------------------------------------------------

@dataclass
class Configuration:
    """One section-equivalence class of realisable selections."""

    representative: int
    size: int
    orbit_size: int
    weight: int
    order: int
    eta_region: list
    sample_eta: tuple
    flipped: bool
    label: str = ""
    published_label: str | None = None
    order_check: int | None = None
    complement_in_orbit: bool = True
    notes: list = field(default_factory=list)

    @property
    def vertices(self) -> tuple:
        return indices_of(self.representative)

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "published_label": self.published_label,
            "representative": list(self.vertices),
            "size": self.size,
            "o_C": self.orbit_size,
            "w_C": self.weight,
            "n_C": self.order,
            "sample_eta": [str(c) for c in self.sample_eta],
            "notes": list(self.notes),
        }


def _canonical(mask: int, n: int, G: SymmetryGroup) -> int:
    full = (1 << n) - 1
    best = min(orbit(mask, G))
    if 2 * bin(mask).count("1") == n:
        best = min(best, min(orbit(full ^ mask, G)))
    return best


def _section_order(P: Polytope, eta) -> int:
    _, _, sec = slice_polytope(P, Hyperplane(eta))
    return len(sec.vertices)


def _make_configuration(P: Polytope, G: SymmetryGroup, sel: int):
    n = len(P.vertices)
    for flipped in (False, True):
        region = selection_region(P, sel, flipped)
        if strict_feasible(region):
            break
    else:
        return None
    eta = interior_point(region)
    size = bin(sel).count("1")
    orb = orbit(sel, G)
    full = (1 << n) - 1
    comp_in = (full ^ sel) in orb
    if 2 * size < n:
        weight = len(orb)
    else:
        weight = len(orb | orbit(full ^ sel, G)) // 2
    order = _section_order(P, eta)
    cfg = Configuration(
        representative=sel, size=size, orbit_size=len(orb), weight=weight, order=order,
        eta_region=region, sample_eta=eta, flipped=flipped, complement_in_orbit=comp_in,
    )
    # second interior point: the homogenised solution, or the midpoint with it
    try:
        eta2 = interior_point(region, cap=3)
        if eta2 == eta:
            eta2 = tuple((a + b) / 2 for a, b in zip(eta, interior_point(region, cap=100)))
        if all(q.holds(eta2) for q in region):
            cfg.order_check = _section_order(P, eta2)
            if cfg.order_check != order:
                cfg.notes.append(f"section order differs at a second interior point: {cfg.order_check}")
    except EmptyRegionError:  # pragma: no cover - region known to be feasible
        pass
    if 2 * size == n and not comp_in:
        cfg.notes.append("complement not in the orbit; weight counts both orbits")
    return cfg


def enumerate_configurations(P: Polytope, G: SymmetryGroup, published_labels: Sequence | None = None) -> list:
    """Realisable section-equivalence classes, smallest selections first.

    Level ``s+1`` is generated from level ``s`` by adding one vertex to each
    representative; every realisable selection arises this way because
    dropping the selected vertex nearest to a separating plane keeps the rest
    separable.  Output order is ``(|S|, weight, bitmask)``.  The empty
    selection (plane missing the polytope) is the genealogy root and is not
    listed.

    ``published_labels`` optionally lists ``(label, weight, order)`` triples used
    to attach published roman-numeral labels; a signature matching several
    entries is flagged instead of guessed.
    """
    n = len(P.vertices)
    if G.degree != n:
        raise ValueError(f"group acts on {G.degree} points but the polytope has {n} vertices")
    level = [0]
    configs = []
    checked = 0
    for s in range(n // 2):
        seen = set()
        nxt = []
        for rep in level:
            for v in range(n):
                if (rep >> v) & 1:
                    continue
                cand = _canonical(rep | (1 << v), n, G)
                if cand in seen:
                    continue
                seen.add(cand)
                checked += 1
                cfg = _make_configuration(P, G, cand)
                if cfg is not None:
                    nxt.append(cfg)
        configs.extend(nxt)
        level = [c.representative for c in nxt]
        if not level:
            break
    configs.sort(key=lambda c: (c.size, c.weight, c.representative))
    for i, c in enumerate(configs, start=1):
        c.label = roman(i)
    if published_labels:
        _attach_published_labels(configs, published_labels)
    enumerate_configurations.last_checked = checked
    return configs


def _attach_published_labels(configs, published_labels):
    for cfg in configs:
        hits = [lab for lab, w, o in published_labels if w == cfg.weight and o == cfg.order]
        if len(hits) == 1:
            cfg.published_label = hits[0]
        elif len(hits) > 1:
            cfg.notes.append(f"signature (w={cfg.weight}, n={cfg.order}) matches labels {hits}")
        else:
            weight_hits = [(lab, o) for lab, w, o in published_labels if w == cfg.weight]
            if len(weight_hits) == 1:
                lab, o = weight_hits[0]
                cfg.published_label = lab
                cfg.notes.append(f"stored order for {lab} is {o}, computed {cfg.order}")
            else:
                cfg.notes.append("no stored label matches this signature")


# ---------------------------------------------------------------------------
# genealogy
# ---------------------------------------------------------------------------

@dataclass
class Genealogy:
    nodes: list  # labels, "N" first
    edges: list  # (parent label, child label)
    info: dict   # label -> (weight, order)


def build_genealogy(configs: Sequence[Configuration], G: SymmetryGroup) -> Genealogy:
    """Hasse diagram: parent -> child when a group image of the parent plus
    one vertex gives the child (or its complement, for half splits)."""
    if not configs:
        return Genealogy(["N"], [], {"N": (1, 0)})
    n = G.degree
    full = (1 << n) - 1
    nodes = ["N"] + [c.label for c in configs]
    info = {"N": (1, 0)}
    info.update({c.label: (c.weight, c.order) for c in configs})
    edges = []
    images = {c.label: orbit(c.representative, G) for c in configs}
    for child in configs:
        if child.size == 1:
            edges.append(("N", child.label))
            continue
        targets = [child.representative]
        if 2 * child.size == n:
            targets.append(full ^ child.representative)
        for parent in configs:
            if parent.size != child.size - 1:
                continue
            if any((img & t) == img for img in images[parent.label] for t in targets):
                edges.append((parent.label, child.label))
    return Genealogy(nodes, edges, info)


def export_dot(genealogy: Genealogy | None, name: str = "genealogy") -> str:
    """DOT digraph with roman-numeral node names and w/n annotations."""
    lines = [f"digraph {name} {{", "  rankdir=TB;"]
    if genealogy is not None and genealogy.edges:
        for node in genealogy.nodes:
            w, o = genealogy.info[node]
            text = node if node == "N" else f"{node}\\nw={w} n={o}"
            lines.append(f'  "{node}" [label="{text}"];')
        for a, b in genealogy.edges:
            lines.append(f'  "{a}" -> "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"

from itertools import combinations
from math import comb

import pytest
from gmpy2 import mpq

from simplexmoments import catalog as cat
from simplexmoments.lp import EmptyRegionError, LinearInequality, interior_point, maximize, strict_feasible
from simplexmoments.symmetry import (
    VertexPermutation, affine_symmetries, build_genealogy, enumerate_configurations, export_dot, group_closure,
    indices_of, is_realisable, mask_of, orbit, roman,
)


# ---------------------------------------------------------------------------
# exact LP
# ---------------------------------------------------------------------------

def test_maximize_small_lp():
    res = maximize([1, 1], [[1, 2], [3, 1]], [4, 6])
    assert res.status == "optimal" and res.value == mpq(14, 5)


def test_open_orthant_region():
    region = [LinearInequality([-1, 0, 0], -1), LinearInequality([0, -1, 0], -1), LinearInequality([0, 0, -1], -1)]
    assert strict_feasible(region)
    x = interior_point(region)
    assert all(q.holds(x) for q in region)


def test_tetrahedron_second_region_has_margin():
    # a > 1, b > 1, 0 < c < 1
    region = [LinearInequality([-1, 0, 0], -1), LinearInequality([0, -1, 0], -1),
              LinearInequality([0, 0, 1], 1), LinearInequality([0, 0, -1], 0)]
    x = interior_point(region)
    assert min(q.slack(x) for q in region) > 0


def test_empty_region():
    region = [LinearInequality([-1], -1), LinearInequality([1], 0)]
    assert not strict_feasible(region)
    with pytest.raises(EmptyRegionError):
        interior_point(region)


def test_strictness_matters():
    # x < 1 and x > 1 is empty, x <= 1 and x >= 1 is not
    assert not strict_feasible([LinearInequality([1], 1), LinearInequality([-1], -1)])
    res = maximize([1], [[1], [-1]], [1, -1])
    assert res.status == "optimal" and res.value == 1


# ---------------------------------------------------------------------------
# permutations and groups
# ---------------------------------------------------------------------------

def test_permutation_constructors():
    p = VertexPermutation.from_cycles([(1, 2, 3)], 4)
    assert p.image == (1, 2, 0, 3)
    assert VertexPermutation.from_images([2, 3, 1, 4]).image == (1, 2, 0, 3)
    assert p.compose(p.inverse()).image == (0, 1, 2, 3)
    assert p.apply_mask(0b0011) == 0b0110
    with pytest.raises(ValueError):
        VertexPermutation([0, 0, 1])


def test_identity_group():
    assert group_closure([VertexPermutation(range(5))]).order == 1


@pytest.mark.parametrize("name, order", [
    ("T2", 6), ("C2", 8), ("T3", 24), ("C3", 48), ("O3", 48), ("T4", 120), ("C4", 384), ("O4", 384),
    ("cuboctahedron", 48), ("truncated tetrahedron", 24), ("triangular prism", 12), ("square pyramid", 8),
])
def test_group_orders(name, order):
    assert cat.get(name).group.order == order


def test_stored_generators_match_brute_force_symmetries():
    for name in ("O3", "C3", "square pyramid", "triangular bipyramid", "triakis tetrahedron"):
        entry = cat.get(name)
        assert entry.group.elements == affine_symmetries(entry.polytope.vertices).elements, name


def test_octahedron_orbits():
    G = cat.get("O3").group
    assert len(orbit(mask_of([0]), G)) == 6
    assert len(orbit(0, G)) == 1
    configs = cat.get("O3").configurations
    third = [c for c in configs if c.size == 3][0]
    assert (third.orbit_size, third.weight) == (8, 4)


def test_octahedron_realisability():
    O3 = cat.get("O3").polytope
    # vertex order is e1, e2, e3, -e1, -e2, -e3
    assert is_realisable(O3, mask_of([2]))
    assert not is_realisable(O3, mask_of([2, 5]))
    assert is_realisable(O3, 0)


def test_realisability_is_symmetric_under_complement():
    for name in ("C3", "O3", "triangular prism"):
        P = cat.get(name).polytope
        n = len(P.vertices)
        full = (1 << n) - 1
        for r in range(1, n // 2 + 1):
            for S in combinations(range(n), r):
                m = mask_of(S)
                assert is_realisable(P, m) == is_realisable(P, full ^ m)


# ---------------------------------------------------------------------------
# configurations
# ---------------------------------------------------------------------------

def signature(configs):
    return sorted((c.weight, c.order) for c in configs)


def test_octahedron_configurations():
    assert signature(cat.get("O3").configurations) == sorted([(6, 4), (12, 6), (4, 6)])


def test_cube_configurations():
    configs = cat.get("C3").configurations
    assert sorted(c.weight for c in configs) == sorted([8, 12, 24, 4, 3])
    assert sorted(c.order for c in configs) == sorted([3, 4, 5, 6, 4])


def test_tesseract_has_fourteen_configurations():
    configs = cat.get("C4").configurations
    assert len(configs) == 14
    # each configuration class counts unordered partitions {S, V\S}; all of them
    # together are the 940 non-trivial linear dichotomies of the 16 vertices
    assert sum(c.weight for c in configs) == 940


def test_weight_halving_only_for_half_splits():
    for name in ("C3", "O3", "T3", "square pyramid", "triangular prism"):
        P = cat.get(name).polytope
        n = len(P.vertices)
        for c in cat.get(name).configurations:
            if 2 * c.size < n:
                assert c.weight == c.orbit_size
            elif c.complement_in_orbit:
                assert c.weight == c.orbit_size // 2
    cube_face = [c for c in cat.get("C3").configurations if c.size == 4 and c.order == 4][0]
    assert (cube_face.orbit_size, cube_face.weight) == (6, 3)


def test_orbit_stabiliser():
    for name in ("C3", "O3", "C4"):
        entry = cat.get(name)
        G = entry.group
        for c in entry.configurations:
            stab = sum(1 for g in G.elements if g.apply_mask(c.representative) == c.representative)
            assert c.orbit_size * stab == G.order


def test_orbits_partition_each_level():
    # every k-subset lies in exactly one orbit (Burnside bookkeeping per level)
    entry = cat.get("C3")
    G = entry.group
    n = len(entry.polytope.vertices)
    for r in range(n + 1):
        remaining = {mask_of(S) for S in combinations(range(n), r)}
        total = 0
        while remaining:
            orb = orbit(next(iter(remaining)), G)
            assert orb <= remaining
            remaining -= orb
            total += len(orb)
        assert total == comb(n, r)


def test_section_order_is_stable_inside_the_region():
    for name in ("T3", "C3", "O3", "C4", "cuboctahedron"):
        for c in cat.get(name).configurations:
            if c.order_check is not None:
                assert c.order_check == c.order, (name, c.label)


def test_sample_points_are_interior():
    for name in ("C3", "O3", "O4"):
        for c in cat.get(name).configurations:
            assert all(q.holds(c.sample_eta) for q in c.eta_region)


def test_published_label_conflicts_are_flagged():
    t3 = {c.label: c for c in cat.get("T3").configurations}
    assert t3["II"].weight == 3
    assert any("published (w=6" in note for note in t3["II"].notes)
    o4 = {c.published_label: c for c in cat.get("O4").configurations}
    assert (o4["IV"].weight, o4["IV"].order) == (8, 12)
    assert o4["IV"].notes


def test_enumeration_without_labels_is_deterministic():
    entry = cat.get("C3")
    a = enumerate_configurations(entry.polytope, entry.group)
    b = enumerate_configurations(entry.polytope, entry.group)
    assert [(c.representative, c.label) for c in a] == [(c.representative, c.label) for c in b]


def test_group_of_wrong_degree_rejected():
    with pytest.raises(ValueError):
        enumerate_configurations(cat.get("C3").polytope, cat.get("T3").group)


# ---------------------------------------------------------------------------
# genealogy
# ---------------------------------------------------------------------------

def test_tetrahedron_genealogy_is_a_chain():
    entry = cat.get("T3")
    g = build_genealogy(entry.configurations, entry.group)
    assert g.nodes == ["N", "I", "II"]
    assert g.edges == [("N", "I"), ("I", "II")]


def test_segment_genealogy():
    entry = cat.get("T1")
    g = build_genealogy(entry.configurations, entry.group)
    assert g.edges == [("N", "I")]


def test_octahedron_and_cube_genealogies():
    o3 = cat.get("O3")
    g = build_genealogy(o3.configurations, o3.group)
    assert g.nodes == ["N", "I", "II", "III"]
    c3 = cat.get("C3")
    g = build_genealogy(c3.configurations, c3.group)
    assert len(g.nodes) == 6 and len(g.edges) >= 5


def test_square_pyramid_configurations():
    configs = cat.get("square pyramid").configurations
    assert sorted(c.weight for c in configs) == [1, 4, 4, 4]


def test_dot_export():
    entry = cat.get("O3")
    text = export_dot(build_genealogy(entry.configurations, entry.group), "O3")
    assert text.startswith("digraph O3 {")
    assert '"N" -> "I";' in text and "w=12 n=6" in text
    assert export_dot(None) == "digraph genealogy {\n  rankdir=TB;\n}\n"


def test_helpers():
    assert roman(14) == "XIV" and roman(47) == "XLVII"
    assert indices_of(mask_of([0, 3, 5])) == (0, 3, 5)


@pytest.mark.slow
def test_truncated_octahedron_has_47_configurations():
    entry = cat.get("truncated octahedron")
    configs = entry.configurations
    assert len(configs) == 47
    assert signature(configs) == sorted((w, n) for _, w, n in entry.published_labels)

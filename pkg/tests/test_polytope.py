import random
from itertools import product

import pytest
from gmpy2 import mpq

from simplexmoments import Hyperplane, Polytope, hrep_from_vrep, slice_polytope, volume, vrep_from_hrep
from simplexmoments.polytope import (
    DegenerateError, Halfspace, UnboundedError, monomial_moment, multi_indices, section_chart,
    simplex_moments, triangulate,
)
from simplexmoments.moments import even_moment

from conftest import random_eta

Q = mpq


def simplex(d):
    return Polytope([tuple(0 for _ in range(d))] + [tuple(int(i == j) for j in range(d)) for i in range(d)])


def as_sets(halfspaces):
    out = set()
    for h in halfspaces:
        scale = max(abs(c) for c in h.normal) or 1
        out.add((tuple(c / scale for c in h.normal), h.offset / scale))
    return out


def test_segment_hrep():
    P = Polytope([(0,), (1,)])
    assert as_sets(hrep_from_vrep(P)) == {((Q(1),), Q(1)), ((Q(-1),), Q(0))}


def test_tetrahedron_hrep_has_four_facets():
    hs = hrep_from_vrep(simplex(3))
    assert len(hs) == 4
    assert as_sets(hs) == {
        ((Q(-1), Q(0), Q(0)), Q(0)), ((Q(0), Q(-1), Q(0)), Q(0)),
        ((Q(0), Q(0), Q(-1)), Q(0)), ((Q(1), Q(1), Q(1)), Q(1)),
    }


def test_octahedron_inequalities_are_the_sign_patterns(solids):
    hs = hrep_from_vrep(solids["O3"])
    assert as_sets(hs) == {(tuple(Q(s) for s in signs), Q(1)) for signs in product((1, -1), repeat=3)}


def test_cube_from_halfspaces():
    hs = []
    for i in range(3):
        e = [0, 0, 0]
        e[i] = 1
        hs.append(Halfspace(e, 1))
        hs.append(Halfspace([-c for c in e], 0))
    P = vrep_from_hrep(hs)
    assert set(P.vertices) == set(product((Q(0), Q(1)), repeat=3))


def test_unbounded_halfspaces_rejected():
    with pytest.raises(UnboundedError):
        vrep_from_hrep([Halfspace([1, 0], 1), Halfspace([0, 1], 1)])


def test_round_trip_every_catalog_solid(solids):
    for name, P in solids.items():
        back = vrep_from_hrep(hrep_from_vrep(P))
        assert set(back.vertices) == set(P.vertices), name


def test_volumes():
    assert volume(simplex(3)) == Q(1, 6)
    assert volume(Polytope([(1, 0, 0, 0), (-1, 0, 0, 0), (0, 1, 0, 0), (0, -1, 0, 0),
                            (0, 0, 1, 0), (0, 0, -1, 0), (0, 0, 0, 1), (0, 0, 0, -1)])) == Q(2, 3)


def test_truncated_triangle_area():
    for a, b in [(Q(1, 2), Q(1, 2)), (Q(1, 3), Q(3, 4))]:
        U = Polytope([(a, 0), (1, 0), (0, 1), (0, b)])
        assert U.volume == (1 - a * b) / 2


def test_triangulations(solids):
    assert len(triangulate(simplex(3))) == 1
    square = triangulate(solids["C2"])
    assert len(square) == 2 and [s.volume() for s in square] == [Q(1, 2), Q(1, 2)]
    assert sum(s.volume() for s in triangulate(solids["O3"])) == Q(4, 3)


def test_tetrahedron_cut_near_origin_is_scaled_corner():
    a, b, c = Q(2), Q(3), Q(5, 2)
    plus, minus, sec = slice_polytope(simplex(3), Hyperplane((a, b, c)))
    assert set(plus.vertices) == {(0, 0, 0), (1 / a, 0, 0), (0, 1 / b, 0), (0, 0, 1 / c)}
    assert len(sec.vertices) == 3


def test_tetrahedron_quadrilateral_section():
    _, _, sec = slice_polytope(simplex(3), Hyperplane((Q(2), Q(3), Q(1, 2))))
    assert len(sec.vertices) == 4


def test_plane_missing_the_body():
    P = simplex(3)
    plus, minus, sec = slice_polytope(P, Hyperplane((Q(1, 10),) * 3))
    assert sec.is_empty and minus.is_empty
    assert set(plus.vertices) == set(P.vertices)


def test_slice_volume_additivity(solids):
    rng = random.Random(7)
    for name, P in solids.items():
        if P.dim < 2:
            continue
        for _ in range(20):
            H = Hyperplane(random_eta(rng, P))
            plus, minus, _ = slice_polytope(P, H)
            assert plus.volume + minus.volume == P.volume, name


def test_monomial_moments():
    T2 = simplex(2)
    assert monomial_moment(T2, (0, 0)) == 1
    assert monomial_moment(T2, (1, 0)) == Q(1, 3)
    C3 = Polytope(list(product((0, 1), repeat=3)))
    assert monomial_moment(C3, (2, 0, 0)) == Q(1, 3)


def test_monomial_moment_factorises_on_the_square():
    # integral of x^2 y over [0,1]^2 is (1/3)(1/2)
    C2 = Polytope(list(product((0, 1), repeat=2)))
    assert monomial_moment(C2, (2, 1)) == Q(1, 3) * Q(1, 2)


def test_triangulation_sums_match_moments(solids):
    rng = random.Random(3)
    for name in ("C3", "O3", "triangular prism"):
        P = solids[name]
        for _ in range(5):
            alpha = tuple(rng.randint(0, 2) for _ in range(P.dim))
            total = Q(0)
            idx = multi_indices(P.dim, sum(alpha))
            for s in triangulate(P):
                mom = dict(zip(idx, simplex_moments(s.points, sum(alpha))))
                total += s.volume() * mom[alpha]
            assert total == monomial_moment(P, alpha) * P.volume, (name, alpha)


def test_scaling(solids):
    for name in ("T3", "C3", "O3"):
        P = solids[name]
        for lam in (Q(2), Q(1, 3)):
            assert P.scaled(lam).volume == lam ** 3 * P.volume


def test_section_charts_agree_on_even_moments(solids):
    rng = random.Random(11)
    for name in ("T3", "C3", "O3", "cuboctahedron"):
        P = solids[name]
        for _ in range(3):
            _, _, sec = slice_polytope(P, Hyperplane(random_eta(rng, P)))
            a, b = section_chart(sec, "edges"), section_chart(sec, "drop")
            assert even_moment(a, 2) == even_moment(b, 2), name


def test_chart_of_one_dimensional_section_is_a_segment():
    _, _, sec = slice_polytope(simplex(2), Hyperplane((Q(2), Q(3))))
    chart = section_chart(sec)
    assert chart.dim == 1 and len(chart.vertices) == 2


def test_degenerate_inputs():
    with pytest.raises(DegenerateError):
        section_chart(Polytope([(0, 0, 0), (1, 0, 0)]))
    flat = Polytope([(0, 0), (1, 1), (2, 2)])
    assert not flat.is_full_dimensional
    with pytest.raises(DegenerateError):
        monomial_moment(flat, (1, 0))

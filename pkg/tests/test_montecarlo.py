import math

import numpy as np
import pytest
from gmpy2 import mpq
from scipy import stats

from simplexmoments import catalog as cat
from simplexmoments.montecarlo import (
    SamplerState, efron_mean, gamma_samples, mc_gamma, mc_moment, sample_uniform,
)

# mean tetrahedron volume in the unit cube
CUBE_TETRA = 3977 / 216000 - math.pi ** 2 / 2160


def test_unit_cube_coordinates_are_uniform():
    pts = sample_uniform(SamplerState(cat.get("C3").polytope, seed=3), 10 ** 6)
    se = math.sqrt(1 / 12 / len(pts))
    assert np.all(np.abs(pts.mean(axis=0) - 0.5) < 3 * se)
    assert pts.min() >= 0 and pts.max() <= 1


def test_triangle_corner_probability():
    pts = sample_uniform(SamplerState(cat.get("T2").polytope, seed=4), 10 ** 6)
    p = np.mean(pts.sum(axis=1) < 0.5)
    assert abs(p - 0.25) < 3 * math.sqrt(0.25 * 0.75 / len(pts))


def test_chi_square_on_the_cube_grid():
    pts = sample_uniform(SamplerState(cat.get("C3").polytope, seed=5), 64_000)
    cells = np.minimum((pts * 4).astype(int), 3)
    counts = np.bincount(cells[:, 0] * 16 + cells[:, 1] * 4 + cells[:, 2], minlength=64)
    chi2 = float(((counts - 1000) ** 2 / 1000).sum())
    assert chi2 < stats.chi2.ppf(0.999, df=63)


def test_octahedron_sampling_uses_all_pieces():
    state = SamplerState(cat.get("O3").polytope, seed=6)
    assert np.all(np.diff(state.cumulative) > 0)
    assert state.cumulative[-1] == pytest.approx(4 / 3)
    pts = sample_uniform(state, 80_000)
    assert np.all(np.abs(pts).sum(axis=1) <= 1 + 1e-12)
    octant = (pts > 0) @ np.array([1, 2, 4])
    assert np.all(np.bincount(octant, minlength=8) > 9_000)


def test_single_point_and_position():
    state = SamplerState(cat.get("T3").polytope, seed=0)
    assert sample_uniform(state).shape == (3,)
    sample_uniform(state, 10)
    assert state.position == 11


def test_seeded_streams_are_reproducible():
    a = sample_uniform(SamplerState(cat.get("C2").polytope, seed=11), 1000)
    b = sample_uniform(SamplerState(cat.get("C2").polytope, seed=11), 1000)
    c = sample_uniform(SamplerState(cat.get("C2").polytope, seed=12), 1000)
    assert np.array_equal(a, b) and not np.array_equal(a, c)
    kids = SamplerState(cat.get("C2").polytope, seed=11).spawn(2)
    assert not np.array_equal(kids[0].draw(10), kids[1].draw(10))


def test_estimates_are_reproducible():
    P = cat.get("T2").polytope
    assert mc_moment(P, 2, 2, 50_000, seed=9).as_dict() == mc_moment(P, 2, 2, 50_000, seed=9).as_dict()


def test_argument_checks():
    P = cat.get("T3").polytope
    with pytest.raises(ValueError, match="too small"):
        mc_moment(P, 3, 1, 999)
    with pytest.raises(ValueError):
        mc_moment(P, 2, 1, 10_000)
    with pytest.raises(ValueError):
        mc_moment(cat.get("T4").polytope, 5, 1, 10_000)
    with pytest.raises(ValueError):
        mc_gamma(P, 0, 10_000)
    with pytest.raises(ValueError):
        efron_mean(cat.get("T2").polytope, 3, 10_000)


@pytest.mark.parametrize("solid, k, exact", [("T2", 2, 1 / 72), ("C2", 1, 11 / 144)])
def test_interval_contains_exact_value(solid, k, exact):
    est = mc_moment(cat.get(solid).polytope, 2, k, 10 ** 6, seed=0)
    assert est.contains(exact)
    assert est.plain_ci95[0] <= est.plain_mean <= est.plain_ci95[1]
    assert est.half_width < 1e-3


def test_control_variates_shrink_the_interval():
    est = mc_moment(cat.get("T3").polytope, 3, 1, 200_000, seed=1)
    assert est.control is not None and est.control["variance_ratio"] < 1
    assert est.half_width < est.plain_ci95[1] - est.plain_mean
    assert est.contains(13 / 720 - math.pi ** 2 / 15015)


def test_coverage_of_the_plain_interval():
    P = cat.get("T2").polytope
    hits = sum(mc_moment(P, 2, 2, 10_000, seed=s, control_variate=False).contains(1 / 72) for s in range(200))
    # 95% nominal: Binomial(200, 0.95) lies in [180, 199] with probability > 0.99
    assert 180 <= hits <= 199


def test_hull_of_more_points():
    # E(hull of d+2 points) = (d+2)/2 E(simplex) in three dimensions
    est = mc_moment(cat.get("C3").polytope, 4, 1, 40_000, seed=2, control_variate=False)
    # a single run is checked at four standard errors, not at the 95% interval
    assert abs(est.mean - 2.5 * CUBE_TETRA) < 4 * est.std_error


def test_exact_and_float_fractions_agree():
    P = cat.get("T3").polytope
    fast = gamma_samples(P, 20, seed=8)
    exact = gamma_samples(P, 20, seed=8, exact=True)
    assert all(isinstance(g, type(mpq(0))) for g in exact)
    assert np.allclose(fast, [float(g) for g in exact], rtol=0, atol=1e-12)
    assert np.all((0 <= fast) & (fast <= 1))


def test_gamma_with_exponent_zero_is_two():
    est = mc_gamma(cat.get("C3").polytope, 1, 10_000, seed=0)
    assert est.mean == 2.0 and est.ci95 == (2.0, 2.0)


def test_gamma_is_symmetric_in_the_two_sides():
    # Gamma and 1 - Gamma have the same law, so E[Gamma] = 1/2 up to noise
    g = gamma_samples(cat.get("O3").polytope, 100_000, seed=3)
    assert abs(g.mean() - 0.5) < 4 * g.std() / math.sqrt(len(g))


def test_efron_route_matches_the_hull_route():
    est = efron_mean(cat.get("C3").polytope, 4, 200_000, seed=1)
    assert abs(est.mean - 2.5 * CUBE_TETRA) < 4 * est.std_error
    assert est.extra["gamma_ci95"][0] <= est.extra["gamma"] <= est.extra["gamma_ci95"][1]

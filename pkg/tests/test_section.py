import io
import json
import math

import numpy as np
import pytest
from gmpy2 import mpq

from simplexmoments import QuadratureSpec, catalog as cat
from simplexmoments.quadrature import collapsed_simplex_rule, gauss_legendre, tanh_sinh
from simplexmoments.section import (
    ConfigurationDomain, NeedsManualTransform, SectionMomentUnavailable, box_contribution, config_contribution,
    configuration_domain, integrand, integrand_exact, limit_functional, odd_moment, transform_domain,
)
from simplexmoments.section import AxisDescriptor, _axis_map

Q = mpq


def config(solid, label):
    return {c.label: c for c in cat.get(solid).configurations}[label]


# ---------------------------------------------------------------------------
# quadrature rules
# ---------------------------------------------------------------------------

def test_tanh_sinh_is_nested_and_accurate():
    rule = tanh_sinh(4)
    assert float(np.sum(rule.w * rule.x ** 3)) == pytest.approx(0.25, abs=1e-12)
    assert float(np.sum(rule.coarse * rule.x ** 3)) == pytest.approx(0.25, abs=1e-6)
    # endpoint singularity
    assert float(np.sum(rule.w * -np.log(rule.x))) == pytest.approx(1.0, rel=1e-9)
    assert np.allclose(rule.x + rule.xbar, 1.0)


def test_gauss_legendre_polynomial_exactness():
    rule = gauss_legendre(6)
    assert float(np.sum(rule.w * rule.x ** 11)) == pytest.approx(1 / 12, rel=1e-14)


def test_collapsed_rule_volume_and_moment():
    rule = gauss_legendre(8)
    total = first = 0.0
    for lam, w, _ in collapsed_simplex_rule(rule, 3, chunk=100):
        total += w.sum()
        first += (w * lam[:, 1]).sum()
    assert total == pytest.approx(1 / 6, rel=1e-13)
    assert first == pytest.approx(1 / 24, rel=1e-13)


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(tol=0)
    with pytest.raises(ValueError):
        QuadratureSpec(nodes=3)
    with pytest.raises(ValueError):
        QuadratureSpec(scheme="simpson")


# ---------------------------------------------------------------------------
# integrand
# ---------------------------------------------------------------------------

def test_tetrahedron_integrand_first_configuration():
    expected = Q(2, 3) * Q(1, 72) * Q(3, 8) ** 5 * Q(3, 32)
    assert integrand_exact(cat.get("T3").polytope, 1, (2, 2, 2)) == expected
    assert integrand(cat.get("T3").polytope, config("T3", "I"), 1, (2, 2, 2)) == float(expected)


def test_triangle_integrand_at_coincident_intercepts():
    # the printed iota has a removable singularity at a = b; its limit at a = b = 2, k = 1 is 1/4
    a, k = Q(2), 1
    d_num = (a - 1) ** (k + 2) - a * (k + 2) * (a - 1) ** (k + 1) - 1
    iota_limit = -d_num / (a * a * (1 + k) * (2 + k))
    assert iota_limit == Q(1, 4)
    expected = Q(1, 2) * Q(1, 6) * Q(1, 2) ** 4 * iota_limit
    assert integrand_exact(cat.get("T2").polytope, 1, (2, 2)) == expected


def test_integrand_outside_region_rejected():
    with pytest.raises(ValueError):
        integrand(cat.get("T3").polytope, config("T3", "I"), 1, (Q(1, 2), 2, 2))


# ---------------------------------------------------------------------------
# configuration integrals and odd moments
# ---------------------------------------------------------------------------

def test_tetrahedron_configuration_integrals():
    P = cat.get("T3").polytope
    one = config_contribution(P, config("T3", "I"), 1)
    two = config_contribution(P, config("T3", "II"), 1)
    assert one.value == pytest.approx(3 / 2000, rel=1e-6)
    assert two.value == pytest.approx(217 / 54000 - math.pi ** 2 / 45045, rel=1e-4)
    assert one.converged and two.converged
    # first configuration equals twice the second moment
    assert one.value == pytest.approx(2 * 3 / 4000, rel=1e-6)


def test_weighted_reassembly_is_exact():
    est = odd_moment(cat.get("T3").polytope, 1)
    parts = [est.weights[lab] * v for lab, (v, _) in est.per_config.items()]
    assert est.total == pytest.approx(math.fsum(parts), rel=1e-15)
    assert est.weights == {"I": 4, "II": 3}
    assert est.error_estimate >= 0


def test_determinism():
    P = cat.get("C2").polytope
    a = odd_moment(P, 1).as_dict()
    b = odd_moment(P, 1).as_dict()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


@pytest.mark.parametrize("solid, k, expected", [
    ("T2", 1, 1 / 12), ("T2", 3, 31 / 9000), ("C2", 1, 11 / 144), ("C2", 3, 137 / 72000),
])
def test_planar_odd_moments(solid, k, expected):
    assert odd_moment(cat.get(solid).polytope, k).total == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("solid, expected", [("T2", 1 / 72), ("C2", 1 / 96)])
def test_even_order_bridge(solid, expected):
    # the section route at even k against the permutation expansion
    from simplexmoments import even_moment

    P = cat.get(solid).polytope
    assert float(even_moment(P, 2)) == expected
    assert odd_moment(P, 2).total == pytest.approx(expected, rel=1e-9)


def test_segment_base_case():
    P = cat.get("T1").polytope
    for k in (1, 3):
        assert odd_moment(P, k).total == pytest.approx(2 / ((1 + k) * (2 + k)), rel=1e-10)


def test_refinement_reduces_error_estimates():
    for solid in ("T3", "O3"):
        P = cat.get(solid).polytope
        spec = QuadratureSpec(level=2, max_level=4, tol=1e-15)
        for c in cat.get(solid).configurations:
            history = config_contribution(P, c, 1, spec).history
            errors = [e for _, _, e in history]
            assert all(b <= a for a, b in zip(errors, errors[1:])), (solid, c.label, errors)


def test_gauss_legendre_route_agrees():
    P = cat.get("T3").polytope
    spec = QuadratureSpec(scheme="gauss-legendre", nodes=24, tol=1e-3)
    res = config_contribution(P, config("T3", "I"), 1, spec)
    assert res.value == pytest.approx(3 / 2000, rel=1e-3)


def test_exact_node_evaluation_agrees_with_float():
    P = cat.get("T2").polytope
    c = cat.get("T2").configurations[0]
    exact = config_contribution(P, c, 1, QuadratureSpec(scheme="gauss-legendre", nodes=6, precision="exact"))
    fast = config_contribution(P, c, 1, QuadratureSpec(scheme="gauss-legendre", nodes=6))
    assert exact.value == pytest.approx(fast.value, rel=1e-12)


def test_telemetry_stream():
    buf = io.StringIO()
    odd_moment(cat.get("T2").polytope, 1, telemetry=buf)
    records = [json.loads(line) for line in buf.getvalue().splitlines()]
    assert {r["event"] for r in records} >= {"level", "partial"}
    assert all("nodes" in r for r in records if r["event"] == "level")


def test_order_checks():
    P = cat.get("T3").polytope
    with pytest.raises(ValueError):
        odd_moment(P, -1)
    with pytest.raises(SectionMomentUnavailable):
        odd_moment(P, 0.5)


# ---------------------------------------------------------------------------
# limit k -> -1
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("solid", ["T1", "T2"])
def test_limit_towards_minus_one(solid):
    P = cat.get(solid).polytope
    limit = limit_functional(P)
    scaled = [eps * odd_moment(P, -1 + eps).total for eps in (0.1, 0.01, 0.001)]
    gaps = [abs(s - limit) for s in scaled]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 0.01 * limit


# ---------------------------------------------------------------------------
# product-region transforms
# ---------------------------------------------------------------------------

def test_axis_maps():
    t = np.array([0.5])
    a, jac = _axis_map(AxisDescriptor("above", Q(1), None), t)
    assert a[0] == 2.0 and jac[0] == 4.0
    a, jac = _axis_map(AxisDescriptor("interval", Q(0), Q(1)), np.array([0.3]))
    assert a[0] == 0.3 and jac[0] == 1.0


def test_octahedron_first_configuration_is_a_box():
    # one vertex beyond the plane: eta1 > 1 and |eta2|, |eta3| < 1
    dom = configuration_domain(cat.get("O3").polytope, config("O3", "I"))
    assert [[ax.kind for ax in axes] for axes in dom.axes] == [["above", "interval", "interval"]]
    eta, jac = transform_domain(dom)(np.array([[0.5, 0.5, 0.5]]))
    assert np.allclose(eta, [[2.0, 0.0, 0.0]]) and jac[0] == pytest.approx(16.0)


def test_coupled_region_needs_manual_transform():
    entry = cat.get("C3")
    for c in entry.configurations:
        dom = configuration_domain(entry.polytope, c)
        coupled = [i for i, axes in enumerate(dom.axes) if axes is None]
        if coupled:
            break
    assert coupled
    with pytest.raises(NeedsManualTransform, match="needs manual transform"):
        transform_domain(dom, coupled[0])


def test_box_route_matches_simplex_route():
    P = cat.get("O3").polytope
    c = config("O3", "I")
    main = config_contribution(P, c, 1).value
    assert box_contribution(P, c, 1, level=4) == pytest.approx(main, rel=1e-5)


def test_halving_factor_needs_a_reason():
    dom = configuration_domain(cat.get("T3").polytope, config("T3", "I"))
    with pytest.raises(ValueError):
        ConfigurationDomain(dom.config, dom.regions, dom.axes, halving_factor=2)
    ConfigurationDomain(dom.config, dom.regions, dom.axes, halving_factor=2, symmetry_note="mirror image")
